#pragma once

#include "fdyn/affine_like.hpp"
#include "fdyn/cantor.hpp"
#include "fdyn/fractal.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fdyn {

// x -> 3x on [0,1/3], 3x - 2 on [2/3,1].
CantorSystem ternary();
// Removes the open middle part of relative length alpha at every step; alpha in (0,1).
CantorSystem middle_alpha(const Rational& alpha);
// Branches [0,1/2] and [3/4,1] (ratios 1/2 and 1/4).
CantorSystem markov_golden();
// n >= 2 evenly spaced branches of length r on [0,1]; n r < 1.
CantorSystem even_branches(int n, const Rational& r);

// One affine transition of a horseshoe: the vertical strip P in `from` maps onto
// the horizontal strip Q in `to`. Every rectangle is [0,1]^2 in its own chart.
struct Transition {
    std::string label;
    std::string from;
    std::string to;
    AffinePiece piece;
};

// Affine horseshoe on labelled rectangles, optionally with a quadratic fold between
// two tongues (ToyHeteroclinicFamily). A fold-free model is a pure horseshoe.
struct Horseshoe {
    std::string name;
    std::vector<std::string> rects;
    std::vector<Transition> transitions;
    std::optional<FoldingModel> fold;
    ConeParams cone;

    std::size_t rect_index(const std::string& label) const;
    // Throws ValidationError on unknown rectangles, strips leaving their rectangles,
    // overlapping strips, a non-mixing transition graph or cone violations.
    void validate() const;
};

// n evenly spaced strips of width r in a single rectangle.
Horseshoe smale_affine(int n, const Rational& r);

constexpr const char* kToyWidth = "709/2500"; // 2 w^0.55 = 1 to four digits

// Two rectangles u and s with strips of width w = 1/rho at both ends. (u,0) and
// (s,0) fix the saddles p_u and p_s at the lower left corners; (u,1) and (s,1)
// connect the rectangles. The fold sends the tongue L_u in the gap of R_u onto a
// parabola in R_s whose tip sits at (t, 1/2), so t = 0 is a quadratic tangency
// between the unstable line of p_u and the stable line of p_s.
Horseshoe toy_het(const Rational& w = parse_rational(kToyWidth), double b = 0.1, double t = 0.0);
Horseshoe toy_het_fold_free(const Rational& w = parse_rational(kToyWidth));

// Swap past and future: transitions are inverted and the roles of x and y exchanged.
// The fold is dropped.
Horseshoe transpose(const Horseshoe& h);

// Tip of L_s in R_s and of L_u in R_u.
std::pair<Interval, Interval> tip_s(const FoldingModel& g, const Interval& t);
std::pair<Interval, Interval> tip_u(const FoldingModel& g, const Interval& t);

// G(X, Y) = (Y, Y^2 - t + b X).
std::array<double, 2> fold_map(const FoldingModel& g, double t, double X, double Y);

// One-dimensional factor systems: the x-coordinates (forward dynamics) and the
// y-coordinates (backward dynamics). Rectangle a occupies [2a, 2a+1].
CantorSystem unstable_factor(const Horseshoe& h);
CantorSystem stable_factor(const Horseshoe& h);

struct BoxCount {
    std::vector<std::pair<double, double>> counts; // (eps, N(eps))
    double slope = 0.0;
};

// Box-counting slope of the planar set built from cylinders of both factors cut at
// length 2^(-2.5 depth). N(eps) is the product of the minimal 1-D covering numbers
// per rectangle, summed over rectangles; the slope is a least-squares fit over
// eps = 2^(-k/8) for k_max/5 <= k <= k_max, where 2^(-k_max/8) is four times the
// cut length.
BoxCount box_counting(const Horseshoe& h, std::size_t depth);

struct HorseshoeDims {
    DimensionBracket ds;
    DimensionBracket du;
    BoxCount box;
};

// d_s from the stable factor and d_u from the unstable factor, plus box counting.
HorseshoeDims stable_unstable_dimensions(const Horseshoe& h, double tol, std::size_t box_depth = 8);

// Horizontal cone {|dy| <= |dx|} forward invariant with expansion >= lambda and
// vertical cone backward invariant with expansion >= lambda, on grid_n^2 boxes of
// every strip. With include_fold the fold is checked on its tongue as well.
bool verify_hyperbolic_conefield(const Horseshoe& h, int grid_n, const ConeParams& params, bool include_fold = false);

struct Box {
    double x0, x1, y0, y1;
};

struct SinkResult {
    int period = 0;
    std::vector<std::array<double, 2>> orbit;
    Interval det{0.0};
    Interval trace{0.0};
};

// "limit": (x, y) -> (y, y^2); "toy_return": (X, Y) -> (Y, Y^2 - mu + b X).
struct PlaneMap {
    std::string name = "limit";
    double b = 0.1;
};

// Seeds on a seeds x seeds grid in the box are iterated; a cycle that lies in the
// box is reported when a Krawczyk test proves a periodic point nearby and the
// Jacobian of the return map is certified stable there.
std::optional<SinkResult> detect_sink(const PlaneMap& map, double mu, const Box& box, int max_period, int iters,
                                      int seeds = 8, unsigned threads = 1);

struct NamedModel {
    std::string name;
    std::string kind; // "cantor" or "horseshoe"
    std::string description;
};

std::vector<NamedModel> standard_models();

// Named Cantor set: ternary, middle_fifth, middle_0.6, markov_golden,
// middle_alpha:<q>, even:<n>:<r>. Anything else is read as a JSON file.
CantorSystem resolve_cantor(const std::string& name_or_path);
// Named horseshoe: toy_het, toy_het_fold_free, smale_affine:<n>:<r>, or a JSON file.
Horseshoe resolve_horseshoe(const std::string& name_or_path);

nlohmann::ordered_json horseshoe_to_json(const Horseshoe& h);
Horseshoe horseshoe_from_json(const nlohmann::json& j);

} // namespace fdyn
