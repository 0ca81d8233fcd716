#pragma once

#include "fdyn/errors.hpp"
#include "fdyn/interval.hpp"
#include "fdyn/rational.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fdyn {

// Failure of a simple or parabolic composition.
class CompositionError : public ValidationError {
public:
    enum class Kind { EmptyOverlap, RectangleMismatch, ConeViolation, CrossingViolation, MultiFold };
    CompositionError(Kind kind, const std::string& what) : ValidationError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

const char* to_string(CompositionError::Kind k);

struct ConeParams {
    double lambda = 2.0;
    double u = 1.5;
    double v = 1.5;
    double C = 2.0;

    // Throws ValidationError unless 1 < u v < lambda^2 and C > 0.
    void validate() const;
};

// Constants bracketing |P''| / (|P| |P'|) for simple compositions and
// |P+-| delta^(1/2) / (|P0| |P1|) for parabolic ones.
std::pair<double, double> simple_kappa(const ConeParams& p);
std::pair<double, double> parabolic_kappa(const ConeParams& p);

// x0 = a0 + a1 x1 + a2 y0,  y1 = b0 + b1 x1 + b2 y0  with (x1, y0) in [0,1]^2.
struct AffinePiece {
    Rational a0, a1, a2, b0, b1, b2;

    bool axis_aligned() const { return a2 == 0 && b1 == 0; }
    friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

// F' o F for affine pieces (F first). Throws EmptyOverlap when the intermediate
// coordinate leaves [0,1].
AffinePiece compose(const AffinePiece& f, const AffinePiece& fp);
AffinePiece transpose(const AffinePiece& f);

// Quadratic fold from the tongue L_u of rectangle `from` into rectangle `to`.
// In rectangle coordinates: x_s = tip0 + t - (x - 1/2)^2 - b y,  y_s = x.
// With X = y, Y = x - 1/2 and output (x_s, y_s) = (-Y', X' + 1/2) this is
// G(X, Y) = (Y, Y^2 - t + b X).
struct FoldingModel {
    double b = 0.1;
    Interval t{0.0};
    double tip0 = 0.0;
    double half_width = 0.25; // L_u = [1/2 - h, 1/2 + h] x [0, 1]
    int n0 = 1;
    std::string from = "u";
    std::string to = "s";
};

// post o G o pre restricted to one of the two preimage components (sigma = -1 or +1).
struct FoldComposite {
    AffinePiece pre;
    AffinePiece post;
    FoldingModel fold;
    int sigma = 1;
    bool transposed = false;
};

struct DerivRanges {
    Interval Ax, Ay, Bx, By;
    Interval dx_log_Ax, dy_log_Ax, Ayy;
    Interval dy_log_By, dx_log_By, Bxx;
};

struct ImplicitRep {
    std::variant<AffinePiece, FoldComposite> form;
    std::optional<DerivRanges> ranges;
};

// Certified ranges over (x1, y0) in [0,1]^2 and over the fold parameter range.
DerivRanges compute_ranges(const ImplicitRep& rep);
Interval eval_A(const ImplicitRep& rep, const Interval& x, const Interval& y);
Interval eval_B(const ImplicitRep& rep, const Interval& x, const Interval& y);

bool verify_cone(const ImplicitRep& rep, const ConeParams& params);
bool verify_distortion(const ImplicitRep& rep, double C);

// c0 + c1 s + c2 s^2 with certified coefficient ranges.
struct StripBoundary {
    Interval c0{0.0}, c1{0.0}, c2{0.0};
    Interval eval(const Interval& s) const;
};

// {(x, y) in R_rect : phi_minus(y) <= x <= phi_plus(y)}
struct VerticalStrip {
    std::string rect;
    StripBoundary minus, plus;
};

// {(x, y) in R_rect : psi_minus(x) <= y <= psi_plus(x)}
struct HorizontalStrip {
    std::string rect;
    StripBoundary minus, plus;
};

struct AffineLikeElement {
    VerticalStrip P;
    HorizontalStrip Q;
    int n = 0;
    ImplicitRep rep;
    std::vector<std::string> word;
    bool cone_ok = false;
    bool distortion_ok = false;

    const std::string& source() const { return P.rect; }
    const std::string& target() const { return Q.rect; }
};

// Recomputes strips, certified ranges and the cone/distortion flags from e.rep.
void finish_element(AffineLikeElement& e, const ConeParams& params);

// Element from an affine piece; computes strips, ranges and flags.
AffineLikeElement make_affine_element(const AffinePiece& f, const std::string& src, const std::string& dst, int n,
                                      std::vector<std::string> word, const ConeParams& params);

// (|P|, |Q|) as the upper ends of the certified |A_x| and |B_y| ranges.
std::pair<double, double> widths(const AffineLikeElement& e);
// Same, as enclosures.
std::pair<Interval, Interval> width_ranges(const AffineLikeElement& e);

// F' o F. Cone and distortion are re-verified; a cone failure raises ConeViolation.
AffineLikeElement simple_compose(const AffineLikeElement& f, const AffineLikeElement& fp, const ConeParams& params);

struct ParabolicResult {
    bool possible = false;
    Interval delta{0.0};
    std::optional<AffineLikeElement> minus;
    std::optional<AffineLikeElement> plus;
};

// delta(Q0, P1): horizontal offset between the right edge of P1 and the tip of the
// image parabola of Q0 (the tip of the line of Q0 nearest the tip of L_u), over the
// whole parameter range. Needs axis-aligned affine pieces.
Interval parabolic_delta(const AffineLikeElement& f0, const FoldingModel& g, const AffineLikeElement& f1);

// NotPossible (possible == false) when delta is not certified positive. Throws
// CrossingViolation when a preimage component leaves the tongue.
ParabolicResult parabolic_compose(const AffineLikeElement& f0, const FoldingModel& g, const AffineLikeElement& f1,
                                  const ConeParams& params);

// delta >= max(|Q0|^(1-eta), |P1|^(1-eta), |I|) with the certified lower end of delta.
bool transversality_ok(const Interval& delta, double q0_width, double p1_width, double interval_length, double eta);
bool transversality_ok(const AffineLikeElement& f0, const FoldingModel& g, const AffineLikeElement& f1,
                       double interval_length, double eta);

// (d_s + d_u)^2 + max^2 < (d_s + d_u) + max, evaluated exactly.
bool py_condition(const Rational& ds, const Rational& du);
bool py_condition(double ds, double du);

// Swap the roles of past and future: A^T(a, b) = B(b, a), B^T(a, b) = A(b, a).
AffineLikeElement transpose(const AffineLikeElement& e);

std::string word_key(const std::vector<std::string>& word);
nlohmann::ordered_json element_to_json(const AffineLikeElement& e);

} // namespace fdyn
