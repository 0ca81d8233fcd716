#pragma once

#include "fdyn/interval.hpp"
#include "fdyn/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fdyn {

// psi(x) = slope * x + offset on the branch domain.
struct AffineMap {
    Rational slope;
    Rational offset;
};

// Named analytic expanding map. The only supported name is "poly": psi(x) = sum params[i] x^i.
// deriv_range is the user-supplied certified range of psi' over the domain; it is checked on load.
struct AnalyticMap {
    std::string name;
    std::vector<Rational> params;
    Interval deriv_range;
};

using BranchMap = std::variant<AffineMap, AnalyticMap>;

struct BranchSpec {
    std::string label;
    Rational lo;
    Rational hi;
    BranchMap map;
};

using Word = std::vector<std::uint16_t>;

// A regular Cantor set K = intersection of psi^{-n}(hull) for an expanding Markov map psi.
// Built only through make_cantor_system, which enforces the invariants below:
//  - branch domains are pairwise disjoint, sorted, and span the hull;
//  - psi maps each domain onto the hull of its allowed successors;
//  - |psi'| > 1 on every branch and the transition relation is mixing.
class CantorSystem {
public:
    const std::vector<BranchSpec>& branches() const { return branches_; }
    std::size_t size() const { return branches_.size(); }
    const Rational& hull_lo() const { return hull_lo_; }
    const Rational& hull_hi() const { return hull_hi_; }
    Rational hull_length() const { return hull_hi_ - hull_lo_; }
    bool allowed(std::size_t from, std::size_t to) const { return markov_[from * size() + to] != 0; }
    const std::vector<std::size_t>& successors(std::size_t a) const { return successors_[a]; }
    double expansion_min() const { return expansion_min_; }
    double distortion_bound() const { return distortion_bound_; }
    bool is_affine() const { return affine_; }
    bool is_full_shift() const;
    bool is_mixing() const { return mixing_; }
    std::size_t index_of(const std::string& label) const;

    // Certified enclosure of psi_a and of the inverse branch on a point of the image.
    Interval image(std::size_t a, const Interval& x) const;
    Interval derivative(std::size_t a, const Interval& x) const;
    Interval inverse(std::size_t a, const Interval& y) const;

    friend CantorSystem make_cantor_system(Rational, Rational, std::vector<BranchSpec>,
                                           const std::vector<std::pair<std::string, std::string>>&,
                                           bool require_mixing);

private:
    Rational hull_lo_;
    Rational hull_hi_;
    std::vector<BranchSpec> branches_;
    std::vector<std::uint8_t> markov_;
    std::vector<std::vector<std::size_t>> successors_;
    double expansion_min_ = 0.0;
    double distortion_bound_ = 0.0;
    bool affine_ = true;
    bool mixing_ = false;
};

// Throws ValidationError naming the violated invariant. Systems that are not
// mixing are rejected unless require_mixing is false (unions of disjoint systems).
CantorSystem make_cantor_system(Rational hull_lo, Rational hull_hi, std::vector<BranchSpec> branches,
                                const std::vector<std::pair<std::string, std::string>>& markov,
                                bool require_mixing = true);

// Full-shift affine system from branch domains; each branch maps its domain onto the hull.
CantorSystem affine_full_shift(const std::vector<std::pair<Rational, Rational>>& domains,
                               const std::vector<std::string>& labels = {});

// x -> scale * x + shift applied to the whole construction (scale != 0).
CantorSystem transform(const CantorSystem& k, const Rational& scale, const Rational& shift);

// Same branches with a smaller transition relation.
CantorSystem restrict_markov(const CantorSystem& k,
                             const std::vector<std::pair<std::string, std::string>>& markov,
                             bool require_mixing = true);

// Disjoint union of two systems with disjoint hulls; the result is not mixing.
CantorSystem disjoint_union(const CantorSystem& a, const CantorSystem& b);

std::vector<std::pair<std::string, std::string>> markov_pairs(const CantorSystem& k);

struct Cylinder {
    Word word;
    Interval left;
    Interval right;
    // Exact endpoints and inverse-branch composition (x -> slope*x + offset) for affine systems.
    std::optional<std::pair<Rational, Rational>> exact;
    std::optional<std::pair<Rational, Rational>> map;

    std::size_t depth() const { return word.size(); }
    Interval length() const { return right - left; }
};

struct Gap {
    Interval left;
    Interval right;
    std::optional<std::pair<Rational, Rational>> exact;
    std::size_t generation = 0;
    bool bounded = true;

    Interval length() const { return right - left; }
};

struct GapSet {
    std::vector<Gap> bounded;      // sorted by position
    Gap below;                     // (-inf, hull_lo)
    Gap above;                     // (hull_hi, +inf)
};

// Depth-n cylinders sorted left to right. Affine systems are computed exactly;
// nonlinear ones with outward-rounded intervals. Throws ResolutionError when
// neighbouring cylinders cannot be separated or the count exceeds max_cylinders.
std::vector<Cylinder> refine(const CantorSystem& k, std::size_t depth,
                             std::size_t max_cylinders = std::size_t{1} << 22);

// Children of a cylinder (the cylinders of word + j), in left to right order.
std::vector<Cylinder> children(const CantorSystem& k, const Cylinder& c);

GapSet gaps(const CantorSystem& k, std::size_t depth);

// Enclosures of the depth-n cylinders only, computed in interval arithmetic.
std::vector<Interval> cover(const CantorSystem& k, std::size_t depth,
                            std::size_t max_cylinders = std::size_t{1} << 24);

enum class Membership { InsideAtDepth, Outside, Undetermined };

Membership membership(const CantorSystem& k, const Rational& x, std::size_t depth);
Membership membership(const CantorSystem& k, double x, std::size_t depth);

const char* to_string(Membership m);

// Lightweight interval-valued cylinder for tree descents (difference covers, oracles).
struct CylinderNode {
    Interval left;
    Interval right;
    Interval slope;     // affine systems: composed inverse branch x -> slope*x + offset
    Interval offset;
    Word word;          // nonlinear systems replay the word
    std::uint16_t last = 0;
};

std::vector<CylinderNode> root_nodes(const CantorSystem& k);
std::vector<CylinderNode> child_nodes(const CantorSystem& k, const CylinderNode& n);
// All depth-n nodes (n >= 1) in left to right order.
std::vector<CylinderNode> nodes_at_depth(const CantorSystem& k, std::size_t depth,
                                         std::size_t max_cylinders = std::size_t{1} << 24);

// Interval enclosure of an exact rational.
Interval enclose(const Rational& q);

} // namespace fdyn
