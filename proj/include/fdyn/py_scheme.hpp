#pragma once

#include "fdyn/affine_like.hpp"
#include "fdyn/models.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fdyn {

struct PYParams {
    Rational eps0{1, 1000};
    double eta = 0.05;
    double tau = 0.2;
    double beta = 1.5;

    // beta (1 - eta) / (1 + tau)
    double beta_tilde() const;
    // 0 < eps0 < eta < tau < 1 and beta_tilde > 1.
    void validate() const;
};

enum class IntervalStatus { Candidate, Good, Excluded };
const char* to_string(IntervalStatus s);

struct ParameterInterval {
    Rational lo;
    Rational hi;
    int generation = 0;
    IntervalStatus status = IntervalStatus::Candidate;

    Rational length() const { return hi - lo; }
    Interval enclosure() const { return Interval(to_double_down(lo), to_double_up(hi)); }
};

struct Catalog {
    ParameterInterval interval;
    int n_max = 0;
    double w_min = 0.0;
    std::vector<AffineLikeElement> elements; // sorted by (n, word)
    std::size_t parabolic = 0;                // elements that pass the fold once

    // Index by word key, or -1.
    long find(const std::string& key) const;

private:
    friend Catalog build_catalog(const Horseshoe&, const ParameterInterval&, const PYParams&, int, double, std::size_t);
    std::map<std::string, std::size_t> index_;
};

// Raised when the element cap is hit; carries the catalog built so far.
class CatalogOverflow : public BudgetError {
public:
    CatalogOverflow(const std::string& what, Catalog partial) : BudgetError(what), partial_(std::move(partial)) {}
    const Catalog& partial() const { return partial_; }

private:
    Catalog partial_;
};

// Saturation from the base transitions: affine words by simple composition, then
// parabolic compositions of stored pairs that pass transversality_ok over the whole
// interval, then simple compositions of those with base transitions. Elements are
// kept while n <= n_max and max(|P|, |Q|) >= w_min.
Catalog build_catalog(const Horseshoe& family, const ParameterInterval& I, const PYParams& params, int n_max,
                      double w_min, std::size_t max_elements = 200000);

// Lower bound of the distance from the strip to the tongue tip, minimised over t in I.
double tip_distance(const VerticalStrip& P, const ParameterInterval& I, const Horseshoe& family);
double tip_distance(const HorizontalStrip& Q, const ParameterInterval& I, const Horseshoe& family);

// Some t in I puts the tongue tip closer than width^(1 - eta). Strips outside the
// tongue rectangles are never critical.
bool is_critical(const VerticalStrip& P, double width, const ParameterInterval& I, const Horseshoe& family,
                 double eta);
bool is_critical(const HorizontalStrip& Q, double width, const ParameterInterval& I, const Horseshoe& family,
                 double eta);
bool is_bicritical(const AffineLikeElement& e, const ParameterInterval& I, const Horseshoe& family, double eta);

// No split of the word into two catalog elements.
bool is_prime(const AffineLikeElement& e, const Catalog& catalog);

struct RegularityResult {
    bool good = true;
    std::optional<AffineLikeElement> witness; // widest bicritical element with a width >= |I|^beta
    std::size_t bicritical = 0;
};

RegularityResult strong_regularity_test(const Catalog& catalog, const ParameterInterval& I, double beta,
                                        const Horseshoe& family, double eta);

struct ExclusionNode {
    ParameterInterval interval;
    int parent = -1;
    std::optional<AffineLikeElement> witness;
    std::size_t catalog_size = 0;
    std::size_t parabolic = 0;
    std::size_t bicritical = 0;
    int n_max = 0;
    double w_min = 0.0;
};

struct ExclusionResult {
    std::vector<ExclusionNode> nodes; // breadth first, children in left to right order
    Rational surviving;
    Rational excluded;
    int generations = 0;
};

struct ExclusionOptions {
    int n_max = 0; // 0: derived from w_min and the widest base transition
    std::size_t max_elements = 200000;
    unsigned threads = 1;
};

// floor(eps_k^-tau) with eps_k = eps0^((1+tau)^k).
std::size_t children_count(const PYParams& params, int k);

ExclusionResult run_exclusion(const Horseshoe& family, const PYParams& params, int generations,
                              const ExclusionOptions& opt = {});

struct ChainWidths {
    std::vector<double> P;
    std::vector<double> Q;
};

// max(|P_{j+1}|, |Q_{j+1}|) <= C |Q_j|^beta_tilde for j = 1..k-1.
bool lemma24_check(const ChainWidths& w, const PYParams& params, double C);
// Smallest C for which lemma24_check holds.
double lemma24_constant(const ChainWidths& w, const PYParams& params);

class CompatibilityViolation : public ValidationError {
public:
    CompatibilityViolation(const std::string& what, std::size_t index) : ValidationError(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

struct CoveringBound {
    double bound = 0.0;
    double eps0_scale = 0.0;
    std::vector<double> eps; // eps_0..eps_k
    double n_k = 0.0;
};

CoveringBound covering_bound(const ChainWidths& w, double d, double eta);

struct DimensionBound {
    bool feasible = false;
    double d = 0.0;
    double d_minus = 0.0;
    double from_floor = 22.0 / 15.0;
    double from_dstar = 0.0;
    double from_beta = 0.0;
    std::string reason;
};

DimensionBound exceptional_dimension_bound(double ds, double du, const PYParams& params);

struct Chain {
    std::vector<std::size_t> elements; // catalog indices
    ChainWidths widths;
};

struct ChainEnumeration {
    std::vector<Chain> chains;
    double fitted_C = 0.0;
    // (first, last) element pair -> number of chains and |Q_k|^-eta.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, double>> endpoint_counts;
};

// Gap left between the P-strips of an element's children at the tongue tip height.
std::optional<Interval> core_gap(const AffineLikeElement& e, const Horseshoe& family);
// The fold image of Q (tips t - b q, t in I) reaches past the left edge of the core gap of next.
bool core_link(const AffineLikeElement& prev, const AffineLikeElement& next, const ParameterInterval& I,
               const Horseshoe& family);

// Chains e_0 -> ... -> e_k of catalog elements from the fold target rectangle to the
// fold source rectangle whose successive members are joined by core_link.
ChainEnumeration enumerate_admissible_chains(const Catalog& catalog, const Horseshoe& family, const PYParams& params,
                                             int k, std::size_t budget);

struct CriticalSums {
    std::vector<double> partial; // partial[n - 1]: sum over critical Q with word length <= n
    double last_increment = 0.0;
};

CriticalSums critical_sum(const Catalog& catalog, double e, const Horseshoe& family, double eta);

} // namespace fdyn
