#pragma once

#include "fdyn/cantor.hpp"

#include <optional>
#include <vector>

namespace fdyn {

struct ThicknessBracket {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t depth_used = 0;
};

// Certified bracket for the thickness. The upper end is the smallest bridge/gap
// ratio seen among gaps of generation <= depth. The lower end is a bound valid for
// every gap: each gap is the image of a first-level gap inside the hull or inside
// the image of a branch, and bridges there are cut short wherever an unresolved
// cylinder could still hide a large gap. Nonlinear systems lose a distortion factor.
ThicknessBracket thickness(const CantorSystem& k, std::size_t depth);

// Hulls intersect and neither contains the other.
bool linked(const CantorSystem& k, const CantorSystem& kp);

enum class GapLemmaOutcome { KPrimeInGapOfK, KInGapOfKPrime, Intersect, InconclusiveThin };
const char* to_string(GapLemmaOutcome o);

GapLemmaOutcome gap_lemma_classify(const CantorSystem& k, const CantorSystem& kp, std::size_t depth);

struct DimensionBracket {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t depth_used = 0;
    double tolerance = 0.0;
};

struct DimensionOptions {
    // Accept systems whose transition relation is not mixing (disjoint unions);
    // the dimension is then the maximum over the irreducible classes.
    bool allow_reducible = false;
    std::size_t max_depth = 22;
};

DimensionBracket hausdorff_dimension(const CantorSystem& k, double tol, const DimensionOptions& opt = {});

// Sum over depth-n cylinders of diam^alpha, as a certified enclosure.
Interval hausdorff_measure_estimate(const CantorSystem& k, double alpha, std::size_t depth);

struct DifferenceResult {
    std::vector<Interval> cover; // merged, sorted, pairwise disjoint
    double measure = 0.0;        // upper bound for the total length of the cover
    bool contains_interval = false;
};

// Outer cover of K - lambda K' from pairwise differences of depth-n cylinders.
// contains_interval is reported only when the merged covers at depths n and n+1
// are both a single interval.
DifferenceResult arithmetic_difference(const CantorSystem& k, const CantorSystem& kp, double lambda,
                                       std::size_t depth, unsigned threads = 1);

// Merged cover at one depth without the connectedness check.
std::vector<Interval> difference_cover(const CantorSystem& k, const CantorSystem& kp, double lambda,
                                       std::size_t depth);

struct MarstrandRecord {
    double lambda = 0.0;
    std::size_t depth = 0;
    double measure_lower = 0.0;
    double measure_upper = 0.0;
    double measure_lower_prev = 0.0; // same quantity at depth - 1
};

struct MarstrandScan {
    std::vector<MarstrandRecord> records;
    double floor = 0.1;
    DimensionBracket dim_k;
    DimensionBracket dim_kp;
    bool fat = false; // certified HD(K) + HD(K') > 1
    // Fraction of grid points whose measure_lower exceeds the floor at both of the
    // last two depths. Only reported for certified fat pairs.
    std::optional<double> fraction_above_floor;
};

// lambda_j = 2^((j - 10) / 10), j = 0..20.
std::vector<double> default_lambda_grid();

// Hit-cell count of the grid of mesh eps (the smallest depth-n cylinder length of
// either set) times eps. A cell is hit when a point x - lambda y with x, y
// cylinder endpoints (points of the sets) is certified to lie inside it.
double difference_measure_lower(const CantorSystem& k, const CantorSystem& kp, double lambda, std::size_t depth);

MarstrandScan marstrand_scan(const CantorSystem& k, const CantorSystem& kp, const std::vector<double>& lambdas,
                             std::size_t depth, unsigned threads = 1, double floor = 0.1);

// Certified decision of dist(K, K' + s) < bound by a descent over cylinder pairs.
// Cylinder endpoints belong to the sets, which gives upper bounds for the distance.
bool distance_below(const CantorSystem& k, const CantorSystem& kp, double s, double bound,
                    std::size_t max_depth = 40, std::size_t budget = 1u << 20);

// Fraction of s_i = i t / m (i = 1..m) where the c s-neighbourhoods of K and
// K' + s are closer than 2 c s, i.e. dist(K, K' + s) < 4 c s.
double tangency_parameter_density(const CantorSystem& k, const CantorSystem& kp, double c, double t,
                                  std::size_t samples, unsigned threads = 1);

} // namespace fdyn
