#include "fdyn/errors.hpp"
#include "fdyn/fractal.hpp"

#include <cmath>
#include <limits>

namespace fdyn {

namespace {

// A real number known either exactly or through an enclosure.
struct Num {
    Interval iv;
    std::optional<Rational> q;
};

Num left_of(const Cylinder& c)
{
    return c.exact ? Num{c.left, c.exact->first} : Num{c.left, std::nullopt};
}

Num right_of(const Cylinder& c)
{
    return c.exact ? Num{c.right, c.exact->second} : Num{c.right, std::nullopt};
}

Num minus(const Num& a, const Num& b)
{
    if (a.q && b.q) {
        Rational d = *a.q - *b.q;
        return {enclose(d), d};
    }
    return {a.iv - b.iv, std::nullopt};
}

Num scale(const Num& a, double f)
{
    return {a.iv * Interval(f), std::nullopt};
}

bool certainly_ge(const Num& a, const Num& b)
{
    if (a.q && b.q)
        return *a.q >= *b.q;
    return a.iv.lo() >= b.iv.hi();
}

bool possibly_ge(const Num& a, const Num& b)
{
    if (a.q && b.q)
        return *a.q >= *b.q;
    return a.iv.hi() >= b.iv.lo();
}

// Enclosure of a / b for positive b.
Interval ratio(const Num& a, const Num& b)
{
    if (a.q && b.q) {
        Rational r = *a.q / *b.q;
        return Interval(to_double_down(r), to_double_up(r));
    }
    if (b.iv.lo() <= 0.0)
        return Interval(0.0, std::numeric_limits<double>::infinity());
    return Interval(std::max(0.0, a.iv.lo()), std::max(0.0, a.iv.hi())) / b.iv;
}

Num gap_length(const std::vector<Cylinder>& cyl, std::size_t i)
{
    return minus(left_of(cyl[i + 1]), right_of(cyl[i]));
}

Num cyl_length(const Cylinder& c)
{
    return minus(right_of(c), left_of(c));
}

double distortion_factor(const CantorSystem& k)
{
    if (k.is_affine())
        return 1.0;
    const double e = k.expansion_min();
    const double h = to_double_up(k.hull_length());
    return Interval(std::exp(k.distortion_bound() * h * e / (e - 1.0))).hi() * (1.0 + 1e-12);
}

double upper_bound(const std::vector<Cylinder>& cyl)
{
    const std::size_t ng = cyl.size() - 1;
    std::vector<Num> len(ng);
    for (std::size_t i = 0; i < ng; ++i)
        len[i] = gap_length(cyl, i);
    const Num hull_lo = left_of(cyl.front());
    const Num hull_hi = right_of(cyl.back());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ng; ++i) {
        // The bridge runs until a known gap that is certainly at least as long.
        Num stop_l = hull_lo;
        for (std::size_t j = i; j-- > 0;)
            if (certainly_ge(len[j], len[i])) {
                stop_l = left_of(cyl[j + 1]);
                break;
            }
        Num stop_r = hull_hi;
        for (std::size_t j = i + 1; j < ng; ++j)
            if (certainly_ge(len[j], len[i])) {
                stop_r = right_of(cyl[j]);
                break;
            }
        Interval rl = ratio(minus(right_of(cyl[i]), stop_l), len[i]);
        Interval rr = ratio(minus(stop_r, left_of(cyl[i + 1])), len[i]);
        best = std::min({best, rl.hi(), rr.hi()});
    }
    return best;
}

// Lower bound from first-level gaps of K restricted to the cylinders [first, last].
double lower_bound_in(const std::vector<Cylinder>& cyl, std::size_t first, std::size_t last, double kappa)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i < last; ++i) {
        if (cyl[i].word.front() == cyl[i + 1].word.front())
            continue;
        const Num u = gap_length(cyl, i);
        const Num thr = kappa == 1.0 ? u : scale(u, 1.0 / kappa);
        // Walk away from the gap; stop before any cylinder or gap that might be as long as thr.
        Num stop_l = right_of(cyl[i]);
        for (std::size_t m = i + 1; m-- > first;) {
            if (possibly_ge(cyl_length(cyl[m]), thr))
                break;
            stop_l = left_of(cyl[m]);
            if (m > first && possibly_ge(gap_length(cyl, m - 1), thr))
                break;
        }
        Num stop_r = left_of(cyl[i + 1]);
        for (std::size_t m = i + 1; m <= last; ++m) {
            if (possibly_ge(cyl_length(cyl[m]), thr))
                break;
            stop_r = right_of(cyl[m]);
            if (m < last && possibly_ge(gap_length(cyl, m), thr))
                break;
        }
        Interval rl = ratio(minus(right_of(cyl[i]), stop_l), u);
        Interval rr = ratio(minus(stop_r, left_of(cyl[i + 1])), u);
        best = std::min({best, rl.lo(), rr.lo()});
    }
    return best;
}

} // namespace

ThicknessBracket thickness(const CantorSystem& k, std::size_t depth)
{
    if (depth < 1)
        throw ValidationError("thickness needs depth >= 1");
    const auto cyl = refine(k, depth);
    ThicknessBracket out;
    out.depth_used = depth;
    if (cyl.size() < 2) {
        out.lower = out.upper = std::numeric_limits<double>::infinity();
        return out;
    }
    out.upper = upper_bound(cyl);

    const double kappa = distortion_factor(k);
    // Every gap is the image of a first-level gap inside the hull or inside the
    // image of a branch; those images are contiguous runs of cylinders.
    double lower = lower_bound_in(cyl, 0, cyl.size() - 1, kappa);
    for (std::size_t a = 0; a < k.size(); ++a) {
        const auto& succ = k.successors(a);
        if (succ.size() == k.size())
            continue;
        std::size_t first = cyl.size();
        std::size_t last = 0;
        for (std::size_t i = 0; i < cyl.size(); ++i) {
            const std::size_t f = cyl[i].word.front();
            if (f >= succ.front() && f <= succ.back()) {
                first = std::min(first, i);
                last = std::max(last, i);
            }
        }
        if (first < last)
            lower = std::min(lower, lower_bound_in(cyl, first, last, kappa));
    }
    out.lower = kappa == 1.0 ? lower : (Interval(lower) / Interval(kappa)).lo();
    return out;
}

bool linked(const CantorSystem& k, const CantorSystem& kp)
{
    const bool meet = k.hull_lo() <= kp.hull_hi() && kp.hull_lo() <= k.hull_hi();
    const bool k_in_kp = kp.hull_lo() <= k.hull_lo() && k.hull_hi() <= kp.hull_hi();
    const bool kp_in_k = k.hull_lo() <= kp.hull_lo() && kp.hull_hi() <= k.hull_hi();
    return meet && !k_in_kp && !kp_in_k;
}

const char* to_string(GapLemmaOutcome o)
{
    switch (o) {
    case GapLemmaOutcome::KPrimeInGapOfK:
        return "KPrimeInGapOfK";
    case GapLemmaOutcome::KInGapOfKPrime:
        return "KInGapOfKPrime";
    case GapLemmaOutcome::Intersect:
        return "Intersect";
    case GapLemmaOutcome::InconclusiveThin:
        return "InconclusiveThin";
    }
    return "?";
}

namespace {

// [lo, hi] lies in an unbounded gap of K or in a gap of generation <= depth.
bool hull_in_gap(const CantorSystem& k, const Rational& lo, const Rational& hi, std::size_t depth)
{
    if (hi < k.hull_lo() || lo > k.hull_hi())
        return true;
    const Interval l = enclose(lo);
    const Interval h = enclose(hi);
    for (const auto& g : gaps(k, depth).bounded) {
        if (g.exact) {
            if (g.exact->first < lo && hi < g.exact->second)
                return true;
        } else if (g.left.hi() < l.lo() && h.hi() < g.right.lo()) {
            return true;
        }
    }
    return false;
}

// [lo, hi] might lie inside a single depth-n cylinder of K.
bool hull_maybe_in_cylinder(const CantorSystem& k, const Rational& lo, const Rational& hi, std::size_t depth)
{
    const Interval l = enclose(lo);
    const Interval h = enclose(hi);
    for (const auto& c : refine(k, depth)) {
        if (c.exact) {
            if (c.exact->first <= lo && hi <= c.exact->second)
                return true;
        } else if (c.left.lo() <= l.hi() && h.lo() <= c.right.hi()) {
            return true;
        }
    }
    return false;
}

} // namespace

GapLemmaOutcome gap_lemma_classify(const CantorSystem& k, const CantorSystem& kp, std::size_t depth)
{
    // The lower thickness bound holds for all gaps at any depth; deeper runs only
    // tighten the upper end, which is not used here.
    const std::size_t tdepth = std::min<std::size_t>(depth, 8);
    const auto tk = thickness(k, tdepth);
    const auto tkp = thickness(kp, tdepth);
    if (!((Interval(tk.lower) * Interval(tkp.lower)).lo() > 1.0))
        return GapLemmaOutcome::InconclusiveThin;
    if (linked(k, kp))
        return GapLemmaOutcome::Intersect;
    if (hull_in_gap(k, kp.hull_lo(), kp.hull_hi(), depth))
        return GapLemmaOutcome::KPrimeInGapOfK;
    if (hull_in_gap(kp, k.hull_lo(), k.hull_hi(), depth))
        return GapLemmaOutcome::KInGapOfKPrime;
    // Gaps deeper than `depth` sit inside depth-n cylinders; a hull that fits in no
    // such cylinder and in no known gap is in no gap at all.
    if (!hull_maybe_in_cylinder(k, kp.hull_lo(), kp.hull_hi(), depth) &&
        !hull_maybe_in_cylinder(kp, k.hull_lo(), k.hull_hi(), depth))
        return GapLemmaOutcome::Intersect;
    throw ResolutionError("gap lemma: depth " + std::to_string(depth) +
                          " does not decide whether one set lies in a gap of the other");
}

} // namespace fdyn
