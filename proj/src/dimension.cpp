#include "fdyn/errors.hpp"
#include "fdyn/fractal.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace fdyn {

namespace {

struct AffineData {
    std::vector<Interval> log_ratio;  // log of the contraction ratio 1/|slope|
    std::vector<Interval> log_length; // log of the domain length
    std::vector<std::vector<std::size_t>> succ;
};

AffineData affine_data(const CantorSystem& k, const std::vector<std::size_t>& keep)
{
    AffineData d;
    std::vector<long> pos(k.size(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i)
        pos[keep[i]] = static_cast<long>(i);
    for (std::size_t a : keep) {
        const auto& b = k.branches()[a];
        const auto& m = std::get<AffineMap>(b.map);
        Rational r = Rational(1) / abs(m.slope);
        d.log_ratio.push_back(log(Interval(to_double_down(r), to_double_up(r))));
        Rational len = b.hi - b.lo;
        d.log_length.push_back(log(Interval(to_double_down(len), to_double_up(len))));
        std::vector<std::size_t> s;
        for (std::size_t c : k.successors(a))
            if (pos[c] >= 0)
                s.push_back(static_cast<std::size_t>(pos[c]));
        d.succ.push_back(std::move(s));
    }
    return d;
}

// Collatz-Wielandt bounds for the spectral radius of T(s)_ab = [a -> b] r_b^s.
// The test vector is the Perron vector estimated by shifted power iteration.
std::pair<double, double> spectral_bounds(const AffineData& d, double s)
{
    const std::size_t n = d.succ.size();
    std::vector<Interval> w(n);
    std::vector<double> wd(n);
    for (std::size_t b = 0; b < n; ++b) {
        w[b] = exp(d.log_ratio[b] * Interval(s));
        wd[b] = w[b].mid();
    }
    std::vector<double> v(n, 1.0);
    std::vector<double> nv(n);
    for (int it = 0; it < 20000; ++it) {
        double norm = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            double acc = v[a];
            for (std::size_t b : d.succ[a])
                acc += wd[b] * v[b];
            nv[a] = acc;
            norm = std::max(norm, acc);
        }
        double change = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            nv[a] /= norm;
            change = std::max(change, std::fabs(nv[a] - v[a]));
        }
        v.swap(nv);
        if (change < 1e-16)
            break;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        Interval acc(0.0);
        for (std::size_t b : d.succ[a])
            acc += w[b] * Interval(v[b]);
        Interval r = acc / Interval(v[a]);
        lo = std::min(lo, r.lo());
        hi = std::max(hi, r.hi());
    }
    return {lo, hi};
}

DimensionBracket affine_dimension(const CantorSystem& k, const std::vector<std::size_t>& keep, double tol)
{
    const AffineData d = affine_data(k, keep);
    double lo = 0.0;
    double hi = 1.0;
    std::size_t steps = 0;
    while (hi - lo > 0.25 * tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        auto [rlo, rhi] = spectral_bounds(d, mid);
        ++steps;
        if (rlo > 1.0)
            lo = mid;
        else if (rhi < 1.0)
            hi = mid;
        else {
            // The root sits at the midpoint to working precision (exact dyadic
            // dimensions); bracket it from both sides instead.
            const double step = 0.125 * tol;
            if (spectral_bounds(d, mid - step).first > 1.0 && spectral_bounds(d, mid + step).second < 1.0) {
                lo = std::max(lo, mid - step);
                hi = std::min(hi, mid + step);
            }
            break;
        }
    }
    if (hi - lo > tol)
        throw ResolutionError("dimension bracket stalled at width " + std::to_string(hi - lo));
    return {lo, hi, steps, tol};
}

// Strongly connected classes that carry at least one cycle.
std::vector<std::vector<std::size_t>> recurrent_classes(const CantorSystem& k)
{
    const std::size_t n = k.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b : k.successors(a))
            reach[a][b] = 1;
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t a = 0; a < n; ++a)
            if (reach[a][m])
                for (std::size_t b = 0; b < n; ++b)
                    if (reach[m][b])
                        reach[a][b] = 1;
    std::vector<char> done(n, 0);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t a = 0; a < n; ++a) {
        if (done[a] || !reach[a][a])
            continue;
        std::vector<std::size_t> cls;
        for (std::size_t b = 0; b < n; ++b)
            if (reach[a][b] && reach[b][a]) {
                cls.push_back(b);
                done[b] = 1;
            }
        out.push_back(std::move(cls));
    }
    return out;
}

// Smallest s in [0, 1] (to within `eps`) where pred(s) becomes true; pred must be monotone.
double bisect(const std::function<bool(double)>& pred, bool want_first_true, double eps)
{
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > eps) {
        double mid = 0.5 * (lo + hi);
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return want_first_true ? hi : lo;
}

DimensionBracket nonlinear_dimension(const CantorSystem& k, double tol, std::size_t max_depth)
{
    if (!k.is_full_shift())
        throw ValidationError("dimension of nonlinear systems is supported for full shifts only");
    const double e = k.expansion_min();
    const Interval h = enclose(k.hull_length());
    const Interval kappa(std::exp(k.distortion_bound() * h.hi() * e / (e - 1.0)) * (1.0 + 1e-12));
    const Interval log_up = log(kappa / h);      // log of the sub-multiplicative constant base
    const Interval log_down = -log(kappa * h);   // log of the super-multiplicative constant base
    double best_lo = 0.0;
    double best_hi = 1.0;
    for (std::size_t m = 1; m <= max_depth; ++m) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < m; ++i)
            count *= k.size();
        if (count > (std::size_t{1} << 20))
            break;
        const auto cyl = refine(k, m);
        std::vector<Interval> log_out;
        std::vector<Interval> log_in;
        bool inner_ok = true;
        for (const auto& c : cyl) {
            log_out.push_back(log(Interval(round_up(c.right.hi() - c.left.lo()))));
            const double in = round_down(c.right.lo() - c.left.hi());
            if (in <= 0.0)
                inner_ok = false;
            else
                log_in.push_back(log(Interval(in)));
        }
        // (kappa/h)^s Z_out(s) < 1 certifies HD < s; (kappa h)^(-s) Z_in(s) > 1 certifies HD > s.
        auto upper_ok = [&](double s) {
            Interval z(0.0);
            for (const auto& l : log_out)
                z += exp((l + log_up) * Interval(s));
            return z.hi() < 1.0;
        };
        auto lower_ok = [&](double s) {
            Interval z(0.0);
            for (const auto& l : log_in)
                z += exp((l + log_down) * Interval(s));
            return z.lo() > 1.0;
        };
        if (upper_ok(1.0))
            best_hi = std::min(best_hi, bisect(upper_ok, true, 1e-12));
        if (inner_ok && lower_ok(0.0))
            best_lo = std::max(best_lo, bisect([&](double s) { return !lower_ok(s); }, false, 1e-12));
        if (best_hi - best_lo <= tol)
            return {best_lo, best_hi, m, tol};
    }
    throw ResolutionError("nonlinear dimension bracket [" + std::to_string(best_lo) + ", " +
                          std::to_string(best_hi) + "] wider than the tolerance at the largest depth");
}

} // namespace

DimensionBracket hausdorff_dimension(const CantorSystem& k, double tol, const DimensionOptions& opt)
{
    if (!(tol > 0.0))
        throw ValidationError("tolerance must be positive");
    if (!k.is_mixing() && !opt.allow_reducible)
        throw ValidationError("dimension needs a mixing transition relation");
    if (!k.is_affine())
        return nonlinear_dimension(k, tol, opt.max_depth);
    DimensionBracket best{0.0, 0.0, 0, tol};
    for (const auto& cls : recurrent_classes(k)) {
        auto b = affine_dimension(k, cls, tol);
        best.lower = std::max(best.lower, b.lower);
        best.upper = std::max(best.upper, b.upper);
        best.depth_used = std::max(best.depth_used, b.depth_used);
    }
    return best;
}

Interval hausdorff_measure_estimate(const CantorSystem& k, double alpha, std::size_t depth)
{
    if (!(alpha >= 0.0))
        throw ValidationError("alpha must be non-negative");
    const Interval a(alpha);
    if (depth == 0)
        return alpha == 0.0 ? Interval(1.0) : exp(log(enclose(k.hull_length())) * a);
    if (!k.is_affine()) {
        Interval z(0.0);
        for (const auto& c : refine(k, depth)) {
            const double lo = std::max(0.0, round_down(c.right.lo() - c.left.hi()));
            const double hi = round_up(c.right.hi() - c.left.lo());
            if (alpha == 0.0)
                z += Interval(1.0);
            else if (lo == 0.0)
                z += Interval(0.0, pow(Interval(hi), alpha).hi());
            else
                z += pow(Interval(lo, hi), alpha);
        }
        return z;
    }
    std::vector<std::size_t> all(k.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    const AffineData d = affine_data(k, all);
    const std::size_t n = k.size();
    // u(b): sum over admissible words of the current length ending in b of the product of ratios^alpha.
    std::vector<Interval> u(n, Interval(1.0));
    for (std::size_t step = 1; step < depth; ++step) {
        std::vector<Interval> next(n, Interval(0.0));
        for (std::size_t x = 0; x < n; ++x) {
            const Interval f = alpha == 0.0 ? Interval(1.0) : u[x] * exp(d.log_ratio[x] * a);
            for (std::size_t y : d.succ[x])
                next[y] += alpha == 0.0 ? u[x] : f;
        }
        u.swap(next);
    }
    Interval z(0.0);
    for (std::size_t b = 0; b < n; ++b)
        z += alpha == 0.0 ? u[b] : u[b] * exp(d.log_length[b] * a);
    return z;
}

} // namespace fdyn
