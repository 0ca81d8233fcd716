#include "fdyn/errors.hpp"
#include "fdyn/fractal.hpp"
#include "fdyn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdyn {

namespace {

std::vector<Interval> merge(std::vector<Interval> v)
{
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
        return a.lo() < b.lo() || (a.lo() == b.lo() && a.hi() < b.hi());
    });
    std::vector<Interval> out;
    for (const auto& x : v) {
        if (!out.empty() && x.lo() <= out.back().hi())
            out.back() = Interval(out.back().lo(), std::max(out.back().hi(), x.hi()));
        else
            out.push_back(x);
    }
    return out;
}

double total_length(const std::vector<Interval>& v)
{
    double sum = 0.0;
    for (const auto& x : v)
        sum = round_up(sum + round_up(x.hi() - x.lo()));
    return sum;
}

constexpr double kUnit = std::numeric_limits<double>::epsilon(); // 2^-52

// Guard for a double expression built from a few roundings of values bounded by m.
double guard(double m)
{
    return 8.0 * kUnit * m + std::numeric_limits<double>::denorm_min();
}

} // namespace

std::vector<Interval> difference_cover(const CantorSystem& k, const CantorSystem& kp, double lambda,
                                       std::size_t depth)
{
    if (depth < 1)
        throw ValidationError("difference cover needs depth >= 1");
    const auto a = cover(k, depth);
    const auto b = cover(kp, depth);
    const Interval lam(lambda);
    std::vector<Interval> all;
    all.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b)
            all.push_back(x - lam * y);
    return merge(std::move(all));
}

DifferenceResult arithmetic_difference(const CantorSystem& k, const CantorSystem& kp, double lambda,
                                       std::size_t depth, unsigned threads)
{
    std::vector<std::vector<Interval>> covers(2);
    parallel_for(2, threads, [&](std::size_t i) { covers[i] = difference_cover(k, kp, lambda, depth + i); });
    DifferenceResult out;
    out.cover = std::move(covers[0]);
    out.measure = total_length(out.cover);
    out.contains_interval = out.cover.size() == 1 && covers[1].size() == 1;
    return out;
}

std::vector<double> default_lambda_grid()
{
    std::vector<double> out;
    for (int j = 0; j <= 20; ++j)
        out.push_back(std::exp2((j - 10) / 10.0));
    return out;
}

double difference_measure_lower(const CantorSystem& k, const CantorSystem& kp, double lambda, std::size_t depth)
{
    if (depth < 1)
        throw ValidationError("measure estimate needs depth >= 1");
    const auto na = nodes_at_depth(k, depth);
    const auto nb = nodes_at_depth(kp, depth);
    double eps = std::numeric_limits<double>::infinity();
    for (const auto* v : {&na, &nb})
        for (const auto& c : *v)
            eps = std::min(eps, round_down(c.right.lo() - c.left.hi()));
    if (!(eps > 0.0))
        throw ResolutionError("cylinder lengths are not resolved at this depth");
    std::vector<Interval> xs;
    std::vector<Interval> ys;
    for (const auto& c : na) {
        xs.push_back(c.left);
        xs.push_back(c.right);
    }
    for (const auto& c : nb) {
        ys.push_back(c.left);
        ys.push_back(c.right);
    }
    const Interval span = (Interval(xs.front().lo(), xs.back().hi()) - Interval(lambda) * Interval(ys.front().lo(), ys.back().hi()));
    const double g0 = span.lo();
    const auto cells = static_cast<std::size_t>(std::ceil((span.hi() - g0) / eps)) + 2;
    std::vector<char> hit(cells, 0);
    const double lam = std::fabs(lambda);
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            // Enclosure of x - lambda y with a rounding guard.
            const double yl = lambda >= 0 ? y.hi() : y.lo();
            const double yh = lambda >= 0 ? y.lo() : y.hi();
            const double m = std::fabs(x.lo()) + std::fabs(x.hi()) + lam * (std::fabs(y.lo()) + std::fabs(y.hi()));
            const double plo = x.lo() - lambda * yl - guard(m);
            const double phi = x.hi() - lambda * yh + guard(m);
            const double t = (0.5 * (plo + phi) - g0) / eps;
            if (t < 0.0)
                continue;
            const auto i = static_cast<std::size_t>(t);
            if (i + 1 >= cells)
                continue;
            const double b0 = g0 + static_cast<double>(i) * eps;
            const double b1 = g0 + static_cast<double>(i + 1) * eps;
            const double gb = guard(std::fabs(g0) + static_cast<double>(i + 1) * eps);
            if (b0 + gb < plo && phi < b1 - gb)
                hit[i] = 1;
        }
    }
    std::size_t count = 0;
    for (char h : hit)
        count += h != 0;
    return static_cast<double>(count) * eps;
}

MarstrandScan marstrand_scan(const CantorSystem& k, const CantorSystem& kp, const std::vector<double>& lambdas,
                             std::size_t depth, unsigned threads, double floor)
{
    if (lambdas.empty())
        throw ValidationError("empty lambda grid");
    if (depth < 1)
        throw ValidationError("marstrand scan needs depth >= 1");
    MarstrandScan out;
    out.floor = floor;
    out.dim_k = hausdorff_dimension(k, 1e-6);
    out.dim_kp = hausdorff_dimension(kp, 1e-6);
    out.fat = (Interval(out.dim_k.lower) + Interval(out.dim_kp.lower)).lo() > 1.0;
    out.records.resize(lambdas.size());
    parallel_for(lambdas.size(), threads, [&](std::size_t i) {
        MarstrandRecord r;
        r.lambda = lambdas[i];
        r.depth = depth;
        r.measure_upper = total_length(difference_cover(k, kp, lambdas[i], depth));
        r.measure_lower = difference_measure_lower(k, kp, lambdas[i], depth);
        r.measure_lower_prev = depth >= 2 ? difference_measure_lower(k, kp, lambdas[i], depth - 1) : r.measure_lower;
        out.records[i] = r;
    });
    if (out.fat) {
        std::size_t good = 0;
        for (const auto& r : out.records)
            good += r.measure_lower > floor && r.measure_lower_prev > floor;
        out.fraction_above_floor = static_cast<double>(good) / static_cast<double>(out.records.size());
    }
    return out;
}

bool distance_below(const CantorSystem& k, const CantorSystem& kp, double s, double bound, std::size_t max_depth,
                    std::size_t budget)
{
    struct Pair {
        CylinderNode a;
        CylinderNode b;
        std::size_t depth;
    };
    const Interval sh(s);
    std::vector<Pair> stack;
    for (const auto& a : root_nodes(k))
        for (const auto& b : root_nodes(kp))
            stack.push_back({a, b, 1});
    std::reverse(stack.begin(), stack.end());
    std::size_t visited = 0;
    bool unresolved = false;
    while (!stack.empty()) {
        Pair p = std::move(stack.back());
        stack.pop_back();
        if (++visited > budget)
            throw ResolutionError("distance descent exceeded its pair budget");
        const Interval bl = p.b.left + sh;
        const Interval br = p.b.right + sh;
        // Endpoints are points of the sets: any endpoint distance bounds the set distance from above.
        double upper = std::numeric_limits<double>::infinity();
        for (const auto* x : {&p.a.left, &p.a.right})
            for (const auto* y : {&bl, &br})
                upper = std::min(upper, abs(*x - *y).hi());
        if (upper < bound)
            return true;
        const double lower = std::max({0.0, (bl - p.a.right).lo(), (p.a.left - br).lo()});
        if (lower >= bound)
            continue;
        if (p.depth >= max_depth) {
            unresolved = true;
            continue;
        }
        auto ca = child_nodes(k, p.a);
        auto cb = child_nodes(kp, p.b);
        for (std::size_t i = ca.size(); i-- > 0;)
            for (std::size_t j = cb.size(); j-- > 0;)
                stack.push_back({ca[i], cb[j], p.depth + 1});
    }
    if (unresolved)
        throw ResolutionError("distance comparison unresolved at depth " + std::to_string(max_depth));
    return false;
}

double tangency_parameter_density(const CantorSystem& k, const CantorSystem& kp, double c, double t,
                                  std::size_t samples, unsigned threads)
{
    if (!(c > 0.0) || !(t > 0.0) || samples < 1)
        throw ValidationError("tangency density needs c > 0, t > 0 and at least one sample");
    std::vector<char> near(samples, 0);
    parallel_for(samples, threads, [&](std::size_t i) {
        const double s = static_cast<double>(i + 1) * t / static_cast<double>(samples);
        near[i] = distance_below(k, kp, s, 4.0 * c * s) ? 1 : 0;
    });
    std::size_t count = 0;
    for (char x : near)
        count += x != 0;
    return static_cast<double>(count) / static_cast<double>(samples);
}

} // namespace fdyn
