#include "fdyn/models.hpp"
#include "fdyn/parallel.hpp"

#include <cmath>

namespace fdyn {

namespace {

template <class T>
struct Vec2 {
    T x, y;
};

template <class T>
struct Mat2 {
    T a, b, c, d;
};

template <class T>
Mat2<T> mul(const Mat2<T>& m, const Mat2<T>& n)
{
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

template <class T>
Vec2<T> step(const PlaneMap& f, double mu, const Vec2<T>& z)
{
    if (f.name == "limit")
        return {z.y, z.y * z.y};
    return {z.y, z.y * z.y - T(mu) + T(f.b) * z.x};
}

template <class T>
Mat2<T> jac(const PlaneMap& f, const Vec2<T>& z)
{
    return {T(0.0), T(1.0), f.name == "limit" ? T(0.0) : T(f.b), T(2.0) * z.y};
}

// Value and Jacobian of the p-th iterate.
template <class T>
std::pair<Vec2<T>, Mat2<T>> iterate(const PlaneMap& f, double mu, Vec2<T> z, int p)
{
    Mat2<T> m{T(1.0), T(0.0), T(0.0), T(1.0)};
    for (int i = 0; i < p; ++i) {
        m = mul(jac(f, z), m);
        z = step(f, mu, z);
    }
    return {z, m};
}

double sq(double x)
{
    return x * x;
}

// Krawczyk test for F(z) = f^p(z) - z on the box X around m.
bool krawczyk(const PlaneMap& f, double mu, const Vec2<double>& m, double r, int p)
{
    const Vec2<Interval> X{Interval(m.x - r, m.x + r), Interval(m.y - r, m.y + r)};
    const auto jm = iterate<double>(f, mu, m, p).second;
    const double a = jm.a - 1.0, b = jm.b, c = jm.c, d = jm.d - 1.0;
    const double det = a * d - b * c;
    if (std::fabs(det) < 1e-12)
        return false;
    const Mat2<Interval> Y{Interval(d / det), Interval(-b / det), Interval(-c / det), Interval(a / det)};
    const auto Fm = iterate<Interval>(f, mu, {Interval(m.x), Interval(m.y)}, p).first;
    const Vec2<Interval> F{Fm.x - Interval(m.x), Fm.y - Interval(m.y)};
    const auto JX = iterate<Interval>(f, mu, X, p).second;
    const Mat2<Interval> J{JX.a - Interval(1.0), JX.b, JX.c, JX.d - Interval(1.0)};
    const Mat2<Interval> YJ = mul(Y, J);
    const Mat2<Interval> R{Interval(1.0) - YJ.a, -YJ.b, -YJ.c, Interval(1.0) - YJ.d};
    const Interval dx = X.x - Interval(m.x);
    const Interval dy = X.y - Interval(m.y);
    const Interval kx = Interval(m.x) - (Y.a * F.x + Y.b * F.y) + R.a * dx + R.b * dy;
    const Interval ky = Interval(m.y) - (Y.c * F.x + Y.d * F.y) + R.c * dx + R.d * dy;
    return X.x.interior_contains(kx) && X.y.interior_contains(ky);
}

bool in_box(const Box& b, double x, double y)
{
    return b.x0 <= x && x <= b.x1 && b.y0 <= y && y <= b.y1;
}

std::optional<SinkResult> from_seed(const PlaneMap& f, double mu, const Box& box, int max_period, int iters,
                                    Vec2<double> z)
{
    for (int i = 0; i < iters; ++i) {
        z = step(f, mu, z);
        if (!std::isfinite(z.x) || !std::isfinite(z.y) || std::fabs(z.x) + std::fabs(z.y) > 1e6)
            return std::nullopt;
    }
    for (int p = 1; p <= max_period; ++p) {
        const auto zp = iterate<double>(f, mu, z, p).first;
        if (std::sqrt(sq(zp.x - z.x) + sq(zp.y - z.y)) > 1e-9 * (1.0 + std::fabs(z.x) + std::fabs(z.y)))
            continue;
        SinkResult out;
        out.period = p;
        bool inside = false;
        Vec2<double> q = z;
        for (int i = 0; i < p; ++i) {
            out.orbit.push_back({q.x, q.y});
            inside = inside || in_box(box, q.x, q.y);
            q = step(f, mu, q);
        }
        if (!inside)
            return std::nullopt;
        const double r = 1e-7 * (1.0 + std::fabs(z.x) + std::fabs(z.y));
        if (!krawczyk(f, mu, z, r, p))
            return std::nullopt;
        const Vec2<Interval> X{Interval(z.x - r, z.x + r), Interval(z.y - r, z.y + r)};
        const auto M = iterate<Interval>(f, mu, X, p).second;
        out.det = M.a * M.d - M.b * M.c;
        out.trace = M.a + M.d;
        // Both eigenvalues of a real 2x2 matrix lie in the open unit disc iff
        // |det| < 1 and |trace| < 1 + det.
        const bool stable = out.det.hi() < 1.0 && out.det.lo() > -1.0 &&
                            abs(out.trace).hi() < (Interval(1.0) + out.det).lo();
        if (!stable)
            return std::nullopt;
        return out;
    }
    return std::nullopt;
}

} // namespace

std::optional<SinkResult> detect_sink(const PlaneMap& map, double mu, const Box& box, int max_period, int iters,
                                      int seeds, unsigned threads)
{
    if (map.name != "limit" && map.name != "toy_return")
        throw ValidationError("unknown map '" + map.name + "' (expected limit or toy_return)");
    if (max_period < 1 || iters < 0 || seeds < 1 || !(box.x0 < box.x1) || !(box.y0 < box.y1))
        throw ValidationError("sink search needs max_period >= 1, iters >= 0, seeds >= 1 and a nonempty box");
    const auto n = static_cast<std::size_t>(seeds) * static_cast<std::size_t>(seeds);
    std::vector<std::optional<SinkResult>> found(n);
    parallel_for(n, threads, [&](std::size_t k) {
        const double i = static_cast<double>(k / static_cast<std::size_t>(seeds)) + 0.5;
        const double j = static_cast<double>(k % static_cast<std::size_t>(seeds)) + 0.5;
        const Vec2<double> z{box.x0 + (box.x1 - box.x0) * i / seeds, box.y0 + (box.y1 - box.y0) * j / seeds};
        found[k] = from_seed(map, mu, box, max_period, iters, z);
    });
    for (auto& f : found)
        if (f)
            return f;
    return std::nullopt;
}

} // namespace fdyn
