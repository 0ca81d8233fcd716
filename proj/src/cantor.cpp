#include "fdyn/cantor.hpp"

#include "fdyn/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace fdyn {

namespace {

Rational eval_exact(const BranchMap& m, const Rational& x)
{
    if (const auto* a = std::get_if<AffineMap>(&m))
        return a->slope * x + a->offset;
    const auto& p = std::get<AnalyticMap>(m).params;
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

Interval poly_eval(const std::vector<Rational>& p, const Interval& x)
{
    Interval acc(0.0);
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * x + enclose(*it);
    return acc;
}

std::vector<Rational> poly_derivative(const std::vector<Rational>& p)
{
    std::vector<Rational> d;
    for (std::size_t i = 1; i < p.size(); ++i)
        d.push_back(p[i] * static_cast<long>(i));
    if (d.empty())
        d.push_back(0);
    return d;
}

std::string range_text(const Rational& a, const Rational& b)
{
    return "[" + to_string(a) + ", " + to_string(b) + "]";
}

bool primitive(const std::vector<std::uint8_t>& m, std::size_t n)
{
    // Wielandt: a primitive n x n matrix has a positive power of order at most (n-1)^2 + 1.
    std::vector<std::uint8_t> p = m;
    const std::size_t limit = (n - 1) * (n - 1) + 1;
    for (std::size_t k = 1; k <= limit; ++k) {
        if (std::all_of(p.begin(), p.end(), [](std::uint8_t v) { return v != 0; }))
            return true;
        std::vector<std::uint8_t> q(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (p[i * n + l])
                    for (std::size_t j = 0; j < n; ++j)
                        if (m[l * n + j])
                            q[i * n + j] = 1;
        p.swap(q);
    }
    return std::all_of(p.begin(), p.end(), [](std::uint8_t v) { return v != 0; });
}

// Certified bound on the preimage of y under a monotone polynomial on [lo, hi]:
// the largest point certainly left of it (want_lower) or the smallest certainly right of it.
// The preimage lies in the domain, so the domain ends are always valid fallbacks.
double inverse_bound(const std::vector<Rational>& p, double lo, double hi, double y, bool increasing,
                     bool want_lower)
{
    auto left_of = [&](double x) {
        Interval v = poly_eval(p, Interval(x));
        return increasing ? v.hi() <= y : v.lo() >= y;
    };
    auto right_of = [&](double x) {
        Interval v = poly_eval(p, Interval(x));
        return increasing ? v.lo() >= y : v.hi() <= y;
    };
    double a = lo;
    double b = hi;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        bool ok = want_lower ? left_of(m) : !right_of(m);
        if (ok)
            a = m;
        else
            b = m;
    }
    if (want_lower)
        return left_of(a) ? a : lo;
    return right_of(b) ? b : hi;
}

} // namespace

Interval enclose(const Rational& q)
{
    double d = to_double(q);
    if (rational_from_double(d) == q)
        return Interval(d);
    return {to_double_down(q), to_double_up(q)};
}

bool CantorSystem::is_full_shift() const
{
    return std::all_of(markov_.begin(), markov_.end(), [](std::uint8_t v) { return v != 0; });
}

std::size_t CantorSystem::index_of(const std::string& label) const
{
    for (std::size_t i = 0; i < branches_.size(); ++i)
        if (branches_[i].label == label)
            return i;
    throw ValidationError("unknown branch label '" + label + "'");
}

Interval CantorSystem::image(std::size_t a, const Interval& x) const
{
    const auto& m = branches_.at(a).map;
    if (const auto* am = std::get_if<AffineMap>(&m))
        return enclose(am->slope) * x + enclose(am->offset);
    return poly_eval(std::get<AnalyticMap>(m).params, x);
}

Interval CantorSystem::derivative(std::size_t a, const Interval& x) const
{
    const auto& m = branches_.at(a).map;
    if (const auto* am = std::get_if<AffineMap>(&m))
        return enclose(am->slope);
    return poly_eval(poly_derivative(std::get<AnalyticMap>(m).params), x);
}

Interval CantorSystem::inverse(std::size_t a, const Interval& y) const
{
    const auto& br = branches_.at(a);
    if (const auto* am = std::get_if<AffineMap>(&br.map))
        return (y - enclose(am->offset)) / enclose(am->slope);
    const auto& an = std::get<AnalyticMap>(br.map);
    const bool increasing = an.deriv_range.lo() > 0.0;
    const Interval dom(enclose(br.lo).lo(), enclose(br.hi).hi());
    // psi decreasing means the inverse swaps the endpoints.
    double x1 = inverse_bound(an.params, dom.lo(), dom.hi(), increasing ? y.lo() : y.hi(), increasing, true);
    double x2 = inverse_bound(an.params, dom.lo(), dom.hi(), increasing ? y.hi() : y.lo(), increasing, false);
    return {std::min(x1, x2), std::max(x1, x2)};
}

CantorSystem make_cantor_system(Rational hull_lo, Rational hull_hi, std::vector<BranchSpec> branches,
                                const std::vector<std::pair<std::string, std::string>>& markov,
                                bool require_mixing)
{
    if (branches.empty())
        throw ValidationError("a Cantor system needs at least one branch");
    if (!(hull_lo < hull_hi))
        throw ValidationError("hull " + range_text(hull_lo, hull_hi) + " is empty");
    std::sort(branches.begin(), branches.end(),
              [](const BranchSpec& a, const BranchSpec& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const auto& b = branches[i];
        if (!(b.lo < b.hi))
            throw ValidationError("branch '" + b.label + "' has empty domain " + range_text(b.lo, b.hi));
        for (std::size_t j = 0; j < i; ++j)
            if (branches[j].label == b.label)
                throw ValidationError("duplicate branch label '" + b.label + "'");
        if (i > 0 && !(branches[i - 1].hi < b.lo))
            throw ValidationError("branch domains '" + branches[i - 1].label + "' " +
                                  range_text(branches[i - 1].lo, branches[i - 1].hi) + " and '" + b.label +
                                  "' " + range_text(b.lo, b.hi) + " overlap");
    }
    if (branches.front().lo != hull_lo || branches.back().hi != hull_hi)
        throw ValidationError("hull " + range_text(hull_lo, hull_hi) +
                              " is not the convex hull of the branch domains " +
                              range_text(branches.front().lo, branches.back().hi));

    CantorSystem k;
    k.hull_lo_ = std::move(hull_lo);
    k.hull_hi_ = std::move(hull_hi);
    k.branches_ = std::move(branches);
    const std::size_t n = k.branches_.size();
    k.markov_.assign(n * n, 0);
    for (const auto& [from, to] : markov)
        k.markov_[k.index_of(from) * n + k.index_of(to)] = 1;
    k.successors_.assign(n, {});
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (k.markov_[a * n + b])
                k.successors_[a].push_back(b);

    k.expansion_min_ = std::numeric_limits<double>::infinity();
    k.distortion_bound_ = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const auto& b = k.branches_[a];
        if (k.successors_[a].empty())
            throw ValidationError("branch '" + b.label + "' has no allowed successor");
        if (const auto* am = std::get_if<AffineMap>(&b.map)) {
            if (abs(am->slope) <= 1)
                throw ValidationError("branch '" + b.label + "' is not expanding (slope " + to_string(am->slope) +
                                      ")");
            k.expansion_min_ = std::min(k.expansion_min_, to_double_down(abs(am->slope)));
        } else {
            k.affine_ = false;
            const auto& an = std::get<AnalyticMap>(b.map);
            if (an.name != "poly")
                throw ValidationError("branch '" + b.label + "': unsupported analytic map '" + an.name + "'");
            if (an.params.empty())
                throw ValidationError("branch '" + b.label + "': polynomial without coefficients");
            if (an.deriv_range.mig() <= 1.0)
                throw ValidationError("branch '" + b.label + "': declared derivative range does not exceed 1 in modulus");
            const auto d1 = poly_derivative(an.params);
            const auto d2 = poly_derivative(d1);
            const Interval dom(enclose(b.lo).lo(), enclose(b.hi).hi());
            constexpr int pieces = 256;
            double dist = 0.0;
            for (int i = 0; i < pieces; ++i) {
                double x0 = dom.lo() + dom.width() * i / pieces;
                double x1 = i + 1 == pieces ? dom.hi() : dom.lo() + dom.width() * (i + 1) / pieces;
                Interval x(x0, x1);
                Interval d = poly_eval(d1, x);
                if (!an.deriv_range.contains(d))
                    throw ValidationError("branch '" + b.label + "': derivative leaves the declared range near x=" +
                                          std::to_string(x0));
                dist = std::max(dist, (abs(poly_eval(d2, x)) / abs(d)).hi());
            }
            k.expansion_min_ = std::min(k.expansion_min_, an.deriv_range.mig());
            k.distortion_bound_ = std::max(k.distortion_bound_, dist);
        }
        // Markov image: psi(domain) must be the hull of the successor domains. Unlisted
        // branches inside that hull are allowed and just open wider gaps (subshifts).
        Rational y0 = eval_exact(b.map, b.lo);
        Rational y1 = eval_exact(b.map, b.hi);
        if (y1 < y0)
            std::swap(y0, y1);
        const auto& succ = k.successors_[a];
        Rational s_lo = k.branches_[succ.front()].lo;
        Rational s_hi = k.branches_[succ.back()].hi;
        if (y0 != s_lo || y1 != s_hi)
            throw ValidationError("branch '" + b.label + "' maps onto " + range_text(y0, y1) +
                                  ", not onto the hull of its successors " + range_text(s_lo, s_hi));
    }
    k.mixing_ = primitive(k.markov_, n);
    if (require_mixing && !k.mixing_)
        throw ValidationError("transition relation is not mixing");
    return k;
}

CantorSystem affine_full_shift(const std::vector<std::pair<Rational, Rational>>& domains,
                               const std::vector<std::string>& labels)
{
    if (domains.empty())
        throw ValidationError("no branch domains");
    Rational lo = domains.front().first;
    Rational hi = domains.front().second;
    for (const auto& d : domains) {
        lo = std::min(lo, d.first);
        hi = std::max(hi, d.second);
    }
    std::vector<BranchSpec> br;
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const auto& [a, b] = domains[i];
        if (!(a < b))
            throw ValidationError("empty branch domain " + range_text(a, b));
        Rational slope = (hi - lo) / (b - a);
        Rational offset = lo - slope * a;
        std::string label = i < labels.size() ? labels[i] : std::to_string(i);
        br.push_back({label, a, b, AffineMap{slope, offset}});
    }
    std::vector<std::pair<std::string, std::string>> mk;
    for (const auto& x : br)
        for (const auto& y : br)
            mk.emplace_back(x.label, y.label);
    return make_cantor_system(lo, hi, std::move(br), mk);
}

std::vector<std::pair<std::string, std::string>> markov_pairs(const CantorSystem& k)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t a = 0; a < k.size(); ++a)
        for (std::size_t b : k.successors(a))
            out.emplace_back(k.branches()[a].label, k.branches()[b].label);
    return out;
}

namespace {

// Coefficients of c * p((x - d) / c) + d.
std::vector<Rational> conjugate_poly(const std::vector<Rational>& p, const Rational& c, const Rational& d)
{
    // q(x) = p(u) with u = x/c - d/c.
    const Rational u1 = Rational(1) / c;
    const Rational u0 = -d / c;
    std::vector<Rational> out(p.size(), Rational(0));
    std::vector<Rational> power{Rational(1)};
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < power.size(); ++j)
            out[j] += p[i] * power[j];
        std::vector<Rational> next(power.size() + 1, Rational(0));
        for (std::size_t j = 0; j < power.size(); ++j) {
            next[j] += power[j] * u0;
            next[j + 1] += power[j] * u1;
        }
        power.swap(next);
        if (out.size() < power.size())
            out.resize(power.size(), Rational(0));
    }
    for (auto& x : out)
        x *= c;
    out[0] += d;
    while (out.size() > 1 && out.back() == 0)
        out.pop_back();
    return out;
}

} // namespace

CantorSystem transform(const CantorSystem& k, const Rational& scale, const Rational& shift)
{
    if (scale == 0)
        throw ValidationError("degenerate scale in transform");
    std::vector<BranchSpec> br;
    for (const auto& b : k.branches()) {
        BranchSpec nb = b;
        Rational x0 = scale * b.lo + shift;
        Rational x1 = scale * b.hi + shift;
        nb.lo = std::min(x0, x1);
        nb.hi = std::max(x0, x1);
        if (const auto* am = std::get_if<AffineMap>(&b.map)) {
            // psi'(x) = scale * psi((x - shift) / scale) + shift
            nb.map = AffineMap{am->slope, scale * am->offset + shift - am->slope * shift};
        } else {
            auto an = std::get<AnalyticMap>(b.map);
            an.params = conjugate_poly(an.params, scale, shift);
            nb.map = an;
        }
        br.push_back(std::move(nb));
    }
    Rational h0 = scale * k.hull_lo() + shift;
    Rational h1 = scale * k.hull_hi() + shift;
    return make_cantor_system(std::min(h0, h1), std::max(h0, h1), std::move(br), markov_pairs(k), k.is_mixing());
}

CantorSystem restrict_markov(const CantorSystem& k, const std::vector<std::pair<std::string, std::string>>& markov,
                             bool require_mixing)
{
    for (const auto& [a, b] : markov)
        if (!k.allowed(k.index_of(a), k.index_of(b)))
            throw ValidationError("transition " + a + " -> " + b + " is not in the parent relation");
    return make_cantor_system(k.hull_lo(), k.hull_hi(), k.branches(), markov, require_mixing);
}

CantorSystem disjoint_union(const CantorSystem& a, const CantorSystem& b)
{
    std::vector<BranchSpec> br;
    std::vector<std::pair<std::string, std::string>> mk;
    for (const auto& x : a.branches()) {
        auto y = x;
        y.label = "a." + x.label;
        br.push_back(std::move(y));
    }
    for (const auto& x : b.branches()) {
        auto y = x;
        y.label = "b." + x.label;
        br.push_back(std::move(y));
    }
    for (const auto& [f, t] : markov_pairs(a))
        mk.emplace_back("a." + f, "a." + t);
    for (const auto& [f, t] : markov_pairs(b))
        mk.emplace_back("b." + f, "b." + t);
    Rational lo = std::min(a.hull_lo(), b.hull_lo());
    Rational hi = std::max(a.hull_hi(), b.hull_hi());
    return make_cantor_system(lo, hi, std::move(br), mk, false);
}

// ---------------------------------------------------------------------------
// Cylinders

namespace {

void check_separated(const std::vector<Cylinder>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1].right.hi() < v[i].left.lo()) && !(v[i - 1].exact && v[i].exact))
            throw ResolutionError("cylinders at depth " + std::to_string(v[i].depth()) +
                                  " cannot be separated in interval arithmetic");
}

Interval replay(const CantorSystem& k, const Word& w, std::size_t upto, Interval x)
{
    // Apply the inverse branches w[upto-1], ..., w[0] in that order.
    for (std::size_t i = upto; i-- > 0;)
        x = k.inverse(w[i], x);
    return x;
}

} // namespace

std::vector<Cylinder> children(const CantorSystem& k, const Cylinder& c)
{
    std::vector<Cylinder> out;
    std::vector<std::size_t> next;
    if (c.word.empty()) {
        next.resize(k.size());
        std::iota(next.begin(), next.end(), 0);
    } else {
        next = k.successors(c.word.back());
    }
    for (std::size_t j : next) {
        const auto& b = k.branches()[j];
        Cylinder ch;
        ch.word = c.word;
        ch.word.push_back(static_cast<std::uint16_t>(j));
        if (k.is_affine()) {
            Rational s = 1;
            Rational o = 0;
            if (c.map) {
                s = c.map->first;
                o = c.map->second;
            }
            Rational a = s * b.lo + o;
            Rational e = s * b.hi + o;
            if (e < a)
                std::swap(a, e);
            const auto& am = std::get<AffineMap>(b.map);
            // phi_j(y) = y/slope - offset/slope; compose phi_w o phi_j.
            Rational js = Rational(1) / am.slope;
            Rational jo = -am.offset / am.slope;
            ch.map = std::make_pair(s * js, s * jo + o);
            ch.left = enclose(a);
            ch.right = enclose(e);
            ch.exact = std::make_pair(std::move(a), std::move(e));
        } else {
            Interval lo = replay(k, c.word, c.word.size(), enclose(b.lo));
            Interval hi = replay(k, c.word, c.word.size(), enclose(b.hi));
            if (hi.mid() < lo.mid())
                std::swap(lo, hi);
            ch.left = lo;
            ch.right = hi;
        }
        out.push_back(std::move(ch));
    }
    std::sort(out.begin(), out.end(), [](const Cylinder& x, const Cylinder& y) {
        if (x.exact && y.exact)
            return x.exact->first < y.exact->first;
        return x.left.mid() < y.left.mid();
    });
    return out;
}

std::vector<Cylinder> refine(const CantorSystem& k, std::size_t depth, std::size_t max_cylinders)
{
    Cylinder root;
    root.left = enclose(k.hull_lo());
    root.right = enclose(k.hull_hi());
    if (k.is_affine()) {
        root.exact = std::make_pair(k.hull_lo(), k.hull_hi());
        root.map = std::make_pair(Rational(1), Rational(0));
    }
    // Count first, by last letter, so an oversized request fails before any work.
    std::vector<std::size_t> ending(k.size(), 1);
    for (std::size_t d = 1; d < depth; ++d) {
        std::vector<std::size_t> next(k.size(), 0);
        for (std::size_t a = 0; a < k.size(); ++a)
            for (auto b : k.successors(a))
                next[b] = std::min(next[b] + ending[a], max_cylinders + 1);
        ending.swap(next);
    }
    std::size_t total = 0;
    for (auto c : ending)
        total = std::min(total + c, max_cylinders + 1);
    if (depth > 0 && total > max_cylinders)
        throw ResolutionError("depth " + std::to_string(depth) + " needs more than " + std::to_string(max_cylinders) +
                              " cylinders");
    std::vector<Cylinder> level{root};
    for (std::size_t d = 0; d < depth; ++d) {
        std::size_t count = 0;
        for (const auto& c : level)
            count += c.word.empty() ? k.size() : k.successors(c.word.back()).size();
        std::vector<Cylinder> next;
        next.reserve(count);
        for (const auto& c : level) {
            auto ch = children(k, c);
            for (auto& x : ch)
                next.push_back(std::move(x));
        }
        check_separated(next);
        level.swap(next);
    }
    return level;
}

GapSet gaps(const CantorSystem& k, std::size_t depth)
{
    if (depth < 1)
        throw ValidationError("gaps need depth >= 1");
    auto cyl = refine(k, depth);
    GapSet out;
    const double inf = std::numeric_limits<double>::infinity();
    out.below = Gap{Interval(-inf), enclose(k.hull_lo()), std::nullopt, 0, false};
    out.above = Gap{enclose(k.hull_hi()), Interval(inf), std::nullopt, 0, false};
    for (std::size_t i = 1; i < cyl.size(); ++i) {
        const auto& a = cyl[i - 1];
        const auto& b = cyl[i];
        std::size_t common = 0;
        while (common < a.word.size() && a.word[common] == b.word[common])
            ++common;
        Gap g;
        g.left = a.right;
        g.right = b.left;
        g.generation = common + 1;
        if (a.exact && b.exact)
            g.exact = std::make_pair(a.exact->second, b.exact->first);
        out.bounded.push_back(std::move(g));
    }
    return out;
}

std::vector<CylinderNode> root_nodes(const CantorSystem& k)
{
    CylinderNode root;
    root.left = enclose(k.hull_lo());
    root.right = enclose(k.hull_hi());
    root.slope = Interval(1.0);
    root.offset = Interval(0.0);
    std::vector<CylinderNode> out;
    for (std::size_t j = 0; j < k.size(); ++j) {
        const auto& b = k.branches()[j];
        CylinderNode n;
        n.left = enclose(b.lo);
        n.right = enclose(b.hi);
        n.word = {static_cast<std::uint16_t>(j)};
        n.last = static_cast<std::uint16_t>(j);
        if (const auto* am = std::get_if<AffineMap>(&b.map)) {
            n.slope = Interval(1.0) / enclose(am->slope);
            n.offset = -enclose(am->offset) / enclose(am->slope);
        }
        out.push_back(std::move(n));
    }
    return out;
}

std::vector<CylinderNode> child_nodes(const CantorSystem& k, const CylinderNode& p)
{
    std::vector<CylinderNode> out;
    const auto& succ = k.successors(p.last);
    out.reserve(succ.size());
    for (std::size_t j : succ) {
        const auto& b = k.branches()[j];
        CylinderNode n;
        n.last = static_cast<std::uint16_t>(j);
        if (const auto* am = std::get_if<AffineMap>(&b.map)) {
            Interval a = p.slope * enclose(b.lo) + p.offset;
            Interval e = p.slope * enclose(b.hi) + p.offset;
            if (p.slope.hi() < 0.0)
                std::swap(a, e);
            n.left = a;
            n.right = e;
            Interval js = Interval(1.0) / enclose(am->slope);
            n.slope = p.slope * js;
            n.offset = p.slope * (-enclose(am->offset) * js) + p.offset;
        } else {
            n.word = p.word;
            n.word.push_back(static_cast<std::uint16_t>(j));
            Interval a = replay(k, p.word, p.word.size(), enclose(b.lo));
            Interval e = replay(k, p.word, p.word.size(), enclose(b.hi));
            if (e.mid() < a.mid())
                std::swap(a, e);
            n.left = a;
            n.right = e;
        }
        out.push_back(std::move(n));
    }
    std::sort(out.begin(), out.end(),
              [](const CylinderNode& x, const CylinderNode& y) { return x.left.mid() < y.left.mid(); });
    return out;
}

std::vector<CylinderNode> nodes_at_depth(const CantorSystem& k, std::size_t depth, std::size_t max_cylinders)
{
    if (depth == 0)
        throw ValidationError("nodes_at_depth needs depth >= 1");
    std::vector<CylinderNode> level = root_nodes(k);
    for (std::size_t d = 1; d < depth; ++d) {
        std::size_t count = 0;
        for (const auto& c : level)
            count += k.successors(c.last).size();
        if (count > max_cylinders)
            throw ResolutionError("depth " + std::to_string(depth) + " needs more than " +
                                  std::to_string(max_cylinders) + " cylinders");
        std::vector<CylinderNode> next;
        next.reserve(count);
        for (const auto& c : level)
            for (auto& x : child_nodes(k, c))
                next.push_back(std::move(x));
        level.swap(next);
    }
    return level;
}

std::vector<Interval> cover(const CantorSystem& k, std::size_t depth, std::size_t max_cylinders)
{
    if (depth == 0)
        return {Interval(enclose(k.hull_lo()).lo(), enclose(k.hull_hi()).hi())};
    const auto level = nodes_at_depth(k, depth, max_cylinders);
    std::vector<Interval> out;
    out.reserve(level.size());
    for (const auto& c : level) {
        if (!(c.left.lo() <= c.right.hi()))
            throw ResolutionError("degenerate cylinder enclosure");
        out.emplace_back(c.left.lo(), c.right.hi());
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i - 1].hi() < out[i].lo()))
            throw ResolutionError("cylinders at depth " + std::to_string(depth) +
                                  " cannot be separated in interval arithmetic");
    return out;
}

Membership membership(const CantorSystem& k, const Rational& x, std::size_t depth)
{
    if (x < k.hull_lo() || x > k.hull_hi())
        return Membership::Outside;
    if (!k.is_affine())
        return membership(k, to_double(x), depth);
    Cylinder cur;
    cur.exact = std::make_pair(k.hull_lo(), k.hull_hi());
    cur.map = std::make_pair(Rational(1), Rational(0));
    for (std::size_t d = 0; d < depth; ++d) {
        auto ch = children(k, cur);
        auto it = std::find_if(ch.begin(), ch.end(),
                               [&](const Cylinder& c) { return c.exact->first <= x && x <= c.exact->second; });
        if (it == ch.end())
            return Membership::Outside;
        cur = std::move(*it);
    }
    return Membership::InsideAtDepth;
}

Membership membership(const CantorSystem& k, double x, std::size_t depth)
{
    if (k.is_affine())
        return membership(k, rational_from_double(x), depth);
    Interval hull(enclose(k.hull_lo()).lo(), enclose(k.hull_hi()).hi());
    if (x < hull.lo() || x > hull.hi())
        return Membership::Outside;
    Cylinder cur;
    cur.left = enclose(k.hull_lo());
    cur.right = enclose(k.hull_hi());
    for (std::size_t d = 0; d < depth; ++d) {
        auto ch = children(k, cur);
        const Cylinder* inside = nullptr;
        bool unsure = false;
        for (const auto& c : ch) {
            if (c.left.hi() <= x && x <= c.right.lo()) {
                inside = &c;
                break;
            }
            if (x >= c.left.lo() && x <= c.right.hi())
                unsure = true;
        }
        if (!inside)
            return unsure ? Membership::Undetermined : Membership::Outside;
        cur = *inside;
    }
    return Membership::InsideAtDepth;
}

const char* to_string(Membership m)
{
    switch (m) {
    case Membership::InsideAtDepth:
        return "InsideAtDepth";
    case Membership::Outside:
        return "Outside";
    case Membership::Undetermined:
        return "Undetermined";
    }
    return "?";
}

} // namespace fdyn
