#include "fdyn/py_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fdyn {

namespace {

void check_widths(const ChainWidths& w)
{
    if (w.P.size() != w.Q.size() || w.P.empty())
        throw ValidationError("chain widths need matching, nonempty P and Q lists");
    for (std::size_t i = 0; i < w.P.size(); ++i)
        if (!(w.P[i] > 0.0 && w.P[i] <= 1.0 && w.Q[i] > 0.0 && w.Q[i] <= 1.0))
            throw ValidationError("chain widths must lie in (0, 1]");
}

} // namespace

double lemma24_constant(const ChainWidths& w, const PYParams& params)
{
    check_widths(w);
    const double bt = params.beta_tilde();
    double C = 0.0;
    for (std::size_t j = 1; j + 1 < w.P.size(); ++j)
        C = std::max(C, std::max(w.P[j + 1], w.Q[j + 1]) / std::pow(w.Q[j], bt));
    return C;
}

bool lemma24_check(const ChainWidths& w, const PYParams& params, double C)
{
    check_widths(w);
    const double bt = params.beta_tilde();
    for (std::size_t j = 1; j + 1 < w.P.size(); ++j)
        if (std::max(w.P[j + 1], w.Q[j + 1]) > C * std::pow(w.Q[j], bt))
            return false;
    return true;
}

CoveringBound covering_bound(const ChainWidths& w, double d, double eta)
{
    check_widths(w);
    if (w.P.size() < 2)
        throw ValidationError("covering bound needs a chain with k >= 1");
    if (!(d > 0.0 && d <= 2.0) || !(eta >= 0.0 && eta < 1.0))
        throw ValidationError("covering bound needs 0 < d <= 2 and 0 <= eta < 1");
    const std::size_t k = w.P.size() - 1;
    CoveringBound out;
    out.eps.assign(k + 1, 0.0);
    out.eps[k] = std::pow(w.Q[k], (1.0 - eta) / 2.0) * w.P[k];
    for (std::size_t i = k; i-- > 0;) {
        if (!(out.eps[i + 1] < w.Q[i]))
            throw CompatibilityViolation("square side " + std::to_string(out.eps[i + 1]) + " at level " +
                                             std::to_string(i + 1) + " is not below |Q_" + std::to_string(i) +
                                             "| = " + std::to_string(w.Q[i]),
                                         i);
        out.eps[i] = out.eps[i + 1] * w.P[i];
    }
    out.n_k = std::sqrt(w.Q[k - 1]) / out.eps[k];
    // Pulling a square of side eps_{i+1} back through level i gives 1/(|P_i||Q_i|)
    // squares of side eps_{i+1}|P_i|, which multiplies the d-measure by |P_i|^(d-1)/|Q_i|.
    double log_b = std::log(out.n_k) + d * std::log(out.eps[k]);
    for (std::size_t i = 0; i < k; ++i)
        log_b += (d - 1.0) * std::log(w.P[i]) - std::log(w.Q[i]);
    out.bound = std::exp(log_b);
    out.eps0_scale = out.eps[0];
    return out;
}

DimensionBound exceptional_dimension_bound(double ds, double du, const PYParams& params)
{
    if (!(ds >= 0.0 && ds <= 1.0 && du >= 0.0 && du <= 1.0))
        throw ValidationError("dimensions must lie in [0, 1]");
    if (!(params.eta >= 0.0 && params.eta < 1.0) || !(params.tau > -1.0) || !(params.beta > 0.0))
        throw ValidationError("bound needs 0 <= eta < 1, tau > -1 and beta > 0");
    DimensionBound out;
    out.d_minus = std::max(0.0, ds + du - 1.0 + 2.0 * params.eta);
    if (out.d_minus >= 0.2) {
        out.reason = "d_minus = " + std::to_string(out.d_minus) + " is not below 1/5";
        return out;
    }
    out.from_dstar = 1.0 + (2.0 * out.d_minus + 1.0) / 3.0;
    const double bt = params.beta_tilde();
    out.from_beta = bt * (1.0 - params.eta) > 0.0 ? 1.0 + 1.0 / (bt * (1.0 - params.eta)) : INFINITY;
    out.d = std::max({out.from_floor, out.from_dstar, out.from_beta}) + 1e-6;
    if (!(out.d < 2.0)) {
        out.reason = "the bound reaches 2";
        return out;
    }
    out.feasible = true;
    return out;
}

namespace {

std::vector<AffineLikeElement> base_elements(const Horseshoe& h)
{
    std::vector<AffineLikeElement> out;
    for (const auto& t : h.transitions)
        out.push_back(make_affine_element(t.piece, t.from, t.to, 1, {t.label}, h.cone));
    return out;
}

} // namespace

std::optional<Interval> core_gap(const AffineLikeElement& e, const Horseshoe& family)
{
    std::vector<Interval> kids;
    const Interval mid(0.5);
    for (const auto& t : base_elements(family)) {
        if (t.source() != e.target())
            continue;
        try {
            const auto c = simple_compose(e, t, family.cone);
            kids.emplace_back(c.P.minus.eval(mid).lo(), c.P.plus.eval(mid).hi());
        } catch (const CompositionError&) {
        }
    }
    if (kids.size() < 2)
        return std::nullopt;
    std::sort(kids.begin(), kids.end(), [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });
    double reach = kids[0].hi();
    for (std::size_t i = 1; i < kids.size(); ++i) {
        if (kids[i].lo() > reach)
            return Interval(reach, kids[i].lo());
        reach = std::max(reach, kids[i].hi());
    }
    return std::nullopt;
}

namespace {

Interval q_at_center(const AffineLikeElement& e)
{
    const Interval mid(0.5);
    return Interval(e.Q.minus.eval(mid).lo(), e.Q.plus.eval(mid).hi());
}

// Rightmost tip of the image parabolas of Q and the leftmost point they reach in R_s.
Interval reach(const Interval& q, const ParameterInterval& I, const FoldingModel& g)
{
    const Interval T = I.enclosure() + Interval(g.tip0);
    const Interval b(g.b);
    const double tip_max = (Interval(T.hi()) - b * Interval(q.lo())).hi();
    const double left_min = (Interval(T.lo()) - b * Interval(q.hi()) - square(Interval(g.half_width))).lo();
    return Interval(std::min(left_min, tip_max), tip_max);
}

bool crosses(const Interval& reach, const Interval& gap)
{
    return reach.hi() > gap.lo() && reach.lo() < gap.hi();
}

} // namespace

bool core_link(const AffineLikeElement& prev, const AffineLikeElement& next, const ParameterInterval& I,
               const Horseshoe& family)
{
    if (!family.fold)
        return false;
    const FoldingModel& g = *family.fold;
    if (prev.target() != g.from || next.source() != g.to)
        return false;
    const auto gap = core_gap(next, family);
    return gap && crosses(reach(q_at_center(prev), I, g), *gap);
}

ChainEnumeration enumerate_admissible_chains(const Catalog& catalog, const Horseshoe& family, const PYParams& params,
                                             int k, std::size_t budget)
{
    if (k < 1)
        throw ValidationError("chains need k >= 1");
    if (!family.fold)
        return {}; // no fold, no parabolic cores
    const FoldingModel& g = *family.fold;
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < catalog.elements.size(); ++i) {
        const auto& e = catalog.elements[i];
        if (e.source() == g.to && e.target() == g.from)
            cand.push_back(i);
    }
    std::vector<std::optional<Interval>> gap(cand.size());
    std::vector<Interval> r(cand.size(), Interval(0.0));
    for (std::size_t a = 0; a < cand.size(); ++a) {
        gap[a] = core_gap(catalog.elements[cand[a]], family);
        r[a] = reach(q_at_center(catalog.elements[cand[a]]), catalog.interval, g);
    }
    std::vector<std::vector<std::size_t>> succ(cand.size());
    for (std::size_t a = 0; a < cand.size(); ++a)
        for (std::size_t b = 0; b < cand.size(); ++b)
            if (gap[b] && crosses(r[a], *gap[b]))
                succ[a].push_back(b);

    ChainEnumeration out;
    std::vector<std::size_t> path;
    std::function<void(std::size_t)> walk = [&](std::size_t a) {
        if (out.chains.size() >= budget)
            return;
        path.push_back(a);
        if (path.size() == static_cast<std::size_t>(k) + 1) {
            Chain c;
            for (auto p : path) {
                const auto& e = catalog.elements[cand[p]];
                const auto [wp, wq] = widths(e);
                c.elements.push_back(cand[p]);
                c.widths.P.push_back(wp);
                c.widths.Q.push_back(wq);
            }
            out.fitted_C = std::max(out.fitted_C, lemma24_constant(c.widths, params));
            auto& slot = out.endpoint_counts[{c.elements.front(), c.elements.back()}];
            ++slot.first;
            slot.second = std::pow(c.widths.Q.back(), -params.eta);
            out.chains.push_back(std::move(c));
        } else {
            for (auto b : succ[a])
                walk(b);
        }
        path.pop_back();
    };
    for (std::size_t a = 0; a < cand.size(); ++a)
        walk(a);
    return out;
}

CriticalSums critical_sum(const Catalog& catalog, double e, const Horseshoe& family, double eta)
{
    if (!(e >= 0.0))
        throw ValidationError("exponent must be >= 0");
    CriticalSums out;
    out.partial.assign(static_cast<std::size_t>(std::max(catalog.n_max, 1)), 0.0);
    for (const auto& el : catalog.elements) {
        const double q = widths(el).second;
        if (el.n >= 1 && el.n <= catalog.n_max && is_critical(el.Q, q, catalog.interval, family, eta))
            out.partial[static_cast<std::size_t>(el.n - 1)] += std::pow(q, e);
    }
    for (std::size_t n = 1; n < out.partial.size(); ++n)
        out.partial[n] += out.partial[n - 1];
    out.last_increment = out.partial.size() > 1 ? out.partial.back() - out.partial[out.partial.size() - 2]
                                                : out.partial.back();
    return out;
}

} // namespace fdyn
