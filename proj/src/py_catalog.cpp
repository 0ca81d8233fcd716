#include "fdyn/py_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace fdyn {

double PYParams::beta_tilde() const
{
    return beta * (1.0 - eta) / (1.0 + tau);
}

void PYParams::validate() const
{
    const double e0 = to_double(eps0);
    if (!(eps0 > 0 && e0 < eta && eta < tau && tau < 1.0))
        throw ValidationError("parameters need 0 < eps0 < eta < tau < 1");
    if (!(beta_tilde() > 1.0))
        throw ValidationError("parameters need beta (1 - eta) / (1 + tau) > 1");
}

const char* to_string(IntervalStatus s)
{
    switch (s) {
    case IntervalStatus::Candidate:
        return "candidate";
    case IntervalStatus::Good:
        return "good";
    case IntervalStatus::Excluded:
        return "excluded";
    }
    return "?";
}

long Catalog::find(const std::string& key) const
{
    const auto it = index_.find(key);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
}

namespace {

double max_width(const AffineLikeElement& e)
{
    const auto [p, q] = widths(e);
    return std::max(p, q);
}

struct Builder {
    const Horseshoe& family;
    int n_max;
    double w_min;
    std::size_t max_elements;
    Catalog out;
    std::set<std::string> seen;

    bool keep(const AffineLikeElement& e) const { return e.n <= n_max && e.cone_ok && max_width(e) >= w_min; }

    // True when stored.
    bool add(AffineLikeElement e)
    {
        if (!keep(e) || !seen.insert(word_key(e.word)).second)
            return false;
        if (std::holds_alternative<FoldComposite>(e.rep.form))
            ++out.parabolic;
        out.elements.push_back(std::move(e));
        if (out.elements.size() > max_elements)
            overflow();
        return true;
    }

    void finish()
    {
        std::stable_sort(out.elements.begin(), out.elements.end(),
                         [](const AffineLikeElement& a, const AffineLikeElement& b) {
                             if (a.n != b.n)
                                 return a.n < b.n;
                             return a.word < b.word;
                         });
    }

    [[noreturn]] void overflow()
    {
        finish();
        throw CatalogOverflow("catalog exceeds " + std::to_string(max_elements) + " elements", out);
    }
};

std::optional<AffineLikeElement> try_compose(const AffineLikeElement& f, const AffineLikeElement& fp,
                                             const ConeParams& cone)
{
    try {
        return simple_compose(f, fp, cone);
    } catch (const CompositionError&) {
        return std::nullopt;
    }
}

double rational_top(const Rational& c, const Rational& k)
{
    return to_double_up(k > 0 ? c + k : c);
}

} // namespace

Catalog build_catalog(const Horseshoe& family, const ParameterInterval& I, const PYParams& params, int n_max,
                      double w_min, std::size_t max_elements)
{
    if (n_max < 1 || !(w_min > 0.0) || !(I.lo < I.hi))
        throw ValidationError("catalog needs n_max >= 1, w_min > 0 and a nonempty interval");
    Builder b{family, n_max, w_min, max_elements, {}, {}};
    b.out.interval = I;
    b.out.n_max = n_max;
    b.out.w_min = w_min;
    const ConeParams& cone = family.cone;

    std::vector<AffineLikeElement> base;
    for (const auto& t : family.transitions)
        base.push_back(make_affine_element(t.piece, t.from, t.to, 1, {t.label}, cone));

    // Affine words. Widths only shrink under composition, so extending stored words
    // by one letter reaches every word that passes the caps.
    std::deque<std::size_t> queue;
    for (const auto& e : base)
        if (b.add(e))
            queue.push_back(b.out.elements.size() - 1);
    while (!queue.empty()) {
        const AffineLikeElement e = b.out.elements[queue.front()];
        queue.pop_front();
        for (const auto& t : base) {
            if (t.source() != e.target())
                continue;
            if (auto c = try_compose(e, t, cone); c && b.add(std::move(*c)))
                queue.push_back(b.out.elements.size() - 1);
        }
    }

    if (family.fold) {
        FoldingModel g = *family.fold;
        g.t = I.enclosure();
        const double len = to_double_up(I.length());
        std::vector<std::size_t> f0s, f1s;
        for (std::size_t i = 0; i < b.out.elements.size(); ++i) {
            const auto& e = b.out.elements[i];
            const auto& p = std::get<AffinePiece>(e.rep.form);
            if (!p.axis_aligned())
                continue;
            if (e.target() == g.from)
                f0s.push_back(i);
            if (e.source() == g.to)
                f1s.push_back(i);
        }
        // Right edge of P1, for the delta > 0 prefilter.
        std::vector<std::pair<double, std::size_t>> right;
        for (auto i : f1s) {
            const auto& p = std::get<AffinePiece>(b.out.elements[i].rep.form);
            right.emplace_back(to_double_down(p.a1 > 0 ? p.a0 + p.a1 : p.a0), i);
        }
        std::sort(right.begin(), right.end());
        const double reach = g.t.hi() + g.tip0;
        std::vector<AffineLikeElement> composites;
        for (auto i0 : f0s) {
            const AffineLikeElement& f0 = b.out.elements[i0];
            const auto& p0 = std::get<AffinePiece>(f0.rep.form);
            const double limit = reach - g.b * rational_top(p0.b0, p0.b2) + 1e-12;
            for (const auto& [r, i1] : right) {
                if (r >= limit)
                    break;
                const AffineLikeElement& f1 = b.out.elements[i1];
                if (f0.n + g.n0 + f1.n > n_max)
                    continue;
                if (!transversality_ok(f0, g, f1, len, params.eta))
                    continue;
                try {
                    auto res = parabolic_compose(f0, g, f1, cone);
                    if (!res.possible)
                        continue;
                    composites.push_back(std::move(*res.minus));
                    composites.push_back(std::move(*res.plus));
                } catch (const CompositionError&) {
                    // the preimage leaves the tongue
                }
            }
        }
        for (auto& c : composites)
            if (b.add(std::move(c)))
                queue.push_back(b.out.elements.size() - 1);
        // Simple compositions with base transitions on either side; widths shrink
        // again, so one letter at a time suffices.
        while (!queue.empty()) {
            const AffineLikeElement e = b.out.elements[queue.front()];
            queue.pop_front();
            for (const auto& t : base) {
                if (t.target() == e.source())
                    if (auto c = try_compose(t, e, cone); c && b.add(std::move(*c)))
                        queue.push_back(b.out.elements.size() - 1);
                if (t.source() == e.target())
                    if (auto c = try_compose(e, t, cone); c && b.add(std::move(*c)))
                        queue.push_back(b.out.elements.size() - 1);
            }
        }
    }

    b.finish();
    for (std::size_t i = 0; i < b.out.elements.size(); ++i)
        b.out.index_.emplace(word_key(b.out.elements[i].word), i);
    return std::move(b.out);
}

namespace {

// Largest |slope| of c0 + c1 s + c2 s^2 on [0, 1].
double slope_bound(const StripBoundary& g)
{
    return abs(g.c1 + Interval(2.0) * g.c2 * Interval(0.0, 1.0)).hi();
}

// Lower bound on the distance from a point with coordinate range `tip` along the
// cross-section at s = s0 to the region between the two boundaries.
double strip_distance(const StripBoundary& minus, const StripBoundary& plus, double s0, const Interval& tip)
{
    const Interval s(s0);
    const double lo = minus.eval(s).lo();
    const double hi = plus.eval(s).hi();
    const double gap = std::max({0.0, (Interval(tip.lo()) - Interval(hi)).lo(), (Interval(lo) - Interval(tip.hi())).lo()});
    if (gap == 0.0)
        return 0.0;
    const double m = std::max(slope_bound(minus), slope_bound(plus));
    return (Interval(gap) / sqrt(Interval(1.0) + square(Interval(m)))).lo();
}

bool below_threshold(double dist, double width, double eta)
{
    return dist < pow(Interval(width), 1.0 - eta).hi();
}

} // namespace

double tip_distance(const VerticalStrip& P, const ParameterInterval& I, const Horseshoe& family)
{
    if (!family.fold)
        throw ValidationError("model '" + family.name + "' has no fold");
    const auto [x, y] = tip_s(*family.fold, I.enclosure());
    return strip_distance(P.minus, P.plus, y.mid(), x);
}

double tip_distance(const HorizontalStrip& Q, const ParameterInterval& I, const Horseshoe& family)
{
    if (!family.fold)
        throw ValidationError("model '" + family.name + "' has no fold");
    const auto [x, y] = tip_u(*family.fold, I.enclosure());
    return strip_distance(Q.minus, Q.plus, x.mid(), y);
}

bool is_critical(const VerticalStrip& P, double width, const ParameterInterval& I, const Horseshoe& family,
                 double eta)
{
    if (!family.fold || P.rect != family.fold->to)
        return false;
    return below_threshold(tip_distance(P, I, family), width, eta);
}

bool is_critical(const HorizontalStrip& Q, double width, const ParameterInterval& I, const Horseshoe& family,
                 double eta)
{
    if (!family.fold || Q.rect != family.fold->from)
        return false;
    return below_threshold(tip_distance(Q, I, family), width, eta);
}

bool is_bicritical(const AffineLikeElement& e, const ParameterInterval& I, const Horseshoe& family, double eta)
{
    const auto [p, q] = widths(e);
    return is_critical(e.P, p, I, family, eta) && is_critical(e.Q, q, I, family, eta);
}

bool is_prime(const AffineLikeElement& e, const Catalog& catalog)
{
    for (std::size_t k = 1; k < e.word.size(); ++k) {
        const std::vector<std::string> a(e.word.begin(), e.word.begin() + static_cast<long>(k));
        const std::vector<std::string> b(e.word.begin() + static_cast<long>(k), e.word.end());
        const long i = catalog.find(word_key(a));
        const long j = catalog.find(word_key(b));
        if (i >= 0 && j >= 0 && catalog.elements[static_cast<std::size_t>(i)].n < e.n &&
            catalog.elements[static_cast<std::size_t>(j)].n < e.n)
            return false;
    }
    return true;
}

RegularityResult strong_regularity_test(const Catalog& catalog, const ParameterInterval& I, double beta,
                                        const Horseshoe& family, double eta)
{
    RegularityResult out;
    const double threshold = pow(Interval(to_double_down(I.length())), beta).lo();
    double widest = -1.0;
    for (const auto& e : catalog.elements) {
        if (!is_bicritical(e, I, family, eta))
            continue;
        ++out.bicritical;
        const double w = max_width(e);
        if (w >= threshold && w > widest) {
            widest = w;
            out.witness = e;
        }
    }
    out.good = !out.witness.has_value();
    return out;
}

} // namespace fdyn
