#include "fdyn/parallel.hpp"
#include "fdyn/py_scheme.hpp"

#include <cmath>

namespace fdyn {

std::size_t children_count(const PYParams& params, int k)
{
    if (k < 0)
        throw ValidationError("generation must be >= 0");
    const long double e0 = static_cast<long double>(to_double(params.eps0));
    const long double tau = params.tau;
    // eps_k^-tau = exp(-tau (1+tau)^k log eps0)
    const long double v = std::exp(-tau * std::pow(1.0L + tau, static_cast<long double>(k)) * std::log(e0));
    if (!std::isfinite(static_cast<double>(v)) || v > 1e9L)
        throw BudgetError("child count overflows at generation " + std::to_string(k));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(v)));
}

namespace {

double widest_base(const Horseshoe& h)
{
    double w = 0.0;
    for (const auto& t : h.transitions) {
        const auto e = make_affine_element(t.piece, t.from, t.to, 1, {t.label}, h.cone);
        const auto [p, q] = widths(e);
        w = std::max({w, p, q});
    }
    return w;
}

// Smallest word length beyond which no element can reach w_min: affine widths are
// at most wb^n, and a fold composite that passes transversality has delta >= |I|,
// so its widths are at most wb^(n-1) / (2 sqrt|I|).
int default_n_max(double wb, double w_min, double len)
{
    if (!(wb < 1.0))
        throw ValidationError("base transitions must contract (width < 1)");
    const double affine = std::floor(std::log(w_min) / std::log(wb));
    const double folded = 1.0 + std::floor(std::log(2.0 * std::sqrt(len) * w_min) / std::log(wb));
    return std::max(1, static_cast<int>(std::max(affine, folded)));
}

void test_node(ExclusionNode& node, const Horseshoe& family, const PYParams& params, const ExclusionOptions& opt,
               double wb)
{
    const double len = to_double(node.interval.length());
    node.w_min = pow(Interval(to_double_down(node.interval.length())), params.beta).lo();
    node.n_max = opt.n_max > 0 ? opt.n_max : default_n_max(wb, node.w_min, len);
    if (!family.fold) {
        // Nothing can be critical without a fold, so the test is vacuous.
        node.interval.status = IntervalStatus::Good;
        return;
    }
    const Catalog cat = build_catalog(family, node.interval, params, node.n_max, node.w_min, opt.max_elements);
    const auto reg = strong_regularity_test(cat, node.interval, params.beta, family, params.eta);
    node.catalog_size = cat.elements.size();
    node.parabolic = cat.parabolic;
    node.bicritical = reg.bicritical;
    node.witness = reg.witness;
    node.interval.status = reg.good ? IntervalStatus::Good : IntervalStatus::Excluded;
}

} // namespace

ExclusionResult run_exclusion(const Horseshoe& family, const PYParams& params, int generations,
                              const ExclusionOptions& opt)
{
    params.validate();
    if (generations < 0)
        throw ValidationError("generations must be >= 0");
    const double wb = widest_base(family);

    ExclusionResult out;
    out.generations = generations;
    ExclusionNode root;
    root.interval = {params.eps0, 2 * params.eps0, 0, IntervalStatus::Candidate};
    test_node(root, family, params, opt, wb);
    out.nodes.push_back(root);

    std::vector<std::size_t> frontier{0};
    for (int k = 1; k <= generations; ++k) {
        const std::size_t m = children_count(params, k - 1);
        std::vector<ExclusionNode> next;
        for (auto pi : frontier) {
            const auto& parent = out.nodes[pi];
            if (parent.interval.status != IntervalStatus::Good)
                continue;
            const Rational step = parent.interval.length() / static_cast<long>(m);
            for (std::size_t i = 0; i < m; ++i) {
                ExclusionNode c;
                c.parent = static_cast<int>(pi);
                c.interval.lo = parent.interval.lo + step * static_cast<long>(i);
                c.interval.hi = i + 1 == m ? parent.interval.hi : c.interval.lo + step;
                c.interval.generation = k;
                next.push_back(std::move(c));
            }
        }
        parallel_for(next.size(), opt.threads,
                     [&](std::size_t i) { test_node(next[i], family, params, opt, wb); });
        frontier.clear();
        for (auto& c : next) {
            frontier.push_back(out.nodes.size());
            out.nodes.push_back(std::move(c));
        }
    }

    // Good leaves of the last generation survive; every excluded node removes its
    // whole interval.
    out.surviving = 0;
    out.excluded = 0;
    for (const auto& n : out.nodes) {
        if (n.interval.status == IntervalStatus::Excluded)
            out.excluded += n.interval.length();
        else if (n.interval.generation == generations)
            out.surviving += n.interval.length();
    }
    return out;
}

} // namespace fdyn
