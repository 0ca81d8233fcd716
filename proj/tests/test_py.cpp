#include "fdyn/py_scheme.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace fdyn;

namespace {

Rational R(long p, long q = 1)
{
    return Rational(p, q);
}

ParameterInterval interval(const Rational& lo, const Rational& hi)
{
    return {lo, hi, 0, IntervalStatus::Candidate};
}

PYParams mpy_params()
{
    PYParams p;
    p.eta = 0.01;
    p.tau = 0.01;
    p.beta = 2.0;
    return p;
}

std::set<std::string> keys(const Catalog& c)
{
    std::set<std::string> out;
    for (const auto& e : c.elements)
        out.insert(word_key(e.word));
    return out;
}

// Strip of constant x-range [lo, lo + w] or y-range [lo, lo + w].
VerticalStrip vstrip(double lo, double w)
{
    return {"s", {Interval(lo)}, {Interval(lo + w)}};
}

AffineLikeElement sq(const Rational& x0, const Rational& y0, const Rational& w, const std::string& src,
                     const std::string& dst)
{
    return make_affine_element(AffinePiece{x0, w, 0, y0, 0, w}, src, dst, 1, {"e"}, {});
}

} // namespace

TEST_CASE("parameters")
{
    PYParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.beta_tilde() == doctest::Approx(1.5 * 0.95 / 1.2));
    CHECK(mpy_params().beta_tilde() == doctest::Approx(1.9604).epsilon(1e-4));
    PYParams bad = p;
    bad.eta = 0.3;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = p;
    bad.beta = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("children count")
{
    PYParams p;
    CHECK(children_count(p, 0) == 3);
    // eps_1 = 10^-3.6, eps_1^-0.2 = 10^0.72 = 5.25
    CHECK(children_count(p, 1) == 5);
}

TEST_CASE("catalog: n_max = 1 keeps the base transitions")
{
    const auto h = toy_het();
    const auto c = build_catalog(h, interval(R(1, 10), R(1001, 10000)), {}, 1, 1e-9);
    CHECK(c.elements.size() == h.transitions.size());
    CHECK(c.parabolic == 0);
    CHECK_THROWS_AS(build_catalog(h, interval(R(1, 10), R(1, 10)), {}, 1, 1e-9), ValidationError);
}

TEST_CASE("catalog equals brute-force word enumeration")
{
    const auto h = toy_het();
    PYParams p;
    const auto I = interval(R(1, 10), R(1001, 10000));
    const auto c = build_catalog(h, I, p, 6, 1e-6);
    const auto expect = oracle::catalog_words(h, I, p.eta, 6, 1e-6);
    CHECK(c.elements.size() == 252);
    CHECK(keys(c) == expect);

    // At t ~ 0.03 the shortest transversal pairs have four letters on each side.
    const auto J = interval(R(3, 100), R(301, 10000));
    const auto cj = build_catalog(h, J, p, 9, 1e-6);
    const auto ej = oracle::catalog_words(h, J, p.eta, 9, 1e-6);
    CHECK(cj.parabolic > 0);
    CHECK(keys(cj) == ej);
    for (const auto& e : cj.elements)
        CHECK(e.cone_ok);
}

TEST_CASE("catalog: overflow carries the partial catalog")
{
    try {
        build_catalog(toy_het(), interval(R(1, 10), R(1001, 10000)), {}, 8, 1e-9, 50);
        FAIL("expected overflow");
    } catch (const CatalogOverflow& e) {
        CHECK(e.partial().elements.size() == 51);
    }
}

TEST_CASE("criticality examples")
{
    const auto h = toy_het();
    const auto I = interval(R(1, 10), R(1001, 10000));
    CHECK_FALSE(is_critical(vstrip(3.0, 0.1), 0.1, I, h, 0.1));
    CHECK(is_critical(vstrip(0.05, 0.1), 0.1, I, h, 0.1));
    // Left edge 0.05 beyond the right end of the tip range.
    CHECK(tip_distance(vstrip(0.1501, 0.1), I, h) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(is_critical(vstrip(0.1501, 0.1), 0.1, I, h, 0.1));
    // 0.2 - 0.1001 = 0.0999 is still below 0.1^0.9; 0.1999 is not.
    CHECK(is_critical(vstrip(0.2, 0.1), 0.1, I, h, 0.1));
    CHECK_FALSE(is_critical(vstrip(0.3, 0.1), 0.1, I, h, 0.1));
}

TEST_CASE("bicriticality truth table")
{
    const auto h = toy_het();
    const auto I = interval(R(1, 10), R(1001, 10000)); // tips at x ~ 0.1 in s and y ~ 1 in u
    const Rational w(1, 8);
    const auto pc_qc = sq(R(1, 20), R(7, 8), w, "s", "u");
    const auto pc_qn = sq(R(1, 20), R(0), w, "s", "u");
    const auto pn_qc = sq(R(3, 4), R(7, 8), w, "s", "u");
    CHECK(is_bicritical(pc_qc, I, h, 0.1));
    CHECK_FALSE(is_bicritical(pc_qn, I, h, 0.1));
    CHECK_FALSE(is_bicritical(pn_qc, I, h, 0.1));
    CHECK_FALSE(is_bicritical(sq(R(1, 20), R(7, 8), w, "s", "s"), I, h, 0.1));
    CHECK_FALSE(is_bicritical(pc_qc, I, toy_het_fold_free(), 0.1));
}

TEST_CASE("bicritical subset of a depth-6 catalog matches the geometric oracle")
{
    const auto h = toy_het();
    // Near t = 0.1 a critical P needs a word opening with (s,0)(s,0) and a critical
    // Q one closing with (s,1)(u,1)..., which never meet in six letters; near t = 0
    // both sides open up at ten letters.
    const std::vector<std::pair<ParameterInterval, int>> cases{{interval(R(1, 10), R(1001, 10000)), 6},
                                                               {interval(R(1, 1000), R(2, 1000)), 10}};
    for (const auto& [I, n_max] : cases) {
        const auto c = build_catalog(h, I, {}, n_max, 1e-6);
        std::size_t n = 0;
        for (const auto& e : c.elements) {
            const auto o = oracle::criticality(h, e.word, I, 0.05);
            CHECK(is_bicritical(e, I, h, 0.05) == (o.p && o.q));
            n += o.p && o.q;
        }
        if (n_max == 10)
            CHECK(n > 0);
        else
            CHECK(n == 0);
    }
}

TEST_CASE("primality")
{
    const auto h = toy_het();
    const auto c = build_catalog(h, interval(R(3, 100), R(301, 10000)), {}, 9, 1e-6);
    const auto& base = c.elements[static_cast<std::size_t>(c.find("(u,0)"))];
    CHECK(is_prime(base, c));
    const long two = c.find("(u,0) (u,1)");
    REQUIRE(two >= 0);
    CHECK_FALSE(is_prime(c.elements[static_cast<std::size_t>(two)], c));
    std::size_t folded = 0;
    for (const auto& e : c.elements) {
        if (std::none_of(e.word.begin(), e.word.end(), oracle::is_fold_marker))
            continue;
        ++folded;
        // A folded word is prime iff no cut leaves two catalog words.
        bool split = false;
        for (std::size_t k = 1; k < e.word.size(); ++k) {
            const std::vector<std::string> a(e.word.begin(), e.word.begin() + static_cast<long>(k));
            const std::vector<std::string> b(e.word.begin() + static_cast<long>(k), e.word.end());
            split |= c.find(word_key(a)) >= 0 && c.find(word_key(b)) >= 0;
        }
        CHECK(is_prime(e, c) == !split);
    }
    CHECK(folded > 0);
}

TEST_CASE("strong regularity")
{
    const auto free = toy_het_fold_free();
    const auto I = interval(R(1, 1000), R(2, 1000));
    const auto c = build_catalog(free, I, {}, 4, 1e-6);
    CHECK(strong_regularity_test(c, I, 1.5, free, 0.05).good);

    // |I| = 1/4 and beta = 1.5 put the floor at exactly 1/8.
    const auto h = toy_het();
    const auto J = interval(R(1, 10), R(7, 20));
    Catalog syn;
    syn.elements.push_back(sq(R(1, 5), R(7, 8), R(1, 8), "s", "u"));
    REQUIRE(is_bicritical(syn.elements[0], J, h, 0.05));
    const auto bad = strong_regularity_test(syn, J, 1.5, h, 0.05);
    CHECK_FALSE(bad.good);
    REQUIRE(bad.witness.has_value());
    Catalog narrow;
    narrow.elements.push_back(sq(R(1, 5), R(7, 8) + R(1, 1000), R(124, 1000), "s", "u"));
    REQUIRE(is_bicritical(narrow.elements[0], J, h, 0.05));
    CHECK(strong_regularity_test(narrow, J, 1.5, h, 0.05).good);
}

TEST_CASE("strong regularity of a first-generation interval matches width re-derivation")
{
    const auto h = toy_het();
    PYParams p;
    const auto I = interval(R(4, 3000), R(5, 3000));
    const double w_min = std::pow(to_double(I.length()), p.beta);
    const auto c = build_catalog(h, I, p, 12, w_min);
    const auto reg = strong_regularity_test(c, I, p.beta, h, p.eta);
    bool oracle_bad = false;
    for (const auto& e : c.elements) {
        if (std::any_of(e.word.begin(), e.word.end(), oracle::is_fold_marker))
            continue;
        const auto pc = oracle::word_piece(h, e.word);
        CHECK(widths(e).first == doctest::Approx(to_double(pc.a1)).epsilon(1e-12));
        CHECK(widths(e).second == doctest::Approx(to_double(pc.b2)).epsilon(1e-12));
        oracle_bad |= oracle::witness_holds(h, e, I, p.beta, p.eta);
    }
    CHECK(reg.good == !oracle_bad);
    if (reg.witness)
        CHECK(oracle::witness_holds(h, *reg.witness, I, p.beta, p.eta));
}

TEST_CASE("exclusion: fold-free family keeps everything")
{
    PYParams p;
    const auto r = run_exclusion(toy_het_fold_free(), p, 3);
    CHECK(r.surviving == p.eps0);
    CHECK(r.excluded == 0);
    CHECK(r.nodes.size() == 1 + 3 + 15 + 15 * children_count(p, 2));
    // Children partition their parents exactly.
    std::map<int, Rational> sum;
    for (const auto& n : r.nodes)
        if (n.parent >= 0)
            sum[n.parent] += n.interval.length();
    for (const auto& [parent, s] : sum)
        CHECK(s == r.nodes[static_cast<std::size_t>(parent)].interval.length());
}

TEST_CASE("exclusion: a Bad root ends the scheme")
{
    PYParams p;
    p.eps0 = R(1, 10);
    p.eta = 0.15;
    p.tau = 0.2;
    p.beta = 1.5;
    const auto r = run_exclusion(toy_het(R(2, 5)), p, 2);
    REQUIRE(r.nodes.size() == 1);
    CHECK(r.nodes[0].interval.status == IntervalStatus::Excluded);
    CHECK(r.surviving == 0);
    CHECK(r.excluded == p.eps0);
    REQUIRE(r.nodes[0].witness.has_value());
    CHECK(oracle::witness_holds(toy_het(R(2, 5)), *r.nodes[0].witness, r.nodes[0].interval, p.beta, p.eta));
}

TEST_CASE("chain width inequality examples")
{
    const auto p = mpy_params();
    ChainWidths w{{0.5, 0.5, 1e-5}, {0.5, 1e-2, 1e-5}};
    CHECK(lemma24_check(w, p, 1.0));
    w.Q[2] = 1e-3;
    CHECK_FALSE(lemma24_check(w, p, 1.0));
    const double C = lemma24_constant(w, p);
    CHECK(lemma24_check(w, p, C));
    CHECK_FALSE(lemma24_check(w, p, C * 0.999));
    CHECK_THROWS_AS(lemma24_check({{0.5}, {0.5, 0.5}}, p, 1.0), ValidationError);
}

TEST_CASE("covering bound, k = 1")
{
    const ChainWidths w{{0.1, 1e-3}, {0.1, 1e-3}};
    const auto b = covering_bound(w, 1.6, 0.1);
    const double e1 = 1e-3 * std::pow(1e-3, 0.45);
    CHECK(b.eps[1] == doctest::Approx(4.4668e-5).epsilon(1e-4));
    CHECK(b.eps[1] == doctest::Approx(e1).epsilon(1e-12));
    const double n1 = std::sqrt(0.1) / e1;
    CHECK(b.bound == doctest::Approx(n1 * std::pow(e1, 1.6) * std::pow(0.1, 0.6) / 0.1).epsilon(1e-10));
    // Direct count: N0 = N1 / (|P0||Q0|) squares of side eps0 = eps1 |P0|.
    const double n0 = n1 / (0.1 * 0.1), e0 = e1 * 0.1;
    CHECK(b.bound == doctest::Approx(n0 * std::pow(e0, 1.6)).epsilon(1e-10));
    CHECK(b.eps0_scale == doctest::Approx(e0).epsilon(1e-12));
    const auto area = covering_bound(w, 2.0, 0.1);
    CHECK(area.bound == doctest::Approx(n0 * e0 * e0).epsilon(1e-10));
    CHECK(area.bound <= w.P[0]);
}

TEST_CASE("covering bound: compatibility violation names the index")
{
    try {
        covering_bound({{0.1, 0.5}, {1e-4, 0.5}}, 1.5, 0.1);
        FAIL("expected a compatibility violation");
    } catch (const CompatibilityViolation& e) {
        CHECK(e.index() == 0);
    }
}

TEST_CASE("property: covering bound is non-increasing in d")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-6.0, -1.0);
    int tested = 0;
    for (int i = 0; i < 400 && tested < 100; ++i) {
        ChainWidths w;
        for (int j = 0; j < 3; ++j) {
            w.P.push_back(std::pow(10.0, u(rng)));
            w.Q.push_back(std::pow(10.0, u(rng)));
        }
        try {
            double prev = INFINITY;
            for (double d = 1.0; d <= 2.0; d += 0.1) {
                const double b = covering_bound(w, d, 0.05).bound;
                CHECK(b <= prev * (1 + 1e-12));
                prev = b;
            }
            ++tested;
        } catch (const CompatibilityViolation&) {
        }
    }
    CHECK(tested >= 20);
}

TEST_CASE("exceptional dimension bound")
{
    const auto p = mpy_params();
    const auto a = exceptional_dimension_bound(0.52, 0.52, p);
    REQUIRE(a.feasible);
    CHECK(a.d_minus == doctest::Approx(0.06));
    CHECK(a.from_floor == doctest::Approx(22.0 / 15.0));
    CHECK(a.from_dstar == doctest::Approx(1.3733).epsilon(1e-4));
    CHECK(a.from_beta == doctest::Approx(1.5153).epsilon(1e-4));
    CHECK(a.d == doctest::Approx(1.5153).epsilon(1e-4));
    const auto b = exceptional_dimension_bound(0.61, 0.61, p);
    CHECK_FALSE(b.feasible);
    CHECK(b.d_minus == doctest::Approx(0.24));
    PYParams lim = p;
    lim.eta = 1e-12;
    const auto c = exceptional_dimension_bound(0.5, 0.5, lim);
    CHECK(c.d == doctest::Approx(std::max({22.0 / 15.0, 4.0 / 3.0, 1.0 + 1.0 / lim.beta_tilde()})).epsilon(1e-5));
}

TEST_CASE("property: bound below 2 inside the constraint region")
{
    for (double eta : {0.0, 0.01, 0.05})
        for (double beta : {1.5, 2.0, 3.0}) {
            PYParams p;
            p.eta = eta;
            p.tau = 0.06;
            p.beta = beta;
            for (int i = 0; i <= 20; ++i)
                for (int j = 0; j <= 20; ++j) {
                    const double ds = i / 20.0, du = j / 20.0;
                    const auto r = exceptional_dimension_bound(ds, du, p);
                    const double dm = ds + du - 1 + 2 * eta;
                    if (dm >= 0.2)
                        CHECK_FALSE(r.feasible);
                    else if (ds + du < 1.2 - 2 * eta && p.beta_tilde() * (1 - eta) > 1.0 &&
                             1.0 + 1.0 / (p.beta_tilde() * (1 - eta)) < 2.0 - 1e-6)
                        CHECK(r.feasible);
                    if (r.feasible)
                        CHECK(r.d < 2.0);
                }
        }
}

TEST_CASE("chains: fold-free family has none")
{
    const auto h = toy_het_fold_free();
    const auto I = interval(R(1, 1000), R(2, 1000));
    const auto c = build_catalog(h, I, {}, 6, 1e-6);
    CHECK(enumerate_admissible_chains(c, h, {}, 1, 100).chains.empty());
}

TEST_CASE("chains on a depth-6 catalog pass the finer geometric re-check")
{
    const auto h = toy_het();
    const auto& g = *h.fold;
    PYParams p;
    const auto I = interval(R(1, 1000), R(2, 1000));
    const auto c = build_catalog(h, I, p, 6, 1e-6);
    const auto r = enumerate_admissible_chains(c, h, p, 1, 1000);
    REQUIRE(!r.chains.empty());
    std::size_t total = 0;
    for (const auto& [ends, v] : r.endpoint_counts)
        total += v.first;
    CHECK(total == r.chains.size());
    const double h2 = g.half_width * g.half_width;
    for (const auto& ch : r.chains) {
        const auto& e0 = c.elements[ch.elements[0]];
        const auto& e1 = c.elements[ch.elements[1]];
        CHECK(e0.source() == g.to);
        CHECK(e0.target() == g.from);
        CHECK(lemma24_check(ch.widths, p, r.fitted_C));
        // Children of e1 at height 1/2, from exact pieces.
        std::vector<std::pair<double, double>> kids;
        for (const auto& t : h.transitions)
            if (t.from == e1.target()) {
                auto w = e1.word;
                w.push_back(t.label);
                const auto pc = oracle::word_piece(h, w);
                kids.emplace_back(oracle::lo_of(pc.a0, pc.a1), oracle::hi_of(pc.a0, pc.a1));
            }
        std::sort(kids.begin(), kids.end());
        const double gap_lo = kids[0].second, gap_hi = kids[1].first;
        REQUIRE(gap_lo < gap_hi);
        const auto q = oracle::word_piece(h, e0.word);
        const double q_lo = oracle::lo_of(q.b0, q.b2), q_hi = oracle::hi_of(q.b0, q.b2);
        // Some tenth of I carries a parabola x = t - b q - s^2, |s| <= h, into the gap.
        bool hit = false;
        for (int k = 0; k < 10 && !hit; ++k) {
            const double t0 = to_double(I.lo + I.length() * k / 10), t1 = to_double(I.lo + I.length() * (k + 1) / 10);
            const double right = t1 - g.b * q_lo, left = t0 - g.b * q_hi - h2;
            hit = right > gap_lo && left < gap_hi;
        }
        CHECK(hit);
    }
}

TEST_CASE("critical sums")
{
    const auto h = toy_het();
    const auto I = interval(R(1, 1000), R(2, 1000));
    const auto c = build_catalog(h, I, {}, 6, 1e-6);
    const auto counts = critical_sum(c, 0.0, h, 0.05);
    std::vector<double> expect(6, 0.0);
    for (const auto& e : c.elements)
        if (oracle::criticality(h, e.word, I, 0.05).q)
            expect[static_cast<std::size_t>(e.n - 1)] += 1.0;
    for (std::size_t n = 1; n < 6; ++n)
        expect[n] += expect[n - 1];
    CHECK(counts.partial == expect);
    for (std::size_t n = 1; n < 6; ++n)
        CHECK(counts.partial[n] >= counts.partial[n - 1]);

    const auto free = toy_het_fold_free();
    const auto zero = critical_sum(build_catalog(free, I, {}, 6, 1e-6), 0.5, free, 0.05);
    for (double v : zero.partial)
        CHECK(v == 0.0);
    CHECK_THROWS_AS(critical_sum(c, -1.0, h, 0.05), ValidationError);
}
