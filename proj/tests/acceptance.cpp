// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cli.hpp"
#include "fdyn/fractal.hpp"
#include "fdyn/models.hpp"
#include "fdyn/py_scheme.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fdyn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string run_cli(std::vector<std::string> args, int& code)
{
    args.insert(args.begin(), "fdyn-cli");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str();
}

// --- 1 ---------------------------------------------------------------------

void ternary_basics(Outcome& o)
{
    const double exact = std::log(2.0) / std::log(3.0);
    const auto t0 = Clock::now();
    const auto d = hausdorff_dimension(ternary(), 1e-6);
    const double secs = seconds_since(t0);
    o.detail << "dim [" << fmt(d.lower) << ", " << fmt(d.upper) << "] in " << fmt(secs) << " s; ";
    o.require(d.lower <= exact && exact <= d.upper, "bracket contains log2/log3");
    o.require(d.upper - d.lower <= 1e-6, "width <= 1e-6");
    o.require(secs <= 1.0, "within 1 s");
    for (std::size_t depth : {2u, 3u, 6u}) {
        const auto th = thickness(ternary(), depth);
        o.detail << "thickness(" << depth << ") [" << fmt(th.lower) << ", " << fmt(th.upper) << "] ";
        o.require(std::fabs(th.lower - 1.0) <= 1e-12 && std::fabs(th.upper - 1.0) <= 1e-12, "thickness [1,1]");
    }
}

// --- 2 ---------------------------------------------------------------------

void moran_closed_forms(Outcome& o)
{
    const std::vector<std::pair<std::string, std::pair<CantorSystem, double>>> cases{
        {"middle-1/5", {middle_alpha(Rational(1, 5)), std::log(2.0) / std::log(2.5)}},
        {"ratios 1/2,1/4", {markov_golden(), std::log2((1.0 + std::sqrt(5.0)) / 2.0)}}};
    for (const auto& [name, c] : cases) {
        const auto& [k, exact] = c;
        const auto d = hausdorff_dimension(k, 1e-9);
        o.detail << name << " [" << fmt(d.lower) << ", " << fmt(d.upper) << "] vs " << fmt(exact) << "; ";
        o.require(d.lower >= exact - 1e-8 && d.upper <= exact + 1e-8, name + " within 1e-8");
        o.require(d.lower <= exact && exact <= d.upper, name + " bracket contains the closed form");
    }
}

// --- 3 ---------------------------------------------------------------------

// Some pair of depth-n cylinders of K and K' meets (exact endpoints, two-pointer sweep).
bool cylinders_meet(const CantorSystem& k, const CantorSystem& kp, std::size_t depth)
{
    const auto a = refine(k, depth);
    const auto b = refine(kp, depth);
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const auto& [alo, ahi] = *a[i].exact;
        const auto& [blo, bhi] = *b[j].exact;
        if (alo <= bhi && blo <= ahi)
            return true;
        if (ahi < bhi)
            ++i;
        else
            ++j;
    }
    return false;
}

void gap_lemma(Outcome& o)
{
    std::mt19937 rng(20240611);
    std::uniform_int_distribution<int> alpha_pct(5, 32);  // middle-alpha, alpha < 1/3
    std::uniform_int_distribution<int> scale_pct(50, 200);
    std::uniform_int_distribution<int> shift_permille(-2000, 1000);
    int pairs = 0, intersect = 0, confirmed = 0;
    while (pairs < 100) {
        const Rational a(alpha_pct(rng), 100), ap(alpha_pct(rng), 100);
        const Rational s(scale_pct(rng), 100), c(shift_permille(rng), 1000);
        // Hulls [0,1] and [c, c+s]: overlapping, neither inside the other.
        const bool hull_linked = c < 1 && c + s > 0 && !(c >= 0 && c + s <= 1) && !(c <= 0 && c + s >= 1);
        if (!hull_linked)
            continue;
        const auto k = middle_alpha(a);
        const auto kp = transform(middle_alpha(ap), s, c);
        // Closed-form thickness of middle-alpha: (1 - alpha) / (2 alpha).
        const Rational tau = (1 - a) / (2 * a), taup = (1 - ap) / (2 * ap);
        const double certified = thickness(k, 8).lower * thickness(kp, 8).lower;
        ++pairs;
        if (!(tau * taup > 1) || !(certified > 1.0) || !linked(k, kp)) {
            o.require(false, "pair " + std::to_string(pairs) + " (alpha " + to_string(a) + ", " + to_string(ap) +
                                 ", scale " + to_string(s) + ", shift " + to_string(c) + ", certified " + fmt(certified) +
                                 ") is not a certified thick linked pair");
            continue;
        }
        const auto cls = gap_lemma_classify(k, kp, 12);
        intersect += cls == GapLemmaOutcome::Intersect;
        confirmed += cylinders_meet(k, kp, 12);
        if (cls != GapLemmaOutcome::Intersect)
            o.require(false, "pair " + std::to_string(pairs) + " classified " + to_string(cls));
    }
    o.detail << intersect << "/100 Intersect, " << confirmed << "/100 confirmed by depth-12 cylinder pairs; ";
    o.require(confirmed == 100, "brute-force oracle confirms every pair");
    const auto thin = gap_lemma_classify(ternary(), transform(ternary(), Rational(1), Rational(1, 2)), 12);
    o.detail << "ternary pair: " << to_string(thin);
    o.require(thin == GapLemmaOutcome::InconclusiveThin, "ternary pair InconclusiveThin");
}

// --- 4 ---------------------------------------------------------------------

void arithmetic_differences(Outcome& o)
{
    const auto r = arithmetic_difference(ternary(), ternary(), 1.0, 8);
    o.detail << "ternary: " << r.cover.size() << " piece(s), measure " << fmt(r.measure) << "; ";
    o.require(r.cover.size() == 1 && r.cover[0].lo() <= -1.0 && r.cover[0].hi() >= 1.0 &&
                  r.cover[0].lo() >= -1.0 - 1e-12 && r.cover[0].hi() <= 1.0 + 1e-12,
              "cover is [-1,1]");
    o.require(std::fabs(r.measure - 2.0) <= 1e-3, "measure 2 +- 1e-3");
    o.require(r.contains_interval, "contains_interval");
    const auto k = middle_alpha(Rational(3, 5));
    for (std::size_t n = 4; n <= 10; ++n) {
        const double m = arithmetic_difference(k, k, 1.0, n).measure;
        const double cap = 2.0 * std::pow(0.8, static_cast<double>(n));
        if (n == 4 || n == 10)
            o.detail << "middle-0.6 n=" << n << ": " << fmt(m) << " <= " << fmt(cap) << "; ";
        o.require(m <= cap, "middle-0.6 measure at n=" + std::to_string(n));
    }
}

// --- 5 ---------------------------------------------------------------------

void tangency_density(Outcome& o)
{
    const auto k = middle_alpha(Rational(3, 5));
    std::vector<double> d;
    for (double t : {1e-3, 1e-4, 1e-5}) {
        d.push_back(tangency_parameter_density(k, k, 1.0, t, 10000));
        o.detail << "t=" << fmt(t) << ": " << fmt(d.back()) << "; ";
    }
    o.require(d[0] > d[1] && d[1] > d[2], "strictly decreasing");
    o.require(d[2] < 0.1, "final value < 0.1");
}

// --- 6 ---------------------------------------------------------------------

void marstrand(Outcome& o)
{
    const auto fat = middle_alpha(Rational(1, 5));
    const auto s = marstrand_scan(fat, fat, default_lambda_grid(), 10);
    std::size_t above = 0;
    for (const auto& r : s.records)
        above += r.measure_lower > 0.1;
    o.detail << "middle-1/5: " << above << "/" << s.records.size() << " above 0.1; ";
    o.require(10 * above >= 8 * s.records.size(), ">= 80% of the grid above 0.1");

    const auto thin = middle_alpha(Rational(3, 5));
    const auto t = marstrand_scan(thin, thin, default_lambda_grid(), 10);
    double worst = 0.0, at = 0.0;
    for (const auto& r : t.records) {
        if (r.lambda == 1.0)
            o.detail << "middle-0.6 at lambda 1: " << fmt(r.measure_upper) << "; ";
        if (r.measure_upper > worst) {
            worst = r.measure_upper;
            at = r.lambda;
        }
    }
    o.detail << "middle-0.6: largest upper measure at depth 10 is " << fmt(worst) << " at lambda " << fmt(at) << "; ";
    o.require(worst < 1e-2, "middle-0.6 upper measures < 1e-2 at depth 10");
}

// --- 7 ---------------------------------------------------------------------

void py_condition_values(Outcome& o)
{
    const Rational b(3, 5);
    // Boundary: (6/5)^2 + (3/5)^2 = 9/5 = 6/5 + 3/5, so the strict inequality fails.
    o.require((2 * b) * (2 * b) + b * b == 2 * b + b, "oracle: equality at (3/5, 3/5)");
    o.require(!py_condition(b, b), "false at the boundary point");
    o.require(py_condition(b - Rational(1, 1000000000), b - Rational(1, 1000000000)), "true just inside");
    o.require(py_condition(0.4, 0.4), "true at (0.4, 0.4)");
    o.require(py_condition(0.55, 0.55), "true at (0.55, 0.55)");
    o.require(!py_condition(0.7, 0.7), "false at (0.7, 0.7)");
    o.detail << "(3/5,3/5) boundary, (0.4,0.4) and (0.55,0.55) inside, (0.7,0.7) outside";
}

// --- 8 ---------------------------------------------------------------------

AffinePiece random_piece(std::mt19937& rng)
{
    std::uniform_int_distribution<int> num(1, 450); // the cone needs slopes below 1/2
    std::uniform_int_distribution<int> pos(0, 1000);
    const Rational s1(num(rng), 1000), s2(num(rng), 1000);
    return AffinePiece{(1 - s1) * Rational(pos(rng), 1000), s1, 0, (1 - s2) * Rational(pos(rng), 1000), 0, s2};
}

void width_laws(Outcome& o)
{
    std::mt19937 rng(99);
    int exact = 0;
    for (int i = 0; i < 1000; ++i) {
        const AffinePiece a = random_piece(rng), b = random_piece(rng);
        const auto ea = make_affine_element(a, "r", "r", 1, {"a"}, {});
        const auto eb = make_affine_element(b, "r", "r", 1, {"b"}, {});
        const auto c = simple_compose(ea, eb, {});
        const auto& p = std::get<AffinePiece>(c.rep.form);
        exact += p == oracle::chain(a, b) && p.a1 == a.a1 * b.a1 && p.b2 == a.b2 * b.b2;
    }
    o.detail << exact << "/1000 exact affine products; ";
    o.require(exact == 1000, "affine simple composition is an exact product");

    const auto [k1, k2] = parabolic_kappa(ConeParams{});
    std::uniform_int_distribution<int> width(20, 200); // widths in [0.02, 0.2]
    std::uniform_int_distribution<int> offset(0, 1000);
    std::uniform_int_distribution<int> delta_pm(10, 150);
    int admissible = 0, inside = 0;
    double lo = INFINITY, hi = 0.0;
    while (admissible < 100) {
        const Rational p0(width(rng), 1000), q0(width(rng), 1000), p1(width(rng), 1000);
        const Rational q0_lo = (1 - q0) * Rational(offset(rng), 1000);
        const Rational p1_lo = (Rational(1, 2) - p1) * Rational(offset(rng), 1000);
        FoldingModel g;
        g.b = 0.1;
        g.half_width = 0.45;
        const double delta = delta_pm(rng) / 1000.0;
        g.t = Interval(delta + 0.1 * to_double(q0_lo + q0) + to_double(p1_lo + p1));
        const auto f0 = make_affine_element(AffinePiece{(1 - p0) / 2, p0, 0, q0_lo, 0, q0}, "u", "u", 1, {"a"}, {});
        const auto f1 = make_affine_element(AffinePiece{p1_lo, p1, 0, 0, 0, Rational(1, 10)}, "s", "s", 1, {"b"}, {});
        ParabolicResult res;
        try {
            res = parabolic_compose(f0, g, f1, {});
        } catch (const CompositionError&) {
            continue;
        }
        if (!res.possible)
            continue;
        ++admissible;
        const double d = parabolic_delta(f0, g, f1).lo();
        bool ok = true;
        for (const auto* e : {&*res.minus, &*res.plus}) {
            const double ratio = widths(*e).first * std::sqrt(d) / (to_double(p0) * to_double(p1));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            ok &= ratio >= k1 && ratio <= k2;
        }
        inside += ok;
    }
    o.detail << inside << "/100 parabolic triples with ratio in [" << fmt(k1) << ", " << fmt(k2) << "], observed ["
             << fmt(lo) << ", " << fmt(hi) << "]";
    o.require(inside == 100, "parabolic width ratio inside the reported bracket");
}

// --- 9 ---------------------------------------------------------------------

void exclusion(Outcome& o)
{
    PYParams p; // eps0 = 1e-3, eta = 0.05, tau = 0.2, beta = 1.5
    o.require(p.beta_tilde() > 1.0, "beta_tilde > 1");
    const auto free = run_exclusion(toy_het_fold_free(), p, 3);
    o.detail << "fold-free: " << free.generations << " generations, excluded " << to_string(free.excluded) << "; ";
    o.require(free.generations == 3 && free.excluded == 0 && free.surviving == p.eps0, "fold-free keeps full measure");

    const auto h = toy_het();
    const auto t0 = Clock::now();
    const auto r = run_exclusion(h, p, 2);
    const double secs = seconds_since(t0);
    const double fraction = to_double(r.surviving / p.eps0);
    std::size_t excluded = 0, verified = 0;
    for (const auto& n : r.nodes) {
        if (n.interval.status != IntervalStatus::Excluded)
            continue;
        ++excluded;
        verified += n.witness && oracle::witness_holds(h, *n.witness, n.interval, p.beta, p.eta);
    }
    o.detail << "toy: surviving fraction " << fmt(fraction) << ", " << verified << "/" << excluded
             << " witnesses re-verified, " << fmt(secs) << " s";
    o.require(verified == excluded, "every exclusion has a re-verified witness");
    o.require(secs <= 300.0, "within 5 min single-threaded");
    o.require(fraction >= 0.9, "surviving fraction >= 0.9");
}

// --- 10 --------------------------------------------------------------------

void covering(Outcome& o)
{
    const auto h = toy_het();
    PYParams p;
    const ParameterInterval I{p.eps0, 2 * p.eps0, 0, IntervalStatus::Candidate};
    const auto cat = build_catalog(h, I, p, 12, 1e-7);
    const auto ch = enumerate_admissible_chains(cat, h, p, 2, 100);
    std::size_t lemma = 0, defined = 0, below = 0;
    for (const auto& c : ch.chains) {
        lemma += lemma24_check(c.widths, p, ch.fitted_C);
        try {
            const auto cb = covering_bound(c.widths, 2.0, p.eta);
            ++defined;
            below += cb.bound <= c.widths.P[0];
        } catch (const CompatibilityViolation&) {
        }
    }
    o.detail << ch.chains.size() << " chains, lemma holds on " << lemma << " with C = " << fmt(ch.fitted_C) << "; d=2 bound <= |P0| on "
             << below << "/" << defined << " compatible chains; ";
    o.require(ch.chains.size() == 100, "100 chains harvested");
    o.require(lemma == ch.chains.size(), "lemma check with the fitted constant");
    o.require(defined > 0 && below == defined, "covering bound at d = 2 within the initial strip");

    PYParams mpy;
    mpy.eta = 0.01;
    mpy.tau = 0.01;
    mpy.beta = 2.0;
    const auto good = exceptional_dimension_bound(0.52, 0.52, mpy);
    const auto bad = exceptional_dimension_bound(0.61, 0.61, mpy);
    o.detail << "bound(0.52) = " << fmt(good.d) << ", bound(0.61) " << (bad.feasible ? "feasible" : "infeasible");
    o.require(good.feasible && std::fabs(good.d - 1.515) <= 1e-3 && good.d < 2.0, "d ~ 1.515 < 2");
    o.require(!bad.feasible, "infeasible at 0.61");
}

// --- 11 --------------------------------------------------------------------

void sinks(Outcome& o)
{
    const auto s = detect_sink(PlaneMap{"limit", 0.0}, 0.0, Box{-0.5, 0.5, -0.5, 0.5}, 4, 500);
    o.require(s && s->period == 1 && std::fabs(s->orbit[0][0]) < 1e-9 && std::fabs(s->orbit[0][1]) < 1e-9,
              "limit map: attracting fixed point at (0,0)");
    o.require(!detect_sink(PlaneMap{"limit", 0.0}, 0.0, Box{0.9, 1.1, 0.9, 1.1}, 4, 500), "limit map: none at (1,1)");
    int found = 0;
    for (int i = 0; i <= 60; ++i) {
        const double mu = -0.3 + 0.01 * i;
        found += detect_sink(PlaneMap{"toy_return", 0.1}, mu, Box{-2, 2, -2, 2}, 8, 2000).has_value();
    }
    o.detail << "limit sink at (0,0): " << (s ? "yes" : "no") << "; toy scan: " << found << "/61 parameters with a sink";
    o.require(found >= 1, "toy scan finds a sink");
}

// --- 12 --------------------------------------------------------------------

void determinism(Outcome& o)
{
    const std::vector<std::vector<std::string>> commands{
        {"cantor", "dim", "--model", "ternary"},
        {"cantor", "thickness", "--model", "ternary", "--depth", "6"},
        {"cantor", "diff", "--model", "ternary", "--depth", "8"},
        {"cantor", "diff", "--model", "middle_0.6", "--depth", "10"},
        {"scan", "marstrand", "--model", "middle_fifth", "--depth", "10"},
        {"scan", "marstrand", "--model", "middle_0.6", "--depth", "10"},
        {"scan", "tangency-density", "--model", "middle_0.6", "--samples", "10000"},
        {"horseshoe", "sink-scan"},
        {"horseshoe", "sink-scan", "--map", "limit", "--box", "-0.5,0.5,-0.5,0.5", "--mu-min", "0", "--mu-max", "0",
         "--steps", "1"},
        {"py", "exclude", "--model", "toy_het_fold_free", "--generations", "3"},
        {"py", "exclude", "--model", "toy_het"},
        {"py", "chains"},
        {"py", "mpy-bound", "--ds", "0.52", "--du", "0.52", "--eta", "0.01", "--tau", "0.01", "--beta", "2"}};
    std::size_t same = 0;
    for (const auto& cmd : commands) {
        std::vector<std::string> reports;
        bool ok = true;
        for (const char* threads : {"1", "4", "8"}) {
            auto args = cmd;
            args.insert(args.end(), {"--threads", threads});
            int code = 0;
            reports.push_back(run_cli(args, code));
            ok &= code == 0;
        }
        std::string name;
        for (std::size_t i = 0; i < 2; ++i)
            name += (i ? " " : "") + cmd[i];
        if (ok && reports[0] == reports[1] && reports[0] == reports[2])
            ++same;
        else
            o.require(false, name + " differs or fails");
    }
    o.detail << same << "/" << commands.size() << " reports byte-identical at 1, 4 and 8 threads";
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"ternary dimension and thickness", ternary_basics},
        {"Moran closed forms", moran_closed_forms},
        {"gap lemma on thick linked pairs", gap_lemma},
        {"arithmetic differences", arithmetic_differences},
        {"tangency density, thin pair", tangency_density},
        {"Marstrand regime split", marstrand},
        {"dimension condition values", py_condition_values},
        {"width laws", width_laws},
        {"exclusion scheme", exclusion},
        {"covering estimator and dimension bound", covering},
        {"sink detection", sinks},
        {"determinism across thread counts", determinism}};
    // Optional arguments pick criteria by number.
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int i = std::atoi(argv[a]);
        if (i < 1 || i > static_cast<int>(criteria.size())) {
            std::cerr << "unknown criterion " << argv[a] << "\n";
            return 2;
        }
        selected[static_cast<std::size_t>(i - 1)] = true;
    }
    int failed = 0, run = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i])
            continue;
        ++run;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " C" << i + 1 << " " << criteria[i].first << " (" << fmt(seconds_since(t0))
                  << " s): " << o.detail.str() << std::endl;
    }
    std::cout << (run - failed) << "/" << run << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
