#include "cli.hpp"

#include "fdyn/cantor_io.hpp"
#include "fdyn/fractal.hpp"
#include "fdyn/models.hpp"
#include "fdyn/py_scheme.hpp"
#include "fdyn/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>

namespace fdyn::cli {

namespace {

struct Opts {
    std::string model;
    std::string model2;
    std::size_t depth = 8;
    double tol = 1e-6;
    double eta = 0.05;
    double tau = 0.2;
    double beta = 1.5;
    std::string eps0 = "1/1000";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    bool timestamp = false;

    double lambda = 1.0;
    double floor = 0.1;
    double c = 1.0;
    std::vector<double> ts{1e-3, 1e-4, 1e-5};
    std::size_t samples = 200;

    int grid = 16;
    double cone_lambda = 2.0;
    bool include_fold = false;

    std::string map = "toy_return";
    double b = 0.1;
    double mu_min = -0.3;
    double mu_max = 0.3;
    int steps = 61;
    std::vector<double> box{-2.0, 2.0, -2.0, 2.0};
    int max_period = 8;
    int iters = 2000;
    int seeds = 8;

    std::string lo;
    std::string hi;
    int n_max = 0;
    double w_min = 0.0;
    std::size_t max_elements = 200000;
    int generations = 2;
    int k = 2;
    std::size_t budget = 100;
    double ds = 0.0;
    double du = 0.0;
};

void common(CLI::App* a, Opts& o)
{
    a->add_option("--model", o.model, "model name or JSON file")->envname("FDYN_MODEL");
    a->add_option("--depth", o.depth, "refinement depth")->envname("FDYN_DEPTH");
    a->add_option("--tol", o.tol, "tolerance")->envname("FDYN_TOL")->check(CLI::PositiveNumber);
    a->add_option("--eta", o.eta, "criticality exponent eta")->envname("FDYN_ETA");
    a->add_option("--tau", o.tau, "scale exponent tau")->envname("FDYN_TAU");
    a->add_option("--beta", o.beta, "regularity exponent beta")->envname("FDYN_BETA");
    a->add_option("--eps0", o.eps0, "initial scale eps0 (exact decimal or p/q)")->envname("FDYN_EPS0");
    a->add_option("--seed", o.seed, "seed (echoed; no command draws random numbers)")->envname("FDYN_SEED");
    a->add_option("--threads", o.threads, "worker threads")->envname("FDYN_THREADS")->check(CLI::PositiveNumber);
    a->add_option("--out", o.out, "output file (.csv for the table, otherwise JSON)")->envname("FDYN_OUT");
    a->add_flag("--timestamp", o.timestamp, "add a timestamp to the report");
}

PYParams py_params(const Opts& o)
{
    PYParams p;
    p.eps0 = parse_rational(o.eps0);
    p.eta = o.eta;
    p.tau = o.tau;
    p.beta = o.beta;
    return p;
}

Report make(const std::string& command, const Opts& o, ojson config)
{
    Report r;
    r.command = command;
    r.config = std::move(config);
    r.config["seed"] = o.seed;
    r.timestamp = o.timestamp;
    return r;
}

ParameterInterval interval_from(const Opts& o, const PYParams& p)
{
    ParameterInterval I;
    I.lo = o.lo.empty() ? p.eps0 : parse_rational(o.lo);
    I.hi = o.hi.empty() ? 2 * p.eps0 : parse_rational(o.hi);
    if (!(I.lo < I.hi))
        throw ValidationError("parameter interval needs lo < hi");
    return I;
}

std::string need_model(const Opts& o, const std::string& fallback = "")
{
    if (!o.model.empty())
        return o.model;
    if (fallback.empty())
        throw ValidationError("--model is required");
    return fallback;
}

// --- cantor -----------------------------------------------------------------

Report cantor_dim(const Opts& o)
{
    const auto name = need_model(o);
    const auto k = resolve_cantor(name);
    const auto b = hausdorff_dimension(k, o.tol);
    Report r = make("cantor dim", o, {{"model", name}, {"tol", num(o.tol)}});
    r.result = {{"dimension", bracket_json(b)}};
    return r;
}

Report cantor_thickness(const Opts& o)
{
    const auto name = need_model(o);
    const auto t = thickness(resolve_cantor(name), o.depth);
    Report r = make("cantor thickness", o, {{"model", name}, {"depth", o.depth}});
    r.result = {{"lower", num(t.lower)}, {"upper", num(t.upper)}, {"depth_used", t.depth_used}};
    return r;
}

Report cantor_gaps(const Opts& o)
{
    const auto name = need_model(o);
    const auto g = gaps(resolve_cantor(name), o.depth);
    Report r = make("cantor gaps", o, {{"model", name}, {"depth", o.depth}});
    Table t;
    t.columns = {"generation", "left", "right", "length"};
    for (const auto& gap : g.bounded)
        t.rows.push_back({gap.generation, num(gap.left.mid()), num(gap.right.mid()), num(gap.length().mid())});
    r.result = {{"bounded_gaps", g.bounded.size()}};
    r.table = std::move(t);
    return r;
}

Report cantor_diff(const Opts& o)
{
    const auto name = need_model(o);
    const auto name2 = o.model2.empty() ? name : o.model2;
    const auto d = arithmetic_difference(resolve_cantor(name), resolve_cantor(name2), o.lambda, o.depth, o.threads);
    Report r = make("cantor diff", o,
                    {{"model", name}, {"model2", name2}, {"lambda", num(o.lambda)}, {"depth", o.depth}});
    Table t;
    t.columns = {"lo", "hi"};
    for (const auto& c : d.cover)
        t.rows.push_back({num(c.lo()), num(c.hi())});
    r.result = {{"measure", num(d.measure)}, {"contains_interval", d.contains_interval}, {"pieces", d.cover.size()}};
    r.table = std::move(t);
    return r;
}

// --- scan -------------------------------------------------------------------

Report scan_marstrand(const Opts& o)
{
    const auto name = need_model(o);
    const auto name2 = o.model2.empty() ? name : o.model2;
    const auto s = marstrand_scan(resolve_cantor(name), resolve_cantor(name2), default_lambda_grid(), o.depth,
                                  o.threads, o.floor);
    Report r = make("scan marstrand", o,
                    {{"model", name}, {"model2", name2}, {"depth", o.depth}, {"floor", num(o.floor)}});
    Table t;
    t.columns = {"lambda", "depth", "measure_lower", "measure_upper", "measure_lower_prev"};
    for (const auto& rec : s.records)
        t.rows.push_back(
            {num(rec.lambda), rec.depth, num(rec.measure_lower), num(rec.measure_upper), num(rec.measure_lower_prev)});
    r.result = {{"dim_model", bracket_json(s.dim_k)}, {"dim_model2", bracket_json(s.dim_kp)}, {"fat", s.fat}};
    r.result["fraction_above_floor"] = s.fraction_above_floor ? num(*s.fraction_above_floor) : ojson(nullptr);
    r.table = std::move(t);
    return r;
}

Report scan_tangency(const Opts& o)
{
    const auto name = need_model(o);
    const auto name2 = o.model2.empty() ? name : o.model2;
    const auto k = resolve_cantor(name);
    const auto kp = resolve_cantor(name2);
    ojson ts = ojson::array();
    for (double t : o.ts)
        ts.push_back(num(t));
    Report r = make("scan tangency-density", o,
                    {{"model", name}, {"model2", name2}, {"c", num(o.c)}, {"t", ts}, {"samples", o.samples}});
    Table t;
    t.columns = {"t", "c", "samples", "density"};
    for (double x : o.ts)
        t.rows.push_back(
            {num(x), num(o.c), o.samples, num(tangency_parameter_density(k, kp, o.c, x, o.samples, o.threads))});
    r.table = std::move(t);
    return r;
}

// --- horseshoe --------------------------------------------------------------

Report horseshoe_dims(const Opts& o)
{
    const auto name = need_model(o, "toy_het_fold_free");
    const auto d = stable_unstable_dimensions(resolve_horseshoe(name), o.tol, o.depth);
    Report r = make("horseshoe dims", o, {{"model", name}, {"tol", num(o.tol)}, {"depth", o.depth}});
    Table t;
    t.columns = {"eps", "count"};
    for (const auto& [eps, n] : d.box.counts)
        t.rows.push_back({num(eps), num(n)});
    r.result = {{"d_s", bracket_json(d.ds)},
                {"d_u", bracket_json(d.du)},
                {"sum", interval_json(join(Interval(d.ds.lower) + Interval(d.du.lower),
                                           Interval(d.ds.upper) + Interval(d.du.upper)))},
                {"box_counting_slope", num(d.box.slope)}};
    r.table = std::move(t);
    return r;
}

Report horseshoe_conefield(const Opts& o)
{
    const auto name = need_model(o, "toy_het_fold_free");
    const auto h = resolve_horseshoe(name);
    ConeParams p = h.cone;
    p.lambda = o.cone_lambda;
    const bool ok = verify_hyperbolic_conefield(h, o.grid, p, o.include_fold);
    Report r = make("horseshoe conefield", o,
                    {{"model", name}, {"grid", o.grid}, {"lambda", num(o.cone_lambda)}, {"include_fold", o.include_fold}});
    r.result = {{"invariant", ok}};
    return r;
}

Report horseshoe_sinks(const Opts& o)
{
    if (o.box.size() != 4)
        throw ValidationError("--box needs x0,x1,y0,y1");
    if (o.steps < 1)
        throw ValidationError("--steps must be >= 1");
    const PlaneMap m{o.map, o.b};
    const Box box{o.box[0], o.box[1], o.box[2], o.box[3]};
    ojson bj = ojson::array();
    for (double v : o.box)
        bj.push_back(num(v));
    Report r = make("horseshoe sink-scan", o,
                    {{"map", o.map},
                     {"b", num(o.b)},
                     {"mu_min", num(o.mu_min)},
                     {"mu_max", num(o.mu_max)},
                     {"steps", o.steps},
                     {"box", bj},
                     {"max_period", o.max_period},
                     {"iters", o.iters},
                     {"seeds", o.seeds}});
    Table t;
    t.columns = {"mu", "period", "x", "y", "det_lo", "det_hi", "trace_lo", "trace_hi"};
    std::size_t found = 0;
    for (int i = 0; i < o.steps; ++i) {
        const double mu = o.steps == 1 ? o.mu_min : o.mu_min + (o.mu_max - o.mu_min) * i / (o.steps - 1);
        const auto s = detect_sink(m, mu, box, o.max_period, o.iters, o.seeds, o.threads);
        if (!s) {
            t.rows.push_back({num(mu), 0, "", "", "", "", "", ""});
            continue;
        }
        ++found;
        t.rows.push_back({num(mu), s->period, num(s->orbit[0][0]), num(s->orbit[0][1]), num(s->det.lo()),
                          num(s->det.hi()), num(s->trace.lo()), num(s->trace.hi())});
    }
    r.result = {{"parameters", o.steps}, {"with_sink", found}};
    r.table = std::move(t);
    return r;
}

// --- py ---------------------------------------------------------------------

ojson py_config(const std::string& model, const PYParams& p)
{
    ojson c = params_json(p);
    c["model"] = model;
    return c;
}

Report py_catalog(const Opts& o)
{
    const auto name = need_model(o, "toy_het");
    const auto h = resolve_horseshoe(name);
    const auto p = py_params(o);
    const auto I = interval_from(o, p);
    const double w_min = o.w_min > 0 ? o.w_min : pow(Interval(to_double_down(I.length())), p.beta).lo();
    const int n_max = o.n_max > 0 ? o.n_max : 6;
    const auto cat = build_catalog(h, I, p, n_max, w_min, o.max_elements);
    ojson c = py_config(name, p);
    c["lo"] = to_string(I.lo);
    c["hi"] = to_string(I.hi);
    c["n_max"] = n_max;
    c["w_min"] = num(w_min);
    Report r = make("py catalog", o, c);
    r.result = catalog_json(cat, h, p);
    r.table = catalog_table(cat, h, p);
    return r;
}

Report py_exclude(const Opts& o)
{
    const auto name = need_model(o, "toy_het");
    const auto p = py_params(o);
    ExclusionOptions eo;
    eo.n_max = o.n_max;
    eo.max_elements = o.max_elements;
    eo.threads = o.threads;
    const auto res = run_exclusion(resolve_horseshoe(name), p, o.generations, eo);
    ojson c = py_config(name, p);
    c["generations"] = o.generations;
    c["n_max"] = o.n_max;
    Report r = make("py exclude", o, c);
    r.result = exclusion_json(res, p);
    r.table = exclusion_table(res);
    return r;
}

Report py_chains(const Opts& o)
{
    const auto name = need_model(o, "toy_het");
    const auto h = resolve_horseshoe(name);
    const auto p = py_params(o);
    const auto I = interval_from(o, p);
    const int n_max = o.n_max > 0 ? o.n_max : 12;
    const double w_min = o.w_min > 0 ? o.w_min : 1e-7;
    const auto cat = build_catalog(h, I, p, n_max, w_min, o.max_elements);
    const auto ch = enumerate_admissible_chains(cat, h, p, o.k, o.budget);
    std::size_t lemma_ok = 0, compatible = 0, below_area = 0;
    for (const auto& c : ch.chains) {
        lemma_ok += lemma24_check(c.widths, p, ch.fitted_C) ? 1 : 0;
        try {
            const auto cb = covering_bound(c.widths, 2.0, p.eta);
            ++compatible;
            below_area += cb.bound <= c.widths.P[0] ? 1 : 0;
        } catch (const CompatibilityViolation&) {
        }
    }
    ojson ends = ojson::array();
    for (const auto& [key, v] : ch.endpoint_counts)
        ends.push_back({{"first", word_key(cat.elements[key.first].word)},
                        {"last", word_key(cat.elements[key.second].word)},
                        {"count", v.first},
                        {"bound", num(v.second)}});
    ojson c = py_config(name, p);
    c["lo"] = to_string(I.lo);
    c["hi"] = to_string(I.hi);
    c["n_max"] = n_max;
    c["w_min"] = num(w_min);
    c["k"] = o.k;
    c["budget"] = o.budget;
    Report r = make("py chains", o, c);
    r.result = {{"catalog_size", cat.elements.size()},
                {"chains", ch.chains.size()},
                {"fitted_C", num(ch.fitted_C)},
                {"chain_inequality_holds", lemma_ok},
                {"compatible", compatible},
                {"covering_d2_within_strip_area", below_area},
                {"endpoints", ends}};
    r.table = chains_table(ch, cat);
    return r;
}

Report py_mpy(const Opts& o)
{
    const auto p = py_params(o);
    const auto d = exceptional_dimension_bound(o.ds, o.du, p);
    ojson c = params_json(p);
    c.erase("eps0");
    c["ds"] = num(o.ds);
    c["du"] = num(o.du);
    Report r = make("py mpy-bound", o, c);
    r.result = {{"feasible", d.feasible}, {"d_minus", num(d.d_minus)}};
    if (d.feasible) {
        r.result["d"] = num(d.d);
        r.result["candidates"] = {{"floor", num(d.from_floor)}, {"d_star", num(d.from_dstar)},
                                  {"beta", num(d.from_beta)}};
    } else {
        r.result["reason"] = d.reason;
    }
    return r;
}

// --- model ------------------------------------------------------------------

Report model_list(const Opts& o)
{
    Report r = make("model list", o, ojson::object());
    Table t;
    t.columns = {"name", "kind", "description"};
    for (const auto& m : standard_models())
        t.rows.push_back({m.name, m.kind, m.description});
    r.table = std::move(t);
    return r;
}

Report model_validate(const Opts& o)
{
    const auto name = need_model(o);
    std::string kind;
    std::ifstream probe(name);
    if (probe) {
        const auto j = parse_json_text(read_text_file(name), name);
        if (j.is_object() && j.contains("rectangles")) {
            horseshoe_from_json(j).validate();
            kind = "horseshoe";
        } else {
            (void)cantor_from_json(j);
            kind = "cantor";
        }
    } else {
        try {
            (void)resolve_cantor(name);
            kind = "cantor";
        } catch (const ValidationError&) {
            resolve_horseshoe(name).validate();
            kind = "horseshoe";
        }
    }
    Report r = make("model validate", o, {{"model", name}});
    r.result = {{"valid", true}, {"kind", kind}};
    return r;
}

void emit(const Report& r, const Opts& o, std::ostream& out)
{
    if (o.out.empty() || o.out == "-")
        out << to_json_text(r);
    else
        write_report(r, o.out);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Opts o;
    std::function<Report(const Opts&)> action;
    CLI::App app{"Fractal and hyperbolic dynamics toolkit", "fdyn-cli"};
    app.require_subcommand(1);

    const auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                          Report (*fn)(const Opts&)) {
        CLI::App* s = parent->add_subcommand(name, help);
        common(s, o);
        s->callback([&action, fn] { action = fn; });
        return s;
    };

    auto* cantor = app.add_subcommand("cantor", "regular Cantor sets")->require_subcommand(1);
    leaf(cantor, "dim", "certified Hausdorff dimension", cantor_dim);
    leaf(cantor, "thickness", "thickness bracket", cantor_thickness);
    leaf(cantor, "gaps", "bounded gaps up to a depth", cantor_gaps);
    auto* diff = leaf(cantor, "diff", "arithmetic difference K - lambda K'", cantor_diff);
    diff->add_option("--model2", o.model2, "second set (default: --model)");
    diff->add_option("--lambda", o.lambda, "scale of the second set");

    auto* scan = app.add_subcommand("scan", "parameter scans")->require_subcommand(1);
    auto* mar = leaf(scan, "marstrand", "difference measures over the lambda grid", scan_marstrand);
    mar->add_option("--model2", o.model2, "second set (default: --model)");
    mar->add_option("--floor", o.floor, "measure floor");
    auto* tan = leaf(scan, "tangency-density", "density of tangency parameters", scan_tangency);
    tan->add_option("--model2", o.model2, "second set (default: --model)");
    tan->add_option("--c", o.c, "neighbourhood constant");
    tan->add_option("--t", o.ts, "parameter scales");
    tan->add_option("--samples", o.samples, "samples per scale");

    auto* hs = app.add_subcommand("horseshoe", "affine horseshoes and the fold")->require_subcommand(1);
    leaf(hs, "dims", "stable and unstable dimensions", horseshoe_dims);
    auto* cf = leaf(hs, "conefield", "cone field invariance", horseshoe_conefield);
    cf->add_option("--grid", o.grid, "grid boxes per side");
    cf->add_option("--lambda", o.cone_lambda, "required expansion");
    cf->add_flag("--include-fold", o.include_fold, "check the fold on its tongue too");
    auto* sk = leaf(hs, "sink-scan", "certified sinks over a parameter range", horseshoe_sinks);
    sk->add_option("--map", o.map, "limit or toy_return");
    sk->add_option("--b", o.b, "coupling b");
    sk->add_option("--mu-min", o.mu_min);
    sk->add_option("--mu-max", o.mu_max);
    sk->add_option("--steps", o.steps, "number of parameters");
    sk->add_option("--box", o.box, "x0 x1 y0 y1")->expected(4)->delimiter(',');
    sk->add_option("--max-period", o.max_period);
    sk->add_option("--iters", o.iters);
    sk->add_option("--seeds", o.seeds, "seed grid per side");

    auto* py = app.add_subcommand("py", "parameter exclusion and covering estimates")->require_subcommand(1);
    auto* cat = leaf(py, "catalog", "catalog of affine-like elements", py_catalog);
    auto* ex = leaf(py, "exclude", "parameter exclusion", py_exclude);
    auto* chs = leaf(py, "chains", "admissible chains and covering bounds", py_chains);
    for (auto* s : {cat, ex, chs}) {
        s->add_option("--n-max", o.n_max, "word length cap (0: default)");
        s->add_option("--max-elements", o.max_elements, "catalog size cap");
    }
    for (auto* s : {cat, chs}) {
        s->add_option("--lo", o.lo, "interval start (default eps0)");
        s->add_option("--hi", o.hi, "interval end (default 2 eps0)");
        s->add_option("--w-min", o.w_min, "width floor (0: default)");
    }
    ex->add_option("--generations", o.generations);
    chs->add_option("--k", o.k, "chain length k");
    chs->add_option("--budget", o.budget, "maximum number of chains");
    auto* mpy = leaf(py, "mpy-bound", "dimension bound for the exceptional set", py_mpy);
    mpy->add_option("--ds", o.ds)->required();
    mpy->add_option("--du", o.du)->required();

    auto* model = app.add_subcommand("model", "built-in and file models")->require_subcommand(1);
    leaf(model, "list", "list built-in models", model_list);
    leaf(model, "validate", "validate a model", model_validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    try {
        emit(action(o), o, out);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResolutionError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const BudgetError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace fdyn::cli
