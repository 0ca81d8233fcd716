#include "fdyn/models.hpp"

#include "fdyn/cantor_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace fdyn {

CantorSystem ternary()
{
    return affine_full_shift({{Rational(0), Rational(1, 3)}, {Rational(2, 3), Rational(1)}}, {"L", "R"});
}

CantorSystem middle_alpha(const Rational& alpha)
{
    if (!(alpha > 0 && alpha < 1))
        throw ValidationError("middle_alpha needs alpha in (0,1), got " + to_string(alpha));
    const Rational side = (1 - alpha) / 2;
    return affine_full_shift({{Rational(0), side}, {1 - side, Rational(1)}}, {"L", "R"});
}

CantorSystem markov_golden()
{
    return affine_full_shift({{Rational(0), Rational(1, 2)}, {Rational(3, 4), Rational(1)}}, {"L", "R"});
}

CantorSystem even_branches(int n, const Rational& r)
{
    if (n < 2 || !(r > 0) || !(r * n < 1))
        throw ValidationError("even_branches needs n >= 2 and 0 < n r < 1");
    std::vector<std::pair<Rational, Rational>> d;
    std::vector<std::string> labels;
    const Rational step = (1 - r) / (n - 1);
    for (int i = 0; i < n; ++i) {
        d.emplace_back(step * i, step * i + r);
        labels.push_back(std::to_string(i));
    }
    return affine_full_shift(d, labels);
}

std::size_t Horseshoe::rect_index(const std::string& label) const
{
    for (std::size_t i = 0; i < rects.size(); ++i)
        if (rects[i] == label)
            return i;
    throw ValidationError("unknown rectangle '" + label + "'");
}

namespace {

Rational min0(const Rational& a)
{
    return a < 0 ? a : Rational(0);
}

Rational max0(const Rational& a)
{
    return a > 0 ? a : Rational(0);
}

std::pair<Rational, Rational> span(const Rational& c, const Rational& k1, const Rational& k2)
{
    return {c + min0(k1) + min0(k2), c + max0(k1) + max0(k2)};
}

void check_disjoint(std::vector<std::pair<std::pair<Rational, Rational>, std::string>> strips, const std::string& rect,
                    const char* kind)
{
    std::sort(strips.begin(), strips.end());
    for (std::size_t i = 1; i < strips.size(); ++i)
        if (!(strips[i - 1].first.second < strips[i].first.first))
            throw ValidationError(std::string(kind) + " strips of '" + strips[i - 1].second + "' and '" +
                                  strips[i].second + "' overlap in rectangle '" + rect + "'");
}

} // namespace

void Horseshoe::validate() const
{
    if (rects.empty() || transitions.empty())
        throw ValidationError("a horseshoe needs rectangles and transitions");
    std::set<std::string> seen(rects.begin(), rects.end());
    if (seen.size() != rects.size())
        throw ValidationError("duplicate rectangle label");
    std::set<std::string> labels;
    for (const auto& t : transitions) {
        if (!labels.insert(t.label).second)
            throw ValidationError("duplicate transition label '" + t.label + "'");
        rect_index(t.from);
        rect_index(t.to);
        if (t.piece.a1 == 0 || t.piece.b2 == 0)
            throw ValidationError("transition '" + t.label + "' has a degenerate strip");
        for (const auto& [lo, hi] : {span(t.piece.a0, t.piece.a1, t.piece.a2), span(t.piece.b0, t.piece.b1, t.piece.b2)})
            if (lo < 0 || hi > 1)
                throw ValidationError("strip of transition '" + t.label + "' leaves its rectangle");
    }
    for (const auto& r : rects) {
        std::vector<std::pair<std::pair<Rational, Rational>, std::string>> vert;
        std::vector<std::pair<std::pair<Rational, Rational>, std::string>> hor;
        for (const auto& t : transitions) {
            if (t.from == r)
                vert.push_back({span(t.piece.a0, t.piece.a1, t.piece.a2), t.label});
            if (t.to == r)
                hor.push_back({span(t.piece.b0, t.piece.b1, t.piece.b2), t.label});
        }
        check_disjoint(vert, r, "vertical");
        check_disjoint(hor, r, "horizontal");
    }
    cone.validate();
    for (const auto& t : transitions) {
        ImplicitRep rep{t.piece, std::nullopt};
        rep.ranges = compute_ranges(rep);
        if (!verify_cone(rep, cone))
            throw ValidationError("transition '" + t.label + "' violates the cone condition");
    }
    if (fold) {
        rect_index(fold->from);
        rect_index(fold->to);
        if (!(fold->half_width > 0.0 && fold->half_width <= 0.5) || fold->n0 < 1 || !(fold->b >= 0.0))
            throw ValidationError("fold needs 0 < half_width <= 1/2, N0 >= 1 and b >= 0");
    }
    unstable_factor(*this);
    stable_factor(*this);
}

Horseshoe smale_affine(int n, const Rational& r)
{
    if (n < 2 || !(r > 0) || !(r * n < 1))
        throw ValidationError("smale_affine needs n >= 2 and 0 < n r < 1");
    Horseshoe h;
    h.name = "smale_affine:" + std::to_string(n) + ":" + to_string(r);
    h.rects = {"a"};
    const Rational step = (1 - r) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const Rational pos = step * i;
        h.transitions.push_back({std::to_string(i), "a", "a", AffinePiece{pos, r, 0, pos, 0, r}});
    }
    h.validate();
    return h;
}

namespace {

Horseshoe toy_base(const Rational& w)
{
    if (!(w > 0 && w < Rational(1, 2)))
        throw ValidationError("toy family needs strip width in (0, 1/2)");
    Horseshoe h;
    h.rects = {"u", "s"};
    const Rational far = 1 - w;
    // (a,i): V_i of R_a onto H_i of the next rectangle; x0 = x_i + w x1, y1 = y_i + w y0.
    h.transitions = {
        {"(u,0)", "u", "u", AffinePiece{0, w, 0, 0, 0, w}},
        {"(u,1)", "u", "s", AffinePiece{far, w, 0, far, 0, w}},
        {"(s,0)", "s", "s", AffinePiece{0, w, 0, 0, 0, w}},
        {"(s,1)", "s", "u", AffinePiece{far, w, 0, far, 0, w}},
    };
    return h;
}

} // namespace

Horseshoe toy_het(const Rational& w, double b, double t)
{
    Horseshoe h = toy_base(w);
    h.name = "toy_het";
    FoldingModel g;
    g.b = b;
    g.t = Interval(t);
    g.tip0 = 0.0;
    g.half_width = to_double_down(Rational(1, 2) - w);
    g.n0 = 1;
    g.from = "u";
    g.to = "s";
    h.fold = g;
    h.validate();
    return h;
}

Horseshoe toy_het_fold_free(const Rational& w)
{
    Horseshoe h = toy_base(w);
    h.name = "toy_het_fold_free";
    h.validate();
    return h;
}

Horseshoe transpose(const Horseshoe& h)
{
    Horseshoe t;
    t.name = h.name + "^T";
    t.rects = h.rects;
    t.cone = h.cone;
    for (const auto& tr : h.transitions)
        t.transitions.push_back({tr.label + "^T", tr.to, tr.from, transpose(tr.piece)});
    return t;
}

std::pair<Interval, Interval> tip_s(const FoldingModel& g, const Interval& t)
{
    return {t + Interval(g.tip0), Interval(0.5)};
}

std::pair<Interval, Interval> tip_u(const FoldingModel& g, const Interval& t)
{
    if (!(g.b > 0.0))
        throw ValidationError("the tongue L_u has no tip when b = 0");
    return {Interval(0.5), (t + Interval(g.tip0)) / Interval(g.b)};
}

std::array<double, 2> fold_map(const FoldingModel& g, double t, double X, double Y)
{
    return {Y, Y * Y - t + g.b * X};
}

namespace {

// x0 = a0 + a1 x1 (+ a2 y0): the branch maps [2f + x-range] onto [2t, 2t+1].
CantorSystem factor(const Horseshoe& h, bool unstable)
{
    std::vector<BranchSpec> br;
    std::vector<std::pair<std::string, std::string>> mk;
    for (const auto& t : h.transitions) {
        if (unstable ? t.piece.a2 != 0 : t.piece.b1 != 0)
            throw ValidationError("factor systems need axis-aligned transitions ('" + t.label + "')");
        const std::size_t src = h.rect_index(unstable ? t.from : t.to);
        const std::size_t dst = h.rect_index(unstable ? t.to : t.from);
        const Rational c = unstable ? t.piece.a0 : t.piece.b0;
        const Rational s = unstable ? t.piece.a1 : t.piece.b2;
        const Rational base(2 * static_cast<long>(src));
        const Rational lo = base + c + min0(s);
        const Rational hi = base + c + max0(s);
        // coordinate z = base + c + s w  ->  w + 2 dst
        const Rational slope = 1 / s;
        const Rational offset = Rational(2 * static_cast<long>(dst)) - (base + c) / s;
        br.push_back({t.label, lo, hi, AffineMap{slope, offset}});
    }
    for (const auto& a : h.transitions)
        for (const auto& b : h.transitions)
            if (unstable ? a.to == b.from : a.from == b.to)
                mk.emplace_back(a.label, b.label);
    Rational lo = br.front().lo;
    Rational hi = br.front().hi;
    for (const auto& b : br) {
        lo = std::min(lo, b.lo);
        hi = std::max(hi, b.hi);
    }
    return make_cantor_system(lo, hi, std::move(br), mk);
}

} // namespace

CantorSystem unstable_factor(const Horseshoe& h)
{
    return factor(h, true);
}

CantorSystem stable_factor(const Horseshoe& h)
{
    return factor(h, false);
}

namespace {

// Minimal number of intervals of length eps covering the cover of each rectangle
// (greedy from the left is optimal on the line).
std::vector<std::size_t> cover_counts(const std::vector<Interval>& cover, std::size_t nrect, double eps)
{
    std::vector<std::size_t> count(nrect, 0);
    std::vector<double> reach(nrect, -std::numeric_limits<double>::infinity());
    for (const auto& c : cover) {
        const auto r = static_cast<std::size_t>(std::floor(c.lo() / 2.0));
        double lo = c.lo();
        if (lo <= reach[r])
            lo = reach[r];
        while (c.hi() > reach[r]) {
            ++count[r];
            reach[r] = lo + eps;
            lo = reach[r];
        }
    }
    return count;
}

// Cylinders refined until each is no longer than target, left to right.
std::vector<Interval> scale_cover(const CantorSystem& k, double target)
{
    std::vector<Interval> out;
    auto roots = root_nodes(k);
    std::vector<CylinderNode> stack(roots.rbegin(), roots.rend());
    while (!stack.empty()) {
        const auto n = std::move(stack.back());
        stack.pop_back();
        if ((n.right - n.left).hi() <= target) {
            out.emplace_back(n.left.lo(), n.right.hi());
            if (out.size() > (std::size_t{1} << 24))
                throw ResolutionError("box counting cover exceeds 2^24 cylinders");
            continue;
        }
        auto c = child_nodes(k, n);
        stack.insert(stack.end(), c.rbegin(), c.rend());
    }
    return out;
}

} // namespace

BoxCount box_counting(const Horseshoe& h, std::size_t depth)
{
    // Covers are cut at a common length scale rather than a common word length, so
    // factors with mixed contraction rates are resolved evenly.
    const double finest = std::exp2(-2.5 * static_cast<double>(depth));
    const auto xs = scale_cover(unstable_factor(h), finest);
    const auto ys = scale_cover(stable_factor(h), finest);
    // Box sizes 2^(-k/8) from 1/2 down to 4x the cover scale, skipping the coarsest fifth.
    const int k_hi = 8 * (static_cast<int>(std::floor(std::log2(1.0 / finest))) - 2);
    const int k_lo = std::max(8, k_hi / 5);
    if (k_hi <= k_lo)
        throw ResolutionError("box counting depth too small for a slope fit");
    BoxCount out;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double eps = std::exp2(-k / 8.0);
        const auto nx = cover_counts(xs, h.rects.size(), eps);
        const auto ny = cover_counts(ys, h.rects.size(), eps);
        double n = 0.0;
        for (std::size_t r = 0; r < h.rects.size(); ++r)
            n += static_cast<double>(nx[r]) * static_cast<double>(ny[r]);
        out.counts.emplace_back(eps, n);
        const double x = -std::log(eps);
        const double y = std::log(n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(out.counts.size());
    out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return out;
}

HorseshoeDims stable_unstable_dimensions(const Horseshoe& h, double tol, std::size_t box_depth)
{
    HorseshoeDims out;
    out.ds = hausdorff_dimension(stable_factor(h), tol);
    out.du = hausdorff_dimension(unstable_factor(h), tol);
    out.box = box_counting(h, box_depth);
    return out;
}

namespace {

struct Mat {
    Interval a, b, c, d; // [[a, b], [c, d]]
};

// Horizontal vectors (1, s), |s| <= 1, stay horizontal and stretch by at least lambda.
bool forward_ok(const Mat& m, double lambda)
{
    const Interval s(-1.0, 1.0);
    const Interval dx = m.a + m.b * s;
    const Interval dy = m.c + m.d * s;
    return abs(dy).hi() <= dx.mig() && dx.mig() >= lambda;
}

} // namespace

bool verify_hyperbolic_conefield(const Horseshoe& h, int grid_n, const ConeParams& params, bool include_fold)
{
    if (grid_n < 1)
        throw ValidationError("grid_n must be positive");
    for (const auto& t : h.transitions) {
        const Interval a1 = enclose(t.piece.a1), a2 = enclose(t.piece.a2);
        const Interval b1 = enclose(t.piece.b1), b2 = enclose(t.piece.b2);
        // Forward derivative of (x0, y0) -> (x1, y1) and backward derivative of its inverse,
        // the latter written with the roles of x and y exchanged.
        const Mat fwd{Interval(1.0) / a1, -a2 / a1, b1 / a1, b2 - b1 * a2 / a1};
        const Mat bwd{Interval(1.0) / b2, -b1 / b2, a2 / b2, a1 - a2 * b1 / b2};
        // The derivative is the same on each of the grid_n^2 cells.
        for (int i = 0; i < grid_n * grid_n; ++i)
            if (!forward_ok(fwd, params.lambda) || !forward_ok(bwd, params.lambda))
                return false;
    }
    if (include_fold && h.fold) {
        const FoldingModel& g = *h.fold;
        const double lo = 0.5 - g.half_width;
        const double w = 2.0 * g.half_width / grid_n;
        for (int i = 0; i < grid_n; ++i) {
            const Interval x(lo + i * w, lo + (i + 1) * w);
            // DG = [[-2 (x - 1/2), -b], [1, 0]], constant in y.
            const Mat dg{Interval(-2.0) * (x - Interval(0.5)), Interval(-g.b), Interval(1.0), Interval(0.0)};
            for (int j = 0; j < grid_n; ++j)
                if (!forward_ok(dg, params.lambda))
                    return false;
        }
    }
    return true;
}

std::vector<NamedModel> standard_models()
{
    return {
        {"ternary", "cantor", "middle-third Cantor set, slopes 3"},
        {"middle_fifth", "cantor", "middle_alpha(1/5): branches [0,2/5], [3/5,1]"},
        {"middle_0.6", "cantor", "middle_alpha(3/5): branches [0,1/5], [4/5,1]"},
        {"markov_golden", "cantor", "branches [0,1/2], [3/4,1] with ratios 1/2 and 1/4"},
        {"middle_alpha:<q>", "cantor", "middle gap of relative length q in (0,1)"},
        {"even:<n>:<r>", "cantor", "n evenly spaced branches of length r"},
        {"smale_affine:<n>:<r>", "horseshoe", "n evenly spaced strips of width r in one square"},
        {"toy_het", "horseshoe", "two-rectangle horseshoe with a quadratic fold, w = 709/2500, b = 0.1"},
        {"toy_het_fold_free", "horseshoe", "toy_het without the fold"},
    };
}

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p - start));
        if (p == std::string::npos)
            return out;
        start = p + 1;
    }
}

int parse_int(const std::string& s)
{
    const Rational q = parse_rational(s);
    if (denominator(q) != 1 || q < 0 || q > 1000)
        throw ValidationError("expected a small non-negative integer, got '" + s + "'");
    return static_cast<int>(numerator(q));
}

} // namespace

CantorSystem resolve_cantor(const std::string& name)
{
    if (name == "ternary")
        return ternary();
    if (name == "middle_fifth")
        return middle_alpha(Rational(1, 5));
    if (name == "middle_0.6")
        return middle_alpha(Rational(3, 5));
    if (name == "markov_golden")
        return markov_golden();
    const auto parts = split(name, ':');
    if (parts.size() == 2 && parts[0] == "middle_alpha")
        return middle_alpha(parse_rational(parts[1]));
    if (parts.size() == 3 && parts[0] == "even")
        return even_branches(parse_int(parts[1]), parse_rational(parts[2]));
    return load_cantor_file(name);
}

Horseshoe resolve_horseshoe(const std::string& name)
{
    if (name == "toy_het")
        return toy_het();
    if (name == "toy_het_fold_free")
        return toy_het_fold_free();
    const auto parts = split(name, ':');
    if (parts.size() == 3 && parts[0] == "smale_affine")
        return smale_affine(parse_int(parts[1]), parse_rational(parts[2]));
    return horseshoe_from_json(parse_json_text(read_text_file(name), name));
}

nlohmann::ordered_json horseshoe_to_json(const Horseshoe& h)
{
    nlohmann::ordered_json j = cantor_to_json(unstable_factor(h));
    j["name"] = h.name;
    j["rectangles"] = h.rects;
    auto tr = nlohmann::ordered_json::array();
    for (const auto& t : h.transitions) {
        const auto& p = t.piece;
        tr.push_back({{"label", t.label},
                      {"from", t.from},
                      {"to", t.to},
                      {"A", {to_string(p.a0), to_string(p.a1), to_string(p.a2)}},
                      {"B", {to_string(p.b0), to_string(p.b1), to_string(p.b2)}}});
    }
    j["transitions"] = tr;
    j["cone"] = {{"lambda", h.cone.lambda}, {"u", h.cone.u}, {"v", h.cone.v}, {"C", h.cone.C}};
    if (h.fold) {
        const auto& g = *h.fold;
        j["fold"] = {{"b", g.b},
                     {"N0", g.n0},
                     {"t", {g.t.lo(), g.t.hi()}},
                     {"tip0", g.tip0},
                     {"tongues",
                      {{"L_u", {{"rect", g.from}, {"x", {0.5 - g.half_width, 0.5 + g.half_width}}}},
                       {"L_s", {{"rect", g.to}}}}}};
    }
    return j;
}

namespace {

double json_double(const nlohmann::json& v, const std::string& what)
{
    return to_double(json_rational(v, what));
}

AffinePiece piece_from(const nlohmann::json& A, const nlohmann::json& B, const std::string& label)
{
    if (!A.is_array() || A.size() != 3 || !B.is_array() || B.size() != 3)
        throw ValidationError("transition '" + label + "' needs A and B with three coefficients each");
    return {json_rational(A[0], "A"), json_rational(A[1], "A"), json_rational(A[2], "A"),
            json_rational(B[0], "B"), json_rational(B[1], "B"), json_rational(B[2], "B")};
}

} // namespace

Horseshoe horseshoe_from_json(const nlohmann::json& j)
{
    try {
        Horseshoe h;
        h.name = j.value("name", std::string("horseshoe"));
        for (const auto& r : j.at("rectangles"))
            h.rects.push_back(r.get<std::string>());
        for (const auto& t : j.at("transitions")) {
            const std::string label = t.at("label").get<std::string>();
            h.transitions.push_back(
                {label, t.at("from").get<std::string>(), t.at("to").get<std::string>(), piece_from(t.at("A"), t.at("B"), label)});
        }
        if (j.contains("cone")) {
            const auto& c = j["cone"];
            h.cone = {json_double(c.at("lambda"), "lambda"), json_double(c.at("u"), "u"), json_double(c.at("v"), "v"),
                      json_double(c.at("C"), "C")};
        }
        if (j.contains("fold")) {
            const auto& f = j["fold"];
            FoldingModel g;
            g.b = json_double(f.at("b"), "b");
            g.n0 = f.value("N0", 1);
            if (f.contains("t")) {
                const auto& t = f["t"];
                g.t = t.is_array() ? Interval(json_double(t.at(0), "t"), json_double(t.at(1), "t"))
                                   : Interval(json_double(t, "t"));
            }
            g.tip0 = f.contains("tip0") ? json_double(f["tip0"], "tip0") : 0.0;
            const auto& lu = f.at("tongues").at("L_u");
            g.from = lu.at("rect").get<std::string>();
            const auto& x = lu.at("x");
            g.half_width = 0.5 * (json_double(x.at(1), "x") - json_double(x.at(0), "x"));
            g.to = f.at("tongues").at("L_s").at("rect").get<std::string>();
            h.fold = g;
        }
        h.validate();
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("horseshoe model: ") + e.what());
    }
}

} // namespace fdyn
