#include "fdyn/affine_like.hpp"

#include <cmath>

namespace fdyn {

const char* to_string(CompositionError::Kind k)
{
    switch (k) {
    case CompositionError::Kind::EmptyOverlap:
        return "EmptyOverlap";
    case CompositionError::Kind::RectangleMismatch:
        return "RectangleMismatch";
    case CompositionError::Kind::ConeViolation:
        return "ConeViolation";
    case CompositionError::Kind::CrossingViolation:
        return "CrossingViolation";
    case CompositionError::Kind::MultiFold:
        return "MultiFold";
    }
    return "?";
}

void ConeParams::validate() const
{
    if (!(lambda > 0.0 && u > 0.0 && v > 0.0))
        throw ValidationError("cone parameters must be positive");
    const double uv = u * v;
    if (!(uv > 1.0 && uv < lambda * lambda))
        throw ValidationError("cone parameters need 1 < u v < lambda^2");
    if (!(C > 0.0))
        throw ValidationError("distortion bound C must be positive");
}

std::pair<double, double> simple_kappa(const ConeParams& p)
{
    p.validate();
    // |a2' b1| <= 1/(u v) bounds the coupling term; distortion costs e^C on each factor.
    const double q = 1.0 / (p.u * p.v);
    return {std::exp(-2.0 * p.C) / (1.0 + q), std::exp(2.0 * p.C) / (1.0 - q)};
}

std::pair<double, double> parabolic_kappa(const ConeParams& p)
{
    auto [k1, k2] = simple_kappa(p);
    return {0.5 * k1, 0.5 * k2};
}

namespace {

Interval iv(const Rational& q)
{
    return Interval(to_double_down(q), to_double_up(q));
}

Rational min0(const Rational& a)
{
    return a < 0 ? a : Rational(0);
}

Rational max0(const Rational& a)
{
    return a > 0 ? a : Rational(0);
}

bool in_unit(const Rational& c, const Rational& k1, const Rational& k2)
{
    return c + min0(k1) + min0(k2) >= 0 && c + max0(k1) + max0(k2) <= 1;
}

} // namespace

AffinePiece compose(const AffinePiece& f, const AffinePiece& fp)
{
    const Rational den = 1 - fp.a2 * f.b1;
    if (den == 0)
        throw ValidationError("affine composition is singular");
    // x1 = k0 + k1 x2 + k2 y0
    const Rational k0 = (fp.a0 + fp.a2 * f.b0) / den;
    const Rational k1 = fp.a1 / den;
    const Rational k2 = fp.a2 * f.b2 / den;
    const Rational y0c = f.b0 + f.b1 * k0;
    const Rational y1c = f.b1 * k1;
    const Rational y2c = f.b1 * k2 + f.b2;
    if (!in_unit(k0, k1, k2) || !in_unit(y0c, y1c, y2c))
        throw CompositionError(CompositionError::Kind::EmptyOverlap,
                               "image strip and domain strip do not overlap across the rectangle");
    AffinePiece out;
    out.a0 = f.a0 + f.a1 * k0;
    out.a1 = f.a1 * k1;
    out.a2 = f.a1 * k2 + f.a2;
    out.b0 = fp.b0 + fp.b2 * y0c;
    out.b1 = fp.b1 + fp.b2 * y1c;
    out.b2 = fp.b2 * y2c;
    return out;
}

AffinePiece transpose(const AffinePiece& f)
{
    return {f.b0, f.b2, f.b1, f.a0, f.a2, f.a1};
}

namespace {

struct FoldData {
    Rational c0, s0, e0, h0; // x0 = c0 + s0 x1, y1 = e0 + h0 y0
    Rational c1, s1, e1, h1; // x_s = c1 + s1 x2, y2 = e1 + h1 y_s
};

FoldData fold_data(const FoldComposite& f)
{
    return {f.pre.a0, f.pre.a1, f.pre.b0, f.pre.b2, f.post.a0, f.post.a1, f.post.b0, f.post.b2};
}

// D(x2, y0) = t + tip0 - b (e0 + h0 y0) - c1 - s1 x2
Interval fold_D(const FoldComposite& f, const Interval& x, const Interval& y)
{
    const FoldData d = fold_data(f);
    const Interval b(f.fold.b);
    return f.fold.t + Interval(f.fold.tip0) - b * (iv(d.e0) + iv(d.h0) * y) - iv(d.c1) - iv(d.s1) * x;
}

Interval composite_A(const FoldComposite& f, const Interval& x, const Interval& y)
{
    const FoldData d = fold_data(f);
    return iv(d.c0) + iv(d.s0) * (Interval(0.5) + Interval(f.sigma) * sqrt(fold_D(f, x, y)));
}

Interval composite_B(const FoldComposite& f, const Interval& x, const Interval& y)
{
    const FoldData d = fold_data(f);
    return iv(d.e1) + iv(d.h1) * (Interval(0.5) + Interval(f.sigma) * sqrt(fold_D(f, x, y)));
}

DerivRanges swap_ranges(const DerivRanges& r)
{
    DerivRanges t;
    t.Ax = r.By;
    t.Ay = r.Bx;
    t.Bx = r.Ay;
    t.By = r.Ax;
    t.dx_log_Ax = r.dy_log_By;
    t.dy_log_Ax = r.dx_log_By;
    t.Ayy = r.Bxx;
    t.dy_log_By = r.dx_log_Ax;
    t.dx_log_By = r.dy_log_Ax;
    t.Bxx = r.Ayy;
    return t;
}

} // namespace

Interval eval_A(const ImplicitRep& rep, const Interval& x, const Interval& y)
{
    if (const auto* a = std::get_if<AffinePiece>(&rep.form))
        return iv(a->a0) + iv(a->a1) * x + iv(a->a2) * y;
    const auto& f = std::get<FoldComposite>(rep.form);
    return f.transposed ? composite_B(f, y, x) : composite_A(f, x, y);
}

Interval eval_B(const ImplicitRep& rep, const Interval& x, const Interval& y)
{
    if (const auto* a = std::get_if<AffinePiece>(&rep.form))
        return iv(a->b0) + iv(a->b1) * x + iv(a->b2) * y;
    const auto& f = std::get<FoldComposite>(rep.form);
    return f.transposed ? composite_A(f, y, x) : composite_B(f, x, y);
}

DerivRanges compute_ranges(const ImplicitRep& rep)
{
    DerivRanges r;
    if (const auto* a = std::get_if<AffinePiece>(&rep.form)) {
        r.Ax = iv(a->a1);
        r.Ay = iv(a->a2);
        r.Bx = iv(a->b1);
        r.By = iv(a->b2);
        return r; // log-derivatives and second derivatives vanish
    }
    const auto& f = std::get<FoldComposite>(rep.form);
    const FoldData d = fold_data(f);
    const Interval unit(0.0, 1.0);
    const Interval D = fold_D(f, unit, unit);
    if (!(D.lo() > 0.0))
        throw ValidationError("fold composite evaluated outside its two-component regime");
    const Interval R = sqrt(D);
    const Interval sg(static_cast<double>(f.sigma));
    const Interval bh0 = Interval(f.fold.b) * iv(d.h0);
    const Interval s0 = iv(d.s0);
    const Interval s1 = iv(d.s1);
    const Interval h1 = iv(d.h1);
    const Interval twoR = Interval(2.0) * R;
    const Interval twoD = Interval(2.0) * D;
    const Interval fourD32 = Interval(4.0) * D * R;
    r.Ax = -sg * s0 * s1 / twoR;
    r.Ay = -sg * s0 * bh0 / twoR;
    r.Bx = -sg * h1 * s1 / twoR;
    r.By = -sg * h1 * bh0 / twoR;
    r.dx_log_Ax = s1 / twoD;
    r.dy_log_Ax = bh0 / twoD;
    r.Ayy = -sg * s0 * square(bh0) / fourD32;
    r.dy_log_By = bh0 / twoD;
    r.dx_log_By = s1 / twoD;
    r.Bxx = -sg * h1 * square(s1) / fourD32;
    return f.transposed ? swap_ranges(r) : r;
}

namespace {

const DerivRanges& need_ranges(const ImplicitRep& rep)
{
    if (!rep.ranges)
        throw ValidationError("implicit representation has no certified derivative ranges");
    return *rep.ranges;
}

} // namespace

bool verify_cone(const ImplicitRep& rep, const ConeParams& params)
{
    const DerivRanges& r = need_ranges(rep);
    const Interval lam(params.lambda);
    const Interval first = lam * Interval(r.Ax.mag()) + Interval(params.u) * Interval(r.Ay.mag());
    const Interval second = lam * Interval(r.By.mag()) + Interval(params.v) * Interval(r.Bx.mag());
    return first.hi() <= 1.0 && second.hi() <= 1.0;
}

bool verify_distortion(const ImplicitRep& rep, double C)
{
    const DerivRanges& r = need_ranges(rep);
    for (const Interval* q : {&r.dx_log_Ax, &r.dy_log_Ax, &r.Ayy, &r.dy_log_By, &r.dx_log_By, &r.Bxx})
        if (!(q->lo() >= -C && q->hi() <= C))
            return false;
    return true;
}

std::pair<Interval, Interval> width_ranges(const AffineLikeElement& e)
{
    const DerivRanges& r = need_ranges(e.rep);
    return {abs(r.Ax), abs(r.By)};
}

std::pair<double, double> widths(const AffineLikeElement& e)
{
    auto [p, q] = width_ranges(e);
    return {p.hi(), q.hi()};
}

AffineLikeElement make_affine_element(const AffinePiece& f, const std::string& src, const std::string& dst, int n,
                                      std::vector<std::string> word, const ConeParams& params)
{
    AffineLikeElement e;
    e.P.rect = src;
    e.Q.rect = dst;
    e.n = n;
    e.rep.form = f;
    e.word = std::move(word);
    finish_element(e, params);
    return e;
}

namespace {

std::vector<std::string> concat(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::string> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

bool transposed_composite(const AffineLikeElement& e)
{
    const auto* f = std::get_if<FoldComposite>(&e.rep.form);
    return f && f->transposed;
}

void need_axis_aligned(const AffinePiece& p)
{
    if (!p.axis_aligned())
        throw ValidationError("fold composites need axis-aligned affine pieces");
}

} // namespace

AffineLikeElement simple_compose(const AffineLikeElement& f, const AffineLikeElement& fp, const ConeParams& params)
{
    if (f.target() != fp.source())
        throw CompositionError(CompositionError::Kind::RectangleMismatch,
                               "image strip lies in '" + f.target() + "' but the next domain strip lies in '" +
                                   fp.source() + "'");
    const bool fold_f = std::holds_alternative<FoldComposite>(f.rep.form);
    const bool fold_fp = std::holds_alternative<FoldComposite>(fp.rep.form);
    if (fold_f && fold_fp)
        throw CompositionError(CompositionError::Kind::MultiFold, "composition would pass the fold twice");
    if (transposed_composite(f) || transposed_composite(fp))
        return transpose(simple_compose(transpose(fp), transpose(f), params));

    AffineLikeElement out;
    out.P.rect = f.source();
    out.Q.rect = fp.target();
    out.n = f.n + fp.n;
    out.word = concat(f.word, fp.word);
    if (!fold_f && !fold_fp) {
        out.rep.form = compose(std::get<AffinePiece>(f.rep.form), std::get<AffinePiece>(fp.rep.form));
    } else if (fold_f) {
        FoldComposite c = std::get<FoldComposite>(f.rep.form);
        const auto& next = std::get<AffinePiece>(fp.rep.form);
        need_axis_aligned(next);
        c.post = compose(c.post, next);
        out.rep.form = c;
    } else {
        FoldComposite c = std::get<FoldComposite>(fp.rep.form);
        const auto& prev = std::get<AffinePiece>(f.rep.form);
        need_axis_aligned(prev);
        c.pre = compose(prev, c.pre);
        out.rep.form = c;
    }
    finish_element(out, params);
    if (!out.cone_ok)
        throw CompositionError(CompositionError::Kind::ConeViolation,
                               "simple composition " + word_key(out.word) + " violates the cone condition");
    return out;
}

Interval parabolic_delta(const AffineLikeElement& f0, const FoldingModel& g, const AffineLikeElement& f1)
{
    const auto* p0 = std::get_if<AffinePiece>(&f0.rep.form);
    const auto* p1 = std::get_if<AffinePiece>(&f1.rep.form);
    if (!p0 || !p1)
        throw CompositionError(CompositionError::Kind::MultiFold, "parabolic composition of a fold composite");
    need_axis_aligned(*p0);
    need_axis_aligned(*p1);
    // Nearest tip: the line of Q0 with the largest y; right edge of P1.
    const Rational q0_top = p0->b0 + max0(p0->b2);
    const Rational p1_right = p1->a0 + max0(p1->a1);
    return g.t + Interval(g.tip0) - Interval(g.b) * iv(q0_top) - iv(p1_right);
}

ParabolicResult parabolic_compose(const AffineLikeElement& f0, const FoldingModel& g, const AffineLikeElement& f1,
                                  const ConeParams& params)
{
    if (f0.target() != g.from || f1.source() != g.to)
        throw CompositionError(CompositionError::Kind::RectangleMismatch,
                               "parabolic composition needs Q0 in '" + g.from + "' and P1 in '" + g.to + "'");
    ParabolicResult out;
    out.delta = parabolic_delta(f0, g, f1);
    if (!(out.delta.lo() > 0.0))
        return out; // NotPossible, including the tangential case delta = 0
    const auto& p0 = std::get<AffinePiece>(f0.rep.form);
    const auto& p1 = std::get<AffinePiece>(f1.rep.form);
    const Rational q0_bottom = p0.b0 + min0(p0.b2);
    const Rational p1_left = p1.a0 + min0(p1.a1);
    const Interval d_max = g.t + Interval(g.tip0) - Interval(g.b) * iv(q0_bottom) - iv(p1_left);
    const Interval h(g.half_width);
    if (d_max.hi() > (h * h).lo())
        throw CompositionError(CompositionError::Kind::CrossingViolation,
                               "preimage of P1 leaves the tongue in '" + g.from + "'");
    out.possible = true;
    for (int sigma : {-1, 1}) {
        AffineLikeElement e;
        e.P.rect = f0.source();
        e.Q.rect = f1.target();
        e.n = f0.n + g.n0 + f1.n;
        e.word = concat(concat(f0.word, {sigma < 0 ? "G-" : "G+"}), f1.word);
        e.rep.form = FoldComposite{p0, p1, g, sigma, false};
        finish_element(e, params);
        (sigma < 0 ? out.minus : out.plus) = std::move(e);
    }
    return out;
}

bool transversality_ok(const Interval& delta, double q0_width, double p1_width, double interval_length, double eta)
{
    const double e = 1.0 - eta;
    const double need = std::max({pow(Interval(q0_width), e).hi(), pow(Interval(p1_width), e).hi(), interval_length});
    return delta.lo() >= need;
}

bool transversality_ok(const AffineLikeElement& f0, const FoldingModel& g, const AffineLikeElement& f1,
                       double interval_length, double eta)
{
    return transversality_ok(parabolic_delta(f0, g, f1), widths(f0).second, widths(f1).first, interval_length, eta);
}

bool py_condition(const Rational& ds, const Rational& du)
{
    for (const Rational* d : {&ds, &du})
        if (*d < 0 || *d > 1)
            throw ValidationError("dimensions must lie in [0, 1]");
    const Rational s = ds + du;
    const Rational m = ds > du ? ds : du;
    return s * s + m * m < s + m;
}

bool py_condition(double ds, double du)
{
    if (!std::isfinite(ds) || !std::isfinite(du))
        throw ValidationError("dimensions must be finite");
    return py_condition(rational_from_double(ds), rational_from_double(du));
}

AffineLikeElement transpose(const AffineLikeElement& e)
{
    AffineLikeElement t;
    t.n = e.n;
    t.word.assign(e.word.rbegin(), e.word.rend());
    t.P.rect = e.Q.rect;
    t.P.minus = e.Q.minus;
    t.P.plus = e.Q.plus;
    t.Q.rect = e.P.rect;
    t.Q.minus = e.P.minus;
    t.Q.plus = e.P.plus;
    if (const auto* a = std::get_if<AffinePiece>(&e.rep.form)) {
        t.rep.form = transpose(*a);
    } else {
        FoldComposite c = std::get<FoldComposite>(e.rep.form);
        c.transposed = !c.transposed;
        t.rep.form = c;
    }
    if (e.rep.ranges)
        t.rep.ranges = swap_ranges(*e.rep.ranges);
    t.cone_ok = e.cone_ok;
    t.distortion_ok = e.distortion_ok;
    return t;
}

std::string word_key(const std::vector<std::string>& word)
{
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i)
            out += ' ';
        out += word[i];
    }
    return out;
}

namespace {

nlohmann::ordered_json boundary_json(const StripBoundary& b)
{
    auto j = nlohmann::ordered_json::array();
    for (const Interval* c : {&b.c0, &b.c1, &b.c2})
        j.push_back({c->lo(), c->hi()});
    return j;
}

} // namespace

nlohmann::ordered_json element_to_json(const AffineLikeElement& e)
{
    nlohmann::ordered_json j;
    j["word"] = e.word;
    j["n"] = e.n;
    j["P"] = {{"rect", e.P.rect}, {"phi_minus", boundary_json(e.P.minus)}, {"phi_plus", boundary_json(e.P.plus)}};
    j["Q"] = {{"rect", e.Q.rect}, {"psi_minus", boundary_json(e.Q.minus)}, {"psi_plus", boundary_json(e.Q.plus)}};
    auto [p, q] = widths(e);
    j["widths"] = {{"p", p}, {"q", q}};
    j["flags"] = {{"cone", e.cone_ok}, {"distortion", e.distortion_ok}};
    return j;
}

} // namespace fdyn
