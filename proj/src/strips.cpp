#include "fdyn/affine_like.hpp"

namespace fdyn {

Interval StripBoundary::eval(const Interval& s) const
{
    return c0 + c1 * s + c2 * square(s);
}

namespace {

Interval iv(const Rational& q)
{
    return Interval(to_double_down(q), to_double_up(q));
}

// Quadratic enclosure of sqrt(L - beta s) on s in [0, 1]: Taylor expansion at 1/2
// with the cubic remainder folded into the constant term.
StripBoundary sqrt_enclosure(const Interval& L, const Interval& beta)
{
    const Interval m(0.5);
    const Interval g0 = sqrt(L - beta * m);
    const Interval g1 = -beta / (Interval(2.0) * g0);
    const Interval g2 = -square(beta) / (Interval(8.0) * g0 * square(g0));
    const Interval g = sqrt(L - beta * Interval(0.0, 1.0));
    const Interval g5 = square(square(g)) * g;
    const double r = (Interval(3.0) * abs(beta * square(beta)) / (Interval(8.0) * g5) / Interval(48.0)).hi();
    StripBoundary out;
    out.c0 = g0 - g1 * m + g2 * square(m) + Interval(-r, r);
    out.c1 = g1 - Interval(2.0) * g2 * m;
    out.c2 = g2;
    return out;
}

// base + scale * g
StripBoundary affine_image(const StripBoundary& g, const Interval& base, const Interval& scale)
{
    return {base + scale * g.c0, scale * g.c1, scale * g.c2};
}

void order(StripBoundary& minus, StripBoundary& plus)
{
    if (plus.eval(Interval(0.5)).mid() < minus.eval(Interval(0.5)).mid())
        std::swap(minus, plus);
}

Rational min0(const Rational& a)
{
    return a < 0 ? a : Rational(0);
}

Rational max0(const Rational& a)
{
    return a > 0 ? a : Rational(0);
}

void affine_strips(const AffinePiece& f, AffineLikeElement& e)
{
    if (f.a1 == 0 || f.b2 == 0)
        throw ValidationError("degenerate empty strip in word '" + word_key(e.word) + "'");
    const auto inside = [](const Rational& c, const Rational& k1, const Rational& k2) {
        return c + min0(k1) + min0(k2) >= 0 && c + max0(k1) + max0(k2) <= 1;
    };
    if (!inside(f.a0, f.a1, f.a2) || !inside(f.b0, f.b1, f.b2))
        throw ValidationError("strip of word '" + word_key(e.word) + "' leaves its rectangle");
    e.P.minus = {iv(f.a0 + min0(f.a1)), iv(f.a2), Interval(0.0)};
    e.P.plus = {iv(f.a0 + max0(f.a1)), iv(f.a2), Interval(0.0)};
    e.Q.minus = {iv(f.b0 + min0(f.b2)), iv(f.b1), Interval(0.0)};
    e.Q.plus = {iv(f.b0 + max0(f.b2)), iv(f.b1), Interval(0.0)};
}

void composite_strips(const FoldComposite& f, AffineLikeElement& e)
{
    const Interval b(f.fold.b);
    const Interval c0 = iv(f.pre.a0), s0 = iv(f.pre.a1), e0 = iv(f.pre.b0), h0 = iv(f.pre.b2);
    const Interval c1 = iv(f.post.a0), s1 = iv(f.post.a1), e1 = iv(f.post.b0), h1 = iv(f.post.b2);
    const Interval sg(static_cast<double>(f.sigma));
    const Interval K = f.fold.t + Interval(f.fold.tip0) - b * e0 - c1;
    const Interval bh0 = b * h0;
    // P: x0 = c0 + s0 (1/2 + sigma sqrt(K - s1 x2 - b h0 y0)) at x2 = 0 and 1, as functions of y0.
    StripBoundary pm = affine_image(sqrt_enclosure(K, bh0), c0 + s0 * Interval(0.5), sg * s0);
    StripBoundary pp = affine_image(sqrt_enclosure(K - s1, bh0), c0 + s0 * Interval(0.5), sg * s0);
    // Q: y2 = e1 + h1 (1/2 + sigma sqrt(...)) at y0 = 0 and 1, as functions of x2.
    StripBoundary qm = affine_image(sqrt_enclosure(K, s1), e1 + h1 * Interval(0.5), sg * h1);
    StripBoundary qp = affine_image(sqrt_enclosure(K - bh0, s1), e1 + h1 * Interval(0.5), sg * h1);
    order(pm, pp);
    order(qm, qp);
    if (f.transposed) {
        e.P.minus = qm;
        e.P.plus = qp;
        e.Q.minus = pm;
        e.Q.plus = pp;
    } else {
        e.P.minus = pm;
        e.P.plus = pp;
        e.Q.minus = qm;
        e.Q.plus = qp;
    }
}

} // namespace

void finish_element(AffineLikeElement& e, const ConeParams& params)
{
    e.rep.ranges = compute_ranges(e.rep);
    if (const auto* a = std::get_if<AffinePiece>(&e.rep.form))
        affine_strips(*a, e);
    else
        composite_strips(std::get<FoldComposite>(e.rep.form), e);
    e.cone_ok = verify_cone(e.rep, params);
    e.distortion_ok = verify_distortion(e.rep, params.C);
}

} // namespace fdyn
