#include "fdyn/interval.hpp"

#include "fdyn/errors.hpp"

#include <ostream>

namespace fdyn {

double round_down(double x)
{
    if (x == 0.0)
        return -std::numeric_limits<double>::denorm_min();
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

double round_up(double x)
{
    if (x == 0.0)
        return std::numeric_limits<double>::denorm_min();
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

namespace {

// Exact zero results of exact operations stay zero; everything else is widened.
double down(double x, bool exact_zero) { return (exact_zero && x == 0.0) ? 0.0 : round_down(x); }
double up(double x, bool exact_zero) { return (exact_zero && x == 0.0) ? 0.0 : round_up(x); }

} // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (!(lo <= hi))
        throw ValidationError("interval with lo > hi or NaN bound");
}

Interval Interval::entire()
{
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
}

double Interval::mig() const
{
    if (lo_ <= 0.0 && hi_ >= 0.0)
        return 0.0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
}

Interval& Interval::operator+=(const Interval& o)
{
    const bool pt = lo_ == hi_ && o.lo_ == o.hi_;
    const double l = lo_ + o.lo_;
    const double h = hi_ + o.hi_;
    if (pt && l == 0.0) {
        lo_ = hi_ = 0.0;
        return *this;
    }
    lo_ = round_down(l);
    hi_ = round_up(h);
    return *this;
}

Interval& Interval::operator-=(const Interval& o)
{
    return *this += -o;
}

Interval& Interval::operator*=(const Interval& o)
{
    const double a = lo_ * o.lo_;
    const double b = lo_ * o.hi_;
    const double c = hi_ * o.lo_;
    const double d = hi_ * o.hi_;
    const bool zero = (lo_ == 0.0 && hi_ == 0.0) || (o.lo_ == 0.0 && o.hi_ == 0.0);
    if (zero) {
        lo_ = hi_ = 0.0;
        return *this;
    }
    const double l = std::min({a, b, c, d});
    const double h = std::max({a, b, c, d});
    const bool touches_zero = contains(0.0) || o.contains(0.0);
    lo_ = down(l, touches_zero);
    hi_ = up(h, touches_zero);
    return *this;
}

Interval& Interval::operator/=(const Interval& o)
{
    if (o.contains(0.0))
        throw ResolutionError("interval division by an interval containing zero");
    const double a = lo_ / o.lo_;
    const double b = lo_ / o.hi_;
    const double c = hi_ / o.lo_;
    const double d = hi_ / o.hi_;
    const bool touches_zero = contains(0.0);
    lo_ = down(std::min({a, b, c, d}), touches_zero);
    hi_ = up(std::max({a, b, c, d}), touches_zero);
    return *this;
}

Interval join(const Interval& a, const Interval& b)
{
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval square(const Interval& a)
{
    const double m = a.mig();
    const double M = a.mag();
    const double l = m == 0.0 ? 0.0 : round_down(m * m);
    return {std::max(0.0, l), round_up(M * M)};
}

Interval sqrt(const Interval& a)
{
    if (a.lo() < 0.0)
        throw ResolutionError("square root of an interval reaching below zero");
    const double l = a.lo() == 0.0 ? 0.0 : std::max(0.0, round_down(std::sqrt(a.lo())));
    return {l, round_up(std::sqrt(a.hi()))};
}

Interval abs(const Interval& a)
{
    return {a.mig(), a.mag()};
}

// libm exp/log are not correctly rounded; two ulps cover the documented error of glibc.
Interval exp(const Interval& a)
{
    return {std::max(0.0, round_down(round_down(std::exp(a.lo())))), round_up(round_up(std::exp(a.hi())))};
}

Interval log(const Interval& a)
{
    if (a.lo() <= 0.0)
        throw ResolutionError("logarithm of a non-positive interval");
    return {round_down(round_down(std::log(a.lo()))), round_up(round_up(std::log(a.hi())))};
}

Interval pow(const Interval& a, double p)
{
    if (p == 0.0)
        return Interval(1.0);
    if (p == 1.0)
        return a;
    return exp(log(a) * Interval(p));
}

Interval pow(const Interval& a, const Interval& p)
{
    return exp(log(a) * p);
}

std::ostream& operator<<(std::ostream& os, const Interval& x)
{
    return os << '[' << x.lo() << ", " << x.hi() << ']';
}

} // namespace fdyn
