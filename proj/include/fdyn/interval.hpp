#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>

namespace fdyn {

// Closed interval of doubles. Every arithmetic result is widened outward by one
// ulp on each side, so the exact real result of an operation on enclosed reals
// stays enclosed.
class Interval {
public:
    constexpr Interval() = default;
    constexpr Interval(double x) : lo_(x), hi_(x) {} // NOLINT(google-explicit-constructor)
    Interval(double lo, double hi);

    static Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }
    static Interval entire();

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mid() const { return 0.5 * (lo_ + hi_); }
    double width() const { return hi_ - lo_; }
    double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
    double mig() const;

    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool interior_contains(const Interval& o) const { return lo_ < o.lo_ && o.hi_ < hi_; }
    bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
    bool certainly_positive() const { return lo_ > 0.0; }
    bool certainly_negative() const { return hi_ < 0.0; }

    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
    Interval& operator/=(const Interval& o);

    friend Interval operator+(Interval a, const Interval& b) { return a += b; }
    friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
    friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
    friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
    friend Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

double round_down(double x);
double round_up(double x);

Interval join(const Interval& a, const Interval& b);
Interval square(const Interval& a);
Interval sqrt(const Interval& a);
Interval abs(const Interval& a);
Interval exp(const Interval& a);
Interval log(const Interval& a);
// a^p for a > 0 and any real p.
Interval pow(const Interval& a, double p);
Interval pow(const Interval& a, const Interval& p);

std::ostream& operator<<(std::ostream& os, const Interval& x);

} // namespace fdyn
