#include "fdyn/rational.hpp"

#include "fdyn/errors.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace fdyn {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(std::string_view s, std::string_view whole)
{
    if (s.empty())
        throw ValidationError("malformed number '" + std::string(whole) + "'");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size())
        throw ValidationError("malformed number '" + std::string(whole) + "'");
    cpp_int v = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw ValidationError("malformed number '" + std::string(whole) + "'");
        v = v * 10 + (s[i] - '0');
    }
    return neg ? cpp_int(-v) : v;
}

Rational parse_decimal(std::string_view s, std::string_view whole)
{
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        exponent = static_cast<long>(parse_integer(s.substr(e + 1), whole));
        s = s.substr(0, e);
    }
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    std::string digits;
    long scale = 0;
    bool seen_dot = false;
    for (char c : s) {
        if (c == '.' && !seen_dot) {
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ValidationError("malformed number '" + std::string(whole) + "'");
        digits.push_back(c);
        if (seen_dot)
            ++scale;
    }
    if (digits.empty())
        throw ValidationError("malformed number '" + std::string(whole) + "'");
    cpp_int mant = parse_integer(digits, whole);
    long e10 = exponent - scale;
    cpp_int p = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(e10)));
    Rational r = e10 >= 0 ? Rational(mant * p) : Rational(mant, p);
    return neg ? Rational(-r) : r;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        cpp_int p = parse_integer(text.substr(0, slash), text);
        cpp_int q = parse_integer(text.substr(slash + 1), text);
        if (q == 0)
            throw ValidationError("zero denominator in '" + std::string(text) + "'");
        return Rational(p, q);
    }
    return parse_decimal(text, text);
}

Rational rational_from_double(double x)
{
    if (!std::isfinite(x))
        throw ValidationError("non-finite value cannot be converted to a rational");
    int e = 0;
    double m = std::frexp(x, &e);
    // m * 2^53 is an integer for every finite double.
    auto mant = static_cast<long long>(std::ldexp(m, 53));
    e -= 53;
    Rational r(mant);
    cpp_int p = boost::multiprecision::pow(cpp_int(2), static_cast<unsigned>(std::abs(e)));
    return e >= 0 ? Rational(r * p) : Rational(r / p);
}

std::string to_string(const Rational& q)
{
    if (denominator(q) == 1)
        return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q)
{
    return q.convert_to<double>();
}

double to_double_down(const Rational& q)
{
    double d = to_double(q);
    while (rational_from_double(d) > q)
        d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return d;
}

double to_double_up(const Rational& q)
{
    double d = to_double(q);
    while (rational_from_double(d) < q)
        d = std::nextafter(d, std::numeric_limits<double>::infinity());
    return d;
}

} // namespace fdyn
