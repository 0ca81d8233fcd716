#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace fdyn {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "p/q", integers and plain decimals ("0.25", "-1.5e-3"). Decimals are read exactly.
Rational parse_rational(std::string_view text);

// Exact value of a finite double.
Rational rational_from_double(double x);

std::string to_string(const Rational& q);

// Nearest double plus the two neighbouring doubles that enclose q.
double to_double(const Rational& q);
double to_double_down(const Rational& q);
double to_double_up(const Rational& q);

} // namespace fdyn
