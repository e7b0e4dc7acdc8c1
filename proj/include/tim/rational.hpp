#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace tim {

/// Arbitrary-precision exact rational. All probability and DoF accounting uses this.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct BadRational : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Accepts "p", "-p", "p/q" with decimal integers and q != 0. Whitespace is
/// not allowed. Result is reduced.
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

}  // namespace tim
