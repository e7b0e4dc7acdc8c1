#include "tim/rational.hpp"

#include <algorithm>
#include <cctype>

namespace tim {

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace {

BigInt parse_integer(std::string_view s, bool allow_sign, std::string_view whole) {
  auto fail = [&] { return BadRational("bad rational syntax: \"" + std::string(whole) + "\""); };
  std::string_view digits = s;
  bool negative = false;
  if (allow_sign && !digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw fail();
  BigInt v{std::string(digits)};
  return negative ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, true, text));
  const BigInt num = parse_integer(text.substr(0, slash), true, text);
  const BigInt den = parse_integer(text.substr(slash + 1), false, text);
  if (den == 0) throw BadRational("zero denominator: \"" + std::string(text) + "\"");
  return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace tim
