#include "colcont/common.hpp"

#include <cctype>
#include <charconv>

namespace colcont {

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt big_pow(const BigInt& base, std::uint64_t exponent) {
  BigInt result = 1;
  BigInt b = base;
  while (exponent) {
    if (exponent & 1u) result *= b;
    exponent >>= 1;
    if (exponent) b *= b;
  }
  return result;
}

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorCode::parse_error, "not a rational number: '" + std::string(text) + "'");
}

BigInt parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) bad_number(whole);
  for (char ch : text)
    if (!std::isdigit(static_cast<unsigned char>(ch))) bad_number(whole);
  return BigInt(std::string(text));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) bad_number(text);

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(s.substr(0, slash), text);
    BigInt den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) bad_number(text);
    value = Rational(num, den);
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view ex = s.substr(e + 1);
      bool neg_exp = false;
      if (!ex.empty() && (ex.front() == '-' || ex.front() == '+')) {
        neg_exp = ex.front() == '-';
        ex.remove_prefix(1);
      }
      auto [ptr, ec] = std::from_chars(ex.data(), ex.data() + ex.size(), exponent);
      if (ec != std::errc() || ptr != ex.data() + ex.size() || ex.empty()) bad_number(text);
      if (neg_exp) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      std::string_view frac = s.substr(dot + 1);
      std::string_view whole = s.substr(0, dot);
      if (whole.empty() && frac.empty()) bad_number(text);
      digits = std::string(whole) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
    } else {
      digits = std::string(s);
    }
    BigInt mantissa = parse_integer(digits, text);
    if (exponent >= 0)
      value = Rational(mantissa * big_pow(10, static_cast<std::uint64_t>(exponent)));
    else
      value = Rational(mantissa, big_pow(10, static_cast<std::uint64_t>(-exponent)));
  }
  return negative ? Rational(-value) : value;
}

std::string rational_str(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

bool draw_below(std::uint64_t x, const Rational& q) {
  // x / 2^64 < num / den  <=>  x * den < num * 2^64
  BigInt lhs = BigInt(x) * boost::multiprecision::denominator(q);
  BigInt rhs = boost::multiprecision::numerator(q) << 64;
  return lhs < rhs;
}

}  // namespace colcont
