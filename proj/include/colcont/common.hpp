#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace colcont {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class ErrorCode {
  invalid_argument = 1,
  host_mismatch,
  unknown_family,
  budget_exceeded,
  empty_meet,
  parse_error,
  io_error,
  unsupported,
  non_monotone,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

BigInt binomial(std::uint64_t n, std::uint64_t k);
BigInt big_pow(const BigInt& base, std::uint64_t exponent);

// Accepts "3", "-2", "1/20", "0.05", "2.5e-3".
Rational parse_rational(std::string_view text);
std::string rational_str(const Rational& q);
double to_double(const Rational& q);

// Exact test of u < q where u = x / 2^64 for a 64-bit draw x.
bool draw_below(std::uint64_t x, const Rational& q);

}  // namespace colcont
