// Copyright 2026 The fairx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRX_RATIONAL_HPP
#define FAIRX_RATIONAL_HPP

#include <gmpxx.h>

#include <cctype>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairx {

/// Exact rational number. GMP keeps every result in lowest terms with a
/// positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

/// Error category shared by every fairx operation that rejects its input.
enum class ErrorCode {
  kParse,
  kNonPositiveEndowment,
  kSelfLoop,
  kDuplicateEdge,
  kDuplicateNode,
  kUnknownNode,
  kAllocationMismatch,
  kDimensionMismatch,
  kNegativeLambda,
  kEmptyEdgeSet,
  kNotOptimalInput,
  kInfeasibleTransport,
  kNotLexOptimalInput,
  kInstanceTooLarge,
  kMissingReference,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kNonPositiveEndowment: return "NonPositiveEndowment";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kDuplicateNode: return "DuplicateNode";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kAllocationMismatch: return "AllocationMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNegativeLambda: return "NegativeLambda";
    case ErrorCode::kEmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorCode::kNotOptimalInput: return "NotOptimalInput";
    case ErrorCode::kInfeasibleTransport: return "InfeasibleTransport";
    case ErrorCode::kNotLexOptimalInput: return "NotLexOptimalInput";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::kMissingReference: return "MissingReference";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline std::optional<Rational> parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) return std::nullopt;
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
    if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;

  std::string digits = std::string(int_part) + std::string(frac_part);
  Integer numerator(digits.empty() ? std::string("0") : digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_part.size());
  Rational value(numerator, scale);
  value.canonicalize();
  if (exponent != 0) {
    Integer power;
    mpz_ui_pow_ui(power.get_mpz_t(), 10,
                  static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent > 0) {
      value *= Rational(power);
    } else {
      value /= Rational(power);
    }
  }
  if (negative) value = -value;
  return value;
}

}  // namespace detail

/// Parses "p/q", integers, and decimals ("2.5", "1e-3"). Throws Error(kParse)
/// on malformed text or a zero denominator.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Error {
    return Error(ErrorCode::kParse, "not a rational number: '" + std::string(text) + "'");
  };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw fail();

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    bool negative = false;
    if (!num.empty() && (num.front() == '+' || num.front() == '-')) {
      negative = num.front() == '-';
      num.remove_prefix(1);
    }
    if (!detail::all_digits(num) || !detail::all_digits(den)) throw fail();
    Integer n(std::string(num), 10);
    Integer d(std::string(den), 10);
    if (d == 0) throw fail();
    Rational value(n, d);
    value.canonicalize();
    return negative ? Rational(-value) : value;
  }
  if (auto value = detail::parse_decimal(s)) return *value;
  throw fail();
}

/// Exact rendering: "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& value) { return value.get_str(); }

inline double to_double(const Rational& value) { return value.get_d(); }

inline Rational sum(std::span<const Rational> values) {
  Rational total = 0;
  for (const auto& v : values) total += v;
  return total;
}

}  // namespace fairx

#endif  // FAIRX_RATIONAL_HPP
