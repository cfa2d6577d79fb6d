#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hspeed {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Elements of a structure's domain are 0..n-1 internally; the JSON boundary
// shifts to 1..n.
using Element = int;
using Permutation = std::vector<Element>;

// Contract violations carry a stable code string so the CLI can report them
// as machine-readable JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr std::string_view kMissingConstant = "MissingConstant";
inline constexpr std::string_view kNotInjective = "NotInjective";
inline constexpr std::string_view kLanguageMismatch = "LanguageMismatch";
inline constexpr std::string_view kArityMismatch = "ArityMismatch";
inline constexpr std::string_view kInvalidStructure = "InvalidStructure";
inline constexpr std::string_view kOutOfRange = "OutOfRange";
inline constexpr std::string_view kInvalidTemplate = "InvalidTemplate";
inline constexpr std::string_view kConstantInInfiniteClass = "ConstantInInfiniteClass";
inline constexpr std::string_view kConstantsUnsupported = "ConstantsUnsupported";
inline constexpr std::string_view kNonIntegralCount = "NonIntegralCount";
inline constexpr std::string_view kBudgetExceeded = "BudgetExceeded";
inline constexpr std::string_view kFitFailed = "FitFailed";
inline constexpr std::string_view kMixedTemplates = "MixedTemplates";
inline constexpr std::string_view kNotHereditary = "NotHereditary";
inline constexpr std::string_view kInvalidProperty = "InvalidProperty";
inline constexpr std::string_view kTooFewRows = "TooFewRows";
inline constexpr std::string_view kInsufficientComponents = "InsufficientComponents";
inline constexpr std::string_view kBadSplit = "BadSplit";
inline constexpr std::string_view kEmptyVertexSet = "EmptyVertexSet";
inline constexpr std::string_view kInvalidHypergraph = "InvalidHypergraph";
inline constexpr std::string_view kInfeasibleDensity = "InfeasibleDensity";
inline constexpr std::string_view kSearchBudgetExceeded = "SearchBudgetExceeded";
inline constexpr std::string_view kTooSmall = "TooSmall";
inline constexpr std::string_view kNotStrictlyBalanced = "NotStrictlyBalanced";
inline constexpr std::string_view kPrecondition = "PreconditionFailed";
inline constexpr std::string_view kSampleBudgetExceeded = "SampleBudgetExceeded";
inline constexpr std::string_view kEstimatorFailed = "EstimatorFailed";
inline constexpr std::string_view kUnknownKind = "UnknownKind";
inline constexpr std::string_view kParseError = "ParseError";
inline constexpr std::string_view kUsageError = "UsageError";
}  // namespace errc

[[noreturn]] inline void fail(std::string_view code, const std::string& message) {
  throw Error(std::string(code), message);
}

inline BigInt factorial(int n) {
  BigInt result = 1;
  for (int i = 2; i <= n; ++i) result *= i;
  return result;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

inline BigInt ipow(const BigInt& base, unsigned exponent) {
  BigInt result = 1;
  BigInt b = base;
  while (exponent) {
    if (exponent & 1U) result *= b;
    b *= b;
    exponent >>= 1U;
  }
  return result;
}

inline std::string to_string(const BigInt& value) { return value.str(); }

// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Accepts "p", "p/q", and finite decimals such as "1.6" (read exactly).
inline Rational parse_rational(std::string_view text) {
  auto bad = [&]() -> Rational {
    fail(errc::kParseError, "not a rational number: '" + std::string(text) + "'");
  };
  if (text.empty()) return bad();
  auto parse_int = [&](std::string_view digits) -> BigInt {
    std::string_view body = digits;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
    if (body.empty()) bad();
    for (char ch : body)
      if (ch < '0' || ch > '9') bad();
    BigInt value(std::string(digits.front() == '+' ? digits.substr(1) : digits));
    return value;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_int(text.substr(0, slash));
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) bad();
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    std::string frac(text.substr(dot + 1));
    if (frac.empty()) bad();
    bool negative = !digits.empty() && digits.front() == '-';
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    BigInt whole = parse_int(digits);
    BigInt fraction = parse_int(frac);
    BigInt scale = ipow(10, static_cast<unsigned>(frac.size()));
    Rational result(whole * scale + (negative ? -fraction : fraction), scale);
    return result;
  }
  return Rational(parse_int(text));
}

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

inline bool is_integer(const Rational& value) {
  return boost::multiprecision::denominator(value) == 1;
}

}  // namespace hspeed
