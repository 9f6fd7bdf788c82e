#pragma once

// Growth functions F: N -> Q (increasing, F(n) >= n + 1) and their iterates
// F^(m)(0), evaluated in exact big-integer arithmetic.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace regdec {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Exact parse of "3", "-0.25", "1.5e-3" or "7/8".
BigRational parse_rational(std::string_view text);
// Shortest decimal that round-trips to `x`, parsed exactly (0.9 -> 9/10).
BigRational rational_from_double(double x);
BigInt ceil(const BigRational& q);
std::string to_string(const BigRational& q);
double to_double(const BigRational& q);
// Approximate base-10 logarithm of a positive integer.
double log10_of(const BigInt& n);

// Default digit budget for exact bound evaluation.
inline constexpr std::size_t kDefaultDigitCap = 100000;

class GrowthFunction {
 public:
  struct Successor {};
  // a*n + b
  struct Affine {
    BigRational a, b;
  };
  // values[n] for n < values.size(), then tail_a*n + tail_b.
  struct Table {
    std::vector<BigRational> values;
    BigRational tail_a, tail_b;
  };
  // sum_i coefficients[i] * n^i
  struct Polynomial {
    std::vector<BigRational> coefficients;
  };
  // inner(base^n)
  struct ExpPrecomposed {
    std::uint64_t base;
    std::shared_ptr<const GrowthFunction> inner;
  };
  using Kind = std::variant<Successor, Affine, Table, Polynomial, ExpPrecomposed>;

  static GrowthFunction successor();
  static GrowthFunction affine(BigRational a, BigRational b);
  static GrowthFunction table(std::vector<BigRational> values, BigRational tail_a, BigRational tail_b);
  static GrowthFunction polynomial(std::vector<BigRational> coefficients);
  static GrowthFunction exp_precomposed(std::uint64_t base, GrowthFunction inner);

  // F(n) = 8n / eta^2 + 1, the schedule behind uniform partitions.
  static GrowthFunction uniform_partition_preset(const BigRational& eta);
  // F(n) = (n + 1) + sum_{i <= n} 8 / h(i) for h(i) = 1/(i+1), i.e. 4n^2 + 13n + 9.
  static GrowthFunction graphon_reciprocal_preset();
  // Same construction for a constant h(i) = c.
  static GrowthFunction graphon_constant_preset(const BigRational& c);

  const Kind& kind() const noexcept { return kind_; }

  BigRational operator()(const BigInt& n) const;
  // Ceiling of F(n); the map actually iterated by the bound calculators.
  BigInt ceil_at(const BigInt& n) const;
  double value(std::uint64_t n) const;

  // Canonical spec string accepted by parse_growth.
  std::string describe() const;

 private:
  explicit GrowthFunction(Kind kind);
  void validate() const;

  Kind kind_;
};

// Mini-language: "succ", "affine:a,b", "table:v0,v1,...;a,b", "poly:c0,c1,...",
// "uniform:eta", "graphon:h=recip", "graphon:h=const:c", "exp:base:inner".
GrowthFunction parse_growth(std::string_view spec);

// Result of evaluating x_0 = 0, x_{t+1} = ceil(F(x_t)) for `times` steps.
struct IterationResult {
  std::optional<BigInt> value;  // empty when the digit cap was exceeded
  // log10 of the value when known; a lower estimate when overflowed.
  double log10_estimate = 0.0;

  bool overflowed() const noexcept { return !value.has_value(); }
};

IterationResult iterate_from_zero(const GrowthFunction& f, const BigInt& times,
                                  std::size_t digit_cap = kDefaultDigitCap);

}  // namespace regdec
