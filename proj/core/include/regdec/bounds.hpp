#pragma once

// Explicit upper bounds on partition complexity, evaluated exactly:
//
//   h(0) = 0,  h(i+1) = h(i) + ceil(sigma^2 l F^(h(i)+2)(0)^2 / (p-1))
//   L = ceil(l / (sigma^2 (p-1))),  R = h(L-1),  Reg = F^(R)(0)
//   Reg'(k, sigma, p, F) = (k+1)^Reg(k, 1, sigma, p, F')  with F'(n) = F((k+1)^n)
//
// Iterates apply ceil(F), which can only enlarge the result.

#include <optional>
#include <vector>

#include "regdec/growth.hpp"

namespace regdec {

struct BoundReport {
  BigInt L;
  std::vector<BigInt> h_table;  // h(0), ..., as far as evaluated
  std::optional<BigInt> R;
  std::optional<BigInt> reg;
  // Set by partition_count_bound: the inner Reg(k, 1, sigma, p, F') and its power.
  std::optional<BigInt> inner_reg;
  std::optional<BigInt> reg_prime;
  bool overflowed = false;
  // log10 of the first quantity that exceeded the digit cap (a lower estimate,
  // saturating at the largest finite double).
  double log10_estimate = 0.0;
};

BoundReport regularity_bound(std::uint64_t k, std::uint64_t ell, const BigRational& sigma,
                             const BigRational& p, const GrowthFunction& f,
                             std::size_t digit_cap = kDefaultDigitCap);

BoundReport partition_count_bound(std::uint64_t k, const BigRational& sigma, const BigRational& p,
                                  const GrowthFunction& f, std::size_t digit_cap = kDefaultDigitCap);

}  // namespace regdec
