#include "regdec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regdec/error.hpp"

namespace regdec {

namespace {

void check_domain(std::uint64_t k, std::uint64_t ell, const BigRational& sigma, const BigRational& p) {
  require(k >= 1, ErrorCode::invalid_argument, "k must be a positive integer");
  require(ell >= 1, ErrorCode::invalid_argument, "the family size must be a positive integer");
  require(sigma > 0 && sigma <= 1, ErrorCode::invalid_argument, "sigma must lie in (0, 1]");
  require(p > 1 && p <= 2, ErrorCode::invalid_argument, "p must lie in (1, 2]");
}

}  // namespace

BoundReport regularity_bound(std::uint64_t k, std::uint64_t ell, const BigRational& sigma,
                             const BigRational& p, const GrowthFunction& f, std::size_t digit_cap) {
  check_domain(k, ell, sigma, p);
  BoundReport out;
  const double cap = static_cast<double>(digit_cap);
  const BigRational sigma2 = sigma * sigma;
  out.L = ceil(BigRational(ell) / (sigma2 * (p - 1)));

  BigInt h = 0;
  out.h_table.push_back(h);
  for (BigInt i = 1; i < out.L; ++i) {
    const auto x = iterate_from_zero(f, h + 2, digit_cap);
    if (x.overflowed()) {
      out.overflowed = true;
      out.log10_estimate = std::min(2.0 * x.log10_estimate, std::numeric_limits<double>::max());
      return out;
    }
    const BigRational term = sigma2 * BigRational(ell) * BigRational(*x.value) * BigRational(*x.value) / (p - 1);
    h += ceil(term);
    if (log10_of(h) > cap) {
      out.overflowed = true;
      out.log10_estimate = log10_of(h);
      return out;
    }
    out.h_table.push_back(h);
  }
  out.R = h;
  const auto reg = iterate_from_zero(f, h, digit_cap);
  if (reg.overflowed()) {
    out.overflowed = true;
    out.log10_estimate = reg.log10_estimate;
    return out;
  }
  out.reg = *reg.value;
  return out;
}

BoundReport partition_count_bound(std::uint64_t k, const BigRational& sigma, const BigRational& p,
                                  const GrowthFunction& f, std::size_t digit_cap) {
  check_domain(k, 1, sigma, p);
  require(k < (std::uint64_t{1} << 32), ErrorCode::invalid_argument, "k is too large");
  const auto shifted = GrowthFunction::exp_precomposed(k + 1, f);
  BoundReport out = regularity_bound(k, 1, sigma, p, shifted, digit_cap);
  if (!out.reg) return out;
  out.inner_reg = out.reg;
  out.reg.reset();
  const double lg_inner = log10_of(*out.inner_reg);
  const double digits = std::pow(10.0, std::min(lg_inner, 300.0)) * std::log10(static_cast<double>(k + 1));
  if (digits > static_cast<double>(digit_cap)) {
    out.overflowed = true;
    out.log10_estimate = digits;
    return out;
  }
  out.reg_prime = boost::multiprecision::pow(BigInt(k + 1), out.inner_reg->convert_to<unsigned>());
  return out;
}

}  // namespace regdec
