#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's optimisers: everything is brute force over small instances.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "regdec/measure.hpp"

namespace oracle {

inline std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / n); }

// sum_x w(x) f(x) over the points whose bit is set in `mask` (n <= 64).
inline double masked_integral(std::span<const double> f, std::span<const double> w, std::uint64_t mask) {
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if ((mask >> i) & 1U) total += w[i] * f[i];
  }
  return total;
}

// max over all S, T of |sum_{x in S, y in T} w(x) w(y) f(x, y)|.
inline double cut_norm(std::span<const double> f, std::span<const double> base) {
  const std::size_t n = base.size();
  double best = 0.0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << n); ++t) {
      double total = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        if (!((s >> x) & 1U)) continue;
        for (std::size_t y = 0; y < n; ++y) {
          if ((t >> y) & 1U) total += base[x] * base[y] * f[x * n + y];
        }
      }
      best = std::max(best, std::abs(total));
    }
  }
  return best;
}

// Same maximum restricted to S = T or S, T disjoint.
inline double symmetric_cut_norm(std::span<const double> f, std::span<const double> base) {
  const std::size_t n = base.size();
  double best = 0.0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << n); ++t) {
      if (s != t && (s & t) != 0) continue;
      double total = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        if (!((s >> x) & 1U)) continue;
        for (std::size_t y = 0; y < n; ++y) {
          if ((t >> y) & 1U) total += base[x] * base[y] * f[x * n + y];
        }
      }
      best = std::max(best, std::abs(total));
    }
  }
  return best;
}

// max over intervals [i, j] of the identity order.
inline double interval_norm(std::span<const double> f, std::span<const double> w) {
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = i; j < f.size(); ++j) {
      total += w[j] * f[j];
      best = std::max(best, std::abs(total));
    }
  }
  return best;
}

inline double lp(std::span<const double> f, std::span<const double> w, double p) {
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += w[i] * std::pow(std::abs(f[i]), p);
  return std::pow(total, 1.0 / p);
}

// Cell averages for a labelling of the points.
inline std::vector<double> cell_average(std::span<const double> f, std::span<const double> w,
                                        const std::vector<std::size_t>& label) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double mass = 0.0, total = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (label[j] == label[i]) {
        mass += w[j];
        total += w[j] * f[j];
      }
    }
    out[i] = mass > 0 ? total / mass : 0.0;
  }
  return out;
}

// Exact fraction with 128-bit parts, enough for the small bound examples.
struct Fraction {
  __int128 num = 0;
  __int128 den = 1;
};

inline __int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline __int128 ceil_div(__int128 a, __int128 b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

// Affine growth F(n) = a n + b with integer a, b, iterated from 0.
// Returns -1 once the value passes 2^100.
inline __int128 affine_iterate(__int128 a, __int128 b, __int128 times) {
  const __int128 ceiling = static_cast<__int128>(1) << 100;
  if (a == 1) return times > ceiling / b ? -1 : times * b;
  __int128 x = 0;
  for (__int128 i = 0; i < times; ++i) {
    x = a * x + b;
    if (x > ceiling) return -1;
  }
  return x;
}

// Reg(k, l, sigma, p, F) for affine integer F and sigma = sn/sd, p - 1 = qn/qd.
// Returns -1 when the result would not fit.
inline __int128 reg_small(__int128 ell, __int128 sn, __int128 sd, __int128 qn, __int128 qd, __int128 a, __int128 b,
                          __int128 limit = 1000000) {
  // L = ceil(l sd^2 qd / (sn^2 qn))
  const __int128 L = ceil_div(ell * sd * sd * qd, sn * sn * qn);
  __int128 h = 0;
  for (__int128 i = 1; i < L; ++i) {
    if (h > limit) return -1;
    const __int128 x = affine_iterate(a, b, h + 2);
    if (x < 0 || x > (static_cast<__int128>(1) << 40)) return -1;
    // ceil(sn^2 l x^2 qd / (sd^2 qn))
    h += ceil_div(sn * sn * ell * x * x * qd, sd * sd * qn);
  }
  if (h > limit) return -1;
  const __int128 reg = affine_iterate(a, b, h);
  return reg;
}

}  // namespace oracle
