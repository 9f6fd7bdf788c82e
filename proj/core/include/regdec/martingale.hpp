#pragma once

// Martingale difference sequences over partition filtrations, and gap
// functions for the Lp inequalities behind the energy-increment argument.
// Every gap is right-hand side minus left-hand side, so a valid instance
// yields a nonnegative number.

#include <vector>

#include "regdec/measure.hpp"

namespace regdec {

// Partitions P_0, P_1, ..., each refining its predecessor.
class Filtration {
 public:
  explicit Filtration(std::vector<Partition> partitions);

  std::size_t size() const noexcept { return partitions_.size(); }
  const Partition& operator[](std::size_t i) const { return partitions_.at(i); }
  const std::vector<Partition>& partitions() const noexcept { return partitions_; }

 private:
  std::vector<Partition> partitions_;
};

// d_0 = E(f|P_0), d_i = E(f|P_i) - E(f|P_{i-1}).
std::vector<RandomVar> difference_sequence(const RandomVar& f, const Filtration& filt,
                                           const GroundSpace& space);

// (1/(p-1))^{1/2} ||sum d_i||_p - (sum ||d_i||_p^2)^{1/2}.
double square_function_gap(const RandomVar& f, const Filtration& filt, const GroundSpace& space, double p);

// ||f||^2 - ||E(f|B)||^2 - (p-1) ||f - E(f|B)||^2, all in Lp.
double conditional_convexity_gap(const RandomVar& f, const Partition& b, const GroundSpace& space,
                                 double p);

// (||x+y||^2 + ||x-y||^2)/2 - ||x||^2 - (p-1) ||y||^2, all in Lp.
double uniform_convexity_gap(const RandomVar& x, const RandomVar& y, const GroundSpace& space, double p);

// 2 ||sum_{i=0}^n d_i||_p - ||sum_{i=from}^{to} d_i||_p for 0 <= from <= to <= n.
double basic_sequence_gap(const std::vector<RandomVar>& d, const GroundSpace& space, double p,
                          std::size_t from, std::size_t to);

}  // namespace regdec
