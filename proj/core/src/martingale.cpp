#include "regdec/martingale.hpp"

#include <cmath>

#include "regdec/error.hpp"

namespace regdec {

namespace {

void check_exponent(double p) {
  require(p > 1.0 && p <= 2.0, ErrorCode::invalid_argument, "exponent p must lie in (1, 2]");
}

double squared_norm(const RandomVar& f, const GroundSpace& space, double p) {
  const double n = lp_norm(f, space, p);
  return n * n;
}

}  // namespace

Filtration::Filtration(std::vector<Partition> partitions) : partitions_(std::move(partitions)) {
  require(!partitions_.empty(), ErrorCode::invalid_argument, "filtration needs at least one partition");
  for (std::size_t i = 1; i < partitions_.size(); ++i) {
    require(partitions_[i].universe() == partitions_[0].universe(), ErrorCode::dimension_mismatch,
            "filtration partitions live on different spaces");
    require(partitions_[i].refines(partitions_[i - 1]), ErrorCode::invalid_argument,
            "filtration is not nested");
  }
}

std::vector<RandomVar> difference_sequence(const RandomVar& f, const Filtration& filt,
                                           const GroundSpace& space) {
  std::vector<RandomVar> d;
  RandomVar previous;
  for (std::size_t i = 0; i < filt.size(); ++i) {
    RandomVar current = cond_expectation(f, filt[i], space);
    d.push_back(i == 0 ? current : current - previous);
    previous = std::move(current);
  }
  return d;
}

double square_function_gap(const RandomVar& f, const Filtration& filt, const GroundSpace& space, double p) {
  check_exponent(p);
  const auto d = difference_sequence(f, filt, space);
  double squares = 0.0;
  RandomVar total = RandomVar::constant(space.size(), 0.0);
  for (const auto& di : d) {
    squares += squared_norm(di, space, p);
    total += di;
  }
  return std::sqrt(1.0 / (p - 1.0)) * lp_norm(total, space, p) - std::sqrt(squares);
}

double conditional_convexity_gap(const RandomVar& f, const Partition& b, const GroundSpace& space,
                                 double p) {
  check_exponent(p);
  const RandomVar e = cond_expectation(f, b, space);
  return squared_norm(f, space, p) - squared_norm(e, space, p) - (p - 1.0) * squared_norm(f - e, space, p);
}

double uniform_convexity_gap(const RandomVar& x, const RandomVar& y, const GroundSpace& space, double p) {
  check_exponent(p);
  require(x.size() == y.size(), ErrorCode::dimension_mismatch, "x and y live on different spaces");
  const double rhs = 0.5 * (squared_norm(x + y, space, p) + squared_norm(x - y, space, p));
  return rhs - squared_norm(x, space, p) - (p - 1.0) * squared_norm(y, space, p);
}

double basic_sequence_gap(const std::vector<RandomVar>& d, const GroundSpace& space, double p,
                          std::size_t from, std::size_t to) {
  require(p >= 1.0, ErrorCode::invalid_argument, "exponent p must be at least 1");
  require(from <= to && to < d.size(), ErrorCode::invalid_argument, "block indices out of range");
  RandomVar total = RandomVar::constant(space.size(), 0.0);
  RandomVar block = RandomVar::constant(space.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += d[i];
    if (i >= from && i <= to) block += d[i];
  }
  return 2.0 * lp_norm(total, space, p) - lp_norm(block, space, p);
}

}  // namespace regdec
