#pragma once

// Finite probability spaces and the objects that live on them: subsets,
// real-valued random variables, partitions, and the two operations every
// other module is built on (Lp norms and conditional expectation onto the
// algebra generated by a partition).
//
// All summations run over points in ascending index order, so results are
// reproducible bit for bit.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace regdec {

// Absolute slack used when validating that weights sum to one.
inline constexpr double kWeightSumTolerance = 1e-12;

// A subset of {0, ..., n-1} stored as a bitmask.
//
// The canonical order compares subsets as binary integers in which point i
// contributes 2^i. It is used for deduplication and for tie-breaking between
// equally good witnesses everywhere downstream.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::size_t universe);

  static Subset full(std::size_t universe);
  static Subset of(std::size_t universe, std::initializer_list<std::size_t> points);
  static Subset of(std::size_t universe, std::span<const std::size_t> points);

  std::size_t universe() const noexcept { return universe_; }
  bool contains(std::size_t point) const;
  void insert(std::size_t point);
  void erase(std::size_t point);

  std::size_t count() const noexcept;
  bool is_empty() const noexcept;
  bool is_subset_of(const Subset& other) const;
  bool intersects(const Subset& other) const;

  // Smallest member; universe() when empty.
  std::size_t first() const noexcept;
  std::vector<std::size_t> indices() const;

  Subset complement() const;
  Subset& operator&=(const Subset& other);
  Subset& operator|=(const Subset& other);
  // Set difference.
  Subset& operator-=(const Subset& other);

  friend Subset operator&(Subset a, const Subset& b) { return a &= b; }
  friend Subset operator|(Subset a, const Subset& b) { return a |= b; }
  friend Subset operator-(Subset a, const Subset& b) { return a -= b; }

  friend bool operator==(const Subset&, const Subset&) = default;
  friend std::strong_ordering operator<=>(const Subset& a, const Subset& b);

  std::size_t hash() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  // "0110..." with point 0 first.
  std::string to_string() const;

 private:
  void check_same_universe(const Subset& other) const;
  void clear_padding() noexcept;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct SubsetHash {
  std::size_t operator()(const Subset& s) const noexcept { return s.hash(); }
};

// A finite sample space with a probability weight on every point.
class GroundSpace {
 public:
  GroundSpace() = default;
  explicit GroundSpace(std::vector<double> weights, std::vector<std::string> labels = {});

  static GroundSpace uniform(std::size_t points);

  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t point) const { return weights_.at(point); }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  double measure(const Subset& s) const;
  Subset full() const { return Subset::full(size()); }
  Subset none() const { return Subset(size()); }

  friend bool operator==(const GroundSpace&, const GroundSpace&) = default;

 private:
  std::vector<double> weights_;
  std::vector<std::string> labels_;
};

// Mixed-radix indexing of a Cartesian product. The first factor is the most
// significant digit (row-major order).
class ProductIndexer {
 public:
  ProductIndexer() = default;
  explicit ProductIndexer(std::vector<std::size_t> dims);

  std::size_t arity() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t factor) const { return dims_.at(factor); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t encode(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> decode(std::size_t index) const;
  std::size_t coordinate(std::size_t index, std::size_t factor) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

// Product space with product weights, points ordered by ProductIndexer.
GroundSpace product_space(std::span<const GroundSpace> factors);

// A real-valued function on a ground space.
class RandomVar {
 public:
  RandomVar() = default;
  explicit RandomVar(std::vector<double> values);
  RandomVar(std::initializer_list<double> values);

  static RandomVar constant(std::size_t size, double c);
  static RandomVar indicator(const Subset& s);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  RandomVar& operator+=(const RandomVar& other);
  RandomVar& operator-=(const RandomVar& other);
  RandomVar& operator*=(double c);

  friend RandomVar operator+(RandomVar a, const RandomVar& b) { return a += b; }
  friend RandomVar operator-(RandomVar a, const RandomVar& b) { return a -= b; }
  friend RandomVar operator*(RandomVar a, double c) { return a *= c; }
  friend RandomVar operator*(double c, RandomVar a) { return a *= c; }
  friend RandomVar operator-(RandomVar a) { return a *= -1.0; }

  friend bool operator==(const RandomVar&, const RandomVar&) = default;

 private:
  std::vector<double> values_;
};

// Pointwise product f * 1_S.
RandomVar restrict_to(const RandomVar& f, const Subset& s);

// Largest pointwise absolute difference.
double max_abs_difference(const RandomVar& a, const RandomVar& b);

// A partition of the ground space into nonempty cells. Cells are kept in
// canonical order (by smallest point) so equal partitions compare equal.
class Partition {
 public:
  Partition() = default;
  // Empty cells are dropped. Throws unless the cells are pairwise disjoint
  // and cover the universe.
  explicit Partition(std::vector<Subset> cells);

  static Partition trivial(std::size_t universe);
  static Partition singletons(std::size_t universe);
  // Groups points with equal labels.
  static Partition from_labels(std::span<const std::size_t> labels);

  std::size_t size() const noexcept { return cells_.size(); }
  std::size_t universe() const noexcept { return cell_of_.size(); }
  const Subset& cell(std::size_t i) const { return cells_.at(i); }
  const std::vector<Subset>& cells() const noexcept { return cells_; }
  std::size_t cell_of(std::size_t point) const { return cell_of_.at(point); }

  // True if every cell of *this lies inside a cell of `coarser`.
  bool refines(const Partition& coarser) const;
  // True if `s` is a union of cells.
  bool measurable(const Subset& s) const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.cells_ == b.cells_; }

 private:
  std::vector<Subset> cells_;
  std::vector<std::size_t> cell_of_;
};

// (sum_x w(x) |f(x)|^p)^(1/p); p must be at least 1.
double lp_norm(const RandomVar& f, const GroundSpace& space, double p);

// sum_{x in S} w(x) f(x).
double integral_over(const RandomVar& f, const Subset& s, const GroundSpace& space);

double expectation(const RandomVar& f, const GroundSpace& space);

// E(f | S) for a single event; zero when P(S) = 0.
double conditional_mean(const RandomVar& f, const Subset& s, const GroundSpace& space);

// E(f | A_P): constant on every cell, zero on cells of probability zero.
RandomVar cond_expectation(const RandomVar& f, const Partition& partition,
                           const GroundSpace& space);

// Splits every cell C into C & S and C - S, dropping empty pieces.
Partition common_refinement(const Partition& partition, const Subset& s);
// Coarsest partition refining both.
Partition common_refinement(const Partition& a, const Partition& b);

}  // namespace regdec

template <>
struct std::hash<regdec::Subset> {
  std::size_t operator()(const regdec::Subset& s) const noexcept { return s.hash(); }
};
