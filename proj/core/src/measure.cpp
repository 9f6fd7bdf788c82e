#include "regdec/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "regdec/error.hpp"

namespace regdec {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t universe) { return (universe + kWordBits - 1) / kWordBits; }

void check_size(std::size_t got, std::size_t expected, const char* what) {
  if (got != expected) {
    std::ostringstream msg;
    msg << what << ": size " << got << " does not match space of " << expected << " points";
    fail(ErrorCode::dimension_mismatch, msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Subset

Subset::Subset(std::size_t universe) : universe_(universe), words_(word_count(universe), 0) {}

Subset Subset::full(std::size_t universe) {
  Subset s(universe);
  std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
  s.clear_padding();
  return s;
}

Subset Subset::of(std::size_t universe, std::initializer_list<std::size_t> points) {
  return of(universe, std::span<const std::size_t>(points.begin(), points.size()));
}

Subset Subset::of(std::size_t universe, std::span<const std::size_t> points) {
  Subset s(universe);
  for (std::size_t p : points) s.insert(p);
  return s;
}

bool Subset::contains(std::size_t point) const {
  if (point >= universe_) return false;
  return (words_[point / kWordBits] >> (point % kWordBits)) & 1U;
}

void Subset::insert(std::size_t point) {
  require(point < universe_, ErrorCode::dimension_mismatch, "subset point out of range");
  words_[point / kWordBits] |= std::uint64_t{1} << (point % kWordBits);
}

void Subset::erase(std::size_t point) {
  require(point < universe_, ErrorCode::dimension_mismatch, "subset point out of range");
  words_[point / kWordBits] &= ~(std::uint64_t{1} << (point % kWordBits));
}

std::size_t Subset::count() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool Subset::is_empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

bool Subset::is_subset_of(const Subset& other) const {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

bool Subset::intersects(const Subset& other) const {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & other.words_[i]) != 0) return true;
  }
  return false;
}

std::size_t Subset::first() const noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] != 0) return i * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[i]));
  }
  return universe_;
}

std::vector<std::size_t> Subset::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto w = words_[i];
    while (w != 0) {
      out.push_back(i * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

Subset Subset::complement() const {
  Subset s(*this);
  for (auto& w : s.words_) w = ~w;
  s.clear_padding();
  return s;
}

Subset& Subset::operator&=(const Subset& other) {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

Subset& Subset::operator|=(const Subset& other) {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Subset& Subset::operator-=(const Subset& other) {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

std::strong_ordering operator<=>(const Subset& a, const Subset& b) {
  if (auto c = a.universe_ <=> b.universe_; c != 0) return c;
  for (std::size_t i = a.words_.size(); i-- > 0;) {
    if (auto c = a.words_[i] <=> b.words_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t Subset::hash() const noexcept {
  std::size_t h = universe_ * 0x9e3779b97f4a7c15ULL;
  for (auto w : words_) h = (h ^ w) * 0x100000001b3ULL + (h >> 29);
  return h;
}

std::string Subset::to_string() const {
  std::string out(universe_, '0');
  for (std::size_t i = 0; i < universe_; ++i) {
    if (contains(i)) out[i] = '1';
  }
  return out;
}

void Subset::check_same_universe(const Subset& other) const {
  if (universe_ != other.universe_) {
    fail(ErrorCode::dimension_mismatch, "subsets live on spaces of different size");
  }
}

void Subset::clear_padding() noexcept {
  if (universe_ % kWordBits != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (universe_ % kWordBits)) - 1;
  }
}

// ---------------------------------------------------------------------------
// GroundSpace

GroundSpace::GroundSpace(std::vector<double> weights, std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  require(!weights_.empty(), ErrorCode::invalid_argument, "ground space needs at least one point");
  double total = 0.0;
  for (double w : weights_) {
    require(std::isfinite(w) && w >= 0.0, ErrorCode::invalid_argument,
            "ground space weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "ground space weights sum to " << total << ", expected 1";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  require(labels_.empty() || labels_.size() == weights_.size(), ErrorCode::dimension_mismatch,
          "label count does not match point count");
}

GroundSpace GroundSpace::uniform(std::size_t points) {
  require(points > 0, ErrorCode::invalid_argument, "ground space needs at least one point");
  return GroundSpace(std::vector<double>(points, 1.0 / static_cast<double>(points)));
}

double GroundSpace::measure(const Subset& s) const {
  check_size(s.universe(), size(), "subset");
  double total = 0.0;
  for (std::size_t i : s.indices()) total += weights_[i];
  return total;
}

// ---------------------------------------------------------------------------
// ProductIndexer

ProductIndexer::ProductIndexer(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  require(!dims_.empty(), ErrorCode::invalid_argument, "product needs at least one factor");
  strides_.assign(dims_.size(), 1);
  size_ = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    require(dims_[i] > 0, ErrorCode::invalid_argument, "product factor has no points");
    strides_[i] = size_;
    size_ *= dims_[i];
  }
}

std::size_t ProductIndexer::encode(std::span<const std::size_t> coords) const {
  check_size(coords.size(), dims_.size(), "coordinate tuple");
  std::size_t index = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) index += coords[i] * strides_[i];
  return index;
}

std::vector<std::size_t> ProductIndexer::decode(std::size_t index) const {
  std::vector<std::size_t> coords(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) coords[i] = (index / strides_[i]) % dims_[i];
  return coords;
}

std::size_t ProductIndexer::coordinate(std::size_t index, std::size_t factor) const {
  return (index / strides_.at(factor)) % dims_[factor];
}

GroundSpace product_space(std::span<const GroundSpace> factors) {
  std::vector<std::size_t> dims;
  for (const auto& f : factors) dims.push_back(f.size());
  ProductIndexer indexer(dims);
  std::vector<double> weights(indexer.size());
  for (std::size_t idx = 0; idx < indexer.size(); ++idx) {
    double w = 1.0;
    for (std::size_t i = 0; i < factors.size(); ++i) w *= factors[i].weight(indexer.coordinate(idx, i));
    weights[idx] = w;
  }
  // Product weights can drift from 1 by a few ulps; renormalise once.
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    for (auto& w : weights) w /= total;
  }
  return GroundSpace(std::move(weights));
}

// ---------------------------------------------------------------------------
// RandomVar

RandomVar::RandomVar(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    require(std::isfinite(v), ErrorCode::invalid_argument, "random variable values must be finite");
  }
}

RandomVar::RandomVar(std::initializer_list<double> values)
    : RandomVar(std::vector<double>(values)) {}

RandomVar RandomVar::constant(std::size_t size, double c) {
  return RandomVar(std::vector<double>(size, c));
}

RandomVar RandomVar::indicator(const Subset& s) {
  std::vector<double> v(s.universe(), 0.0);
  for (std::size_t i : s.indices()) v[i] = 1.0;
  return RandomVar(std::move(v));
}

RandomVar& RandomVar::operator+=(const RandomVar& other) {
  check_size(other.size(), size(), "random variable");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

RandomVar& RandomVar::operator-=(const RandomVar& other) {
  check_size(other.size(), size(), "random variable");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

RandomVar& RandomVar::operator*=(double c) {
  for (auto& v : values_) v *= c;
  return *this;
}

RandomVar restrict_to(const RandomVar& f, const Subset& s) {
  check_size(s.universe(), f.size(), "subset");
  std::vector<double> v(f.size(), 0.0);
  for (std::size_t i : s.indices()) v[i] = f[i];
  return RandomVar(std::move(v));
}

double max_abs_difference(const RandomVar& a, const RandomVar& b) {
  check_size(a.size(), b.size(), "random variable");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<Subset> cells) {
  require(!cells.empty(), ErrorCode::invalid_argument, "partition needs at least one cell");
  const std::size_t n = cells.front().universe();
  cell_of_.assign(n, n);
  std::erase_if(cells, [](const Subset& c) { return c.is_empty(); });
  std::sort(cells.begin(), cells.end(),
            [](const Subset& a, const Subset& b) { return a.first() < b.first(); });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    check_size(cells[c].universe(), n, "partition cell");
    for (std::size_t p : cells[c].indices()) {
      require(cell_of_[p] == n, ErrorCode::invalid_argument, "partition cells overlap");
      cell_of_[p] = c;
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    require(cell_of_[p] != n, ErrorCode::invalid_argument, "partition cells do not cover the space");
  }
  cells_ = std::move(cells);
}

Partition Partition::trivial(std::size_t universe) {
  return Partition(std::vector<Subset>{Subset::full(universe)});
}

Partition Partition::singletons(std::size_t universe) {
  std::vector<Subset> cells;
  cells.reserve(universe);
  for (std::size_t i = 0; i < universe; ++i) cells.push_back(Subset::of(universe, {i}));
  return Partition(std::move(cells));
}

Partition Partition::from_labels(std::span<const std::size_t> labels) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Subset> cells(sorted.size(), Subset(n));
  for (std::size_t p = 0; p < n; ++p) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), labels[p]);
    cells[static_cast<std::size_t>(it - sorted.begin())].insert(p);
  }
  return Partition(std::move(cells));
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.universe() != universe()) return false;
  for (const auto& c : cells_) {
    if (!c.is_subset_of(coarser.cell(coarser.cell_of(c.first())))) return false;
  }
  return true;
}

bool Partition::measurable(const Subset& s) const {
  check_size(s.universe(), universe(), "subset");
  for (const auto& c : cells_) {
    if (c.intersects(s) && !c.is_subset_of(s)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Operations

double lp_norm(const RandomVar& f, const GroundSpace& space, double p) {
  require(p >= 1.0 && std::isfinite(p), ErrorCode::invalid_argument, "lp_norm requires p >= 1");
  check_size(f.size(), space.size(), "random variable");
  double total = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < f.size(); ++i) total += space.weight(i) * std::abs(f[i]);
    return total;
  }
  if (p == 2.0) {
    for (std::size_t i = 0; i < f.size(); ++i) total += space.weight(i) * f[i] * f[i];
    return std::sqrt(total);
  }
  for (std::size_t i = 0; i < f.size(); ++i) total += space.weight(i) * std::pow(std::abs(f[i]), p);
  return std::pow(total, 1.0 / p);
}

double integral_over(const RandomVar& f, const Subset& s, const GroundSpace& space) {
  check_size(f.size(), space.size(), "random variable");
  check_size(s.universe(), space.size(), "subset");
  double total = 0.0;
  for (std::size_t i : s.indices()) total += space.weight(i) * f[i];
  return total;
}

double expectation(const RandomVar& f, const GroundSpace& space) {
  return integral_over(f, space.full(), space);
}

double conditional_mean(const RandomVar& f, const Subset& s, const GroundSpace& space) {
  const double mass = space.measure(s);
  if (mass == 0.0) return 0.0;
  return integral_over(f, s, space) / mass;
}

RandomVar cond_expectation(const RandomVar& f, const Partition& partition, const GroundSpace& space) {
  check_size(f.size(), space.size(), "random variable");
  check_size(partition.universe(), space.size(), "partition");
  std::vector<double> mass(partition.size(), 0.0);
  std::vector<double> integral(partition.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t c = partition.cell_of(i);
    mass[c] += space.weight(i);
    integral[c] += space.weight(i) * f[i];
  }
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t c = partition.cell_of(i);
    out[i] = mass[c] == 0.0 ? 0.0 : integral[c] / mass[c];
  }
  return RandomVar(std::move(out));
}

Partition common_refinement(const Partition& partition, const Subset& s) {
  check_size(s.universe(), partition.universe(), "subset");
  std::vector<Subset> cells;
  cells.reserve(2 * partition.size());
  for (const auto& c : partition.cells()) {
    cells.push_back(c & s);
    cells.push_back(c - s);
  }
  return Partition(std::move(cells));
}

Partition common_refinement(const Partition& a, const Partition& b) {
  check_size(b.universe(), a.universe(), "partition");
  std::vector<std::size_t> labels(a.universe());
  for (std::size_t p = 0; p < labels.size(); ++p) labels[p] = a.cell_of(p) * b.size() + b.cell_of(p);
  return Partition::from_labels(labels);
}

}  // namespace regdec
