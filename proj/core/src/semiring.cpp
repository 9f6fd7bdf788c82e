#include "regdec/semiring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "regdec/error.hpp"

namespace regdec {

namespace {

constexpr int kMaxLocalSearchRounds = 200;

double sum_over(std::span<const double> mass, const Subset& s) {
  double total = 0.0;
  for (std::size_t i : s.indices()) total += mass[i];
  return total;
}

bool coin(std::mt19937_64& rng) { return (rng() >> 11) & 1U; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

Subset random_subset(std::size_t universe, std::mt19937_64& rng) {
  Subset s(universe);
  for (std::size_t i = 0; i < universe; ++i) {
    if (coin(rng)) s.insert(i);
  }
  return s;
}

double log2_sum_exp2(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log2(std::exp2(a - hi) + std::exp2(b - hi));
}

bool improved(double candidate, double incumbent) {
  return candidate > incumbent + kTieTolerance * std::max({1.0, std::abs(candidate), std::abs(incumbent)});
}

// Union of the cells of `atoms` flagged in `chosen`.
Subset union_of_cells(const Partition& atoms, const std::vector<char>& chosen) {
  Subset s(atoms.universe());
  for (std::size_t c = 0; c < atoms.size(); ++c) {
    if (chosen[c]) s |= atoms.cell(c);
  }
  return s;
}

// Cell-wise sums of `mass` restricted to `within`.
std::vector<double> cell_sums(const Partition& atoms, std::span<const double> mass, const Subset& within) {
  std::vector<double> sums(atoms.size(), 0.0);
  for (std::size_t p : within.indices()) sums[atoms.cell_of(p)] += mass[p];
  return sums;
}

}  // namespace

bool better_maximum(double value, const Subset& set, double best_value, const Subset& best_set) {
  const double scale = std::max({1.0, std::abs(value), std::abs(best_value)});
  if (value > best_value + kTieTolerance * scale) return true;
  if (value < best_value - kTieTolerance * scale) return false;
  return set < best_set;
}

void ExtremalMembers::absorb(const Subset& set, double value) {
  if (better_maximum(value, set, max_value, max_set)) {
    max_set = set;
    max_value = value;
  }
  if (better_maximum(-value, set, -min_value, min_set)) {
    min_set = set;
    min_value = value;
  }
}

ExtremalMembers ExtremalMembers::empty_baseline(std::size_t universe) {
  return ExtremalMembers{Subset(universe), 0.0, Subset(universe), 0.0};
}

// ---------------------------------------------------------------------------
// Semiring base

Semiring::Semiring(std::string kind, std::size_t k, GroundSpace space)
    : kind_(std::move(kind)), k_(k), space_(std::move(space)) {
  require(k_ >= 1, ErrorCode::invalid_argument, "semiring parameter k must be positive");
}

std::vector<Subset> Semiring::subtract(const Subset& s, const Subset& t) const {
  require(s.universe() == space_.size() && t.universe() == space_.size(),
          ErrorCode::dimension_mismatch, "subset does not live on the semiring's space");
  require(contains(s), ErrorCode::not_a_member, "subtract: first argument is not a member of " + kind_);
  require(contains(t), ErrorCode::not_a_member, "subtract: second argument is not a member of " + kind_);
  auto pieces = do_subtract(s, t);
  if (pieces.size() > k_) {
    fail(ErrorCode::certificate_failure, "subtract produced more than k pieces in " + kind_);
  }
  return pieces;
}

EnumerationStatus Semiring::enumerate(std::uint64_t budget,
                                      const std::function<void(const Subset&)>& visit) const {
  std::unordered_set<Subset, SubsetHash> seen;
  bool truncated = false;
  generate([&](const Subset& s) {
    if (seen.contains(s)) return true;
    if (seen.size() >= budget) {
      truncated = true;
      return false;
    }
    seen.insert(s);
    visit(s);
    return true;
  });
  return truncated ? EnumerationStatus::truncated : EnumerationStatus::complete;
}

void Semiring::check_mass(std::span<const double> mass) const {
  require(mass.size() == space_.size(), ErrorCode::dimension_mismatch,
          "mass vector does not match the semiring's space");
}

ExtremalMembers Semiring::extremal_members(std::span<const double> mass) const {
  return extremal_by_enumeration(mass, std::numeric_limits<std::uint64_t>::max());
}

ExtremalMembers Semiring::extremal_by_enumeration(std::span<const double> mass,
                                                  std::uint64_t budget) const {
  check_mass(mass);
  auto best = ExtremalMembers::empty_baseline(space_.size());
  auto status = enumerate(budget, [&](const Subset& s) { best.absorb(s, sum_over(mass, s)); });
  if (status == EnumerationStatus::truncated) {
    std::ostringstream msg;
    msg << "enumerating " << kind_ << " members exceeds the budget of " << budget
        << " (estimated 2^" << log2_enumeration_size() << " candidates)";
    throw InfeasibleError(msg.str(), log2_enumeration_size());
  }
  return best;
}

ExtremalMembers Semiring::local_search(std::span<const double> mass, std::mt19937_64& /*rng*/,
                                       int /*restarts*/, const Subset* /*seed_member*/) const {
  return extremal_members(mass);
}

MemberList collect_members(const Semiring& sr, std::uint64_t budget) {
  MemberList out;
  auto status = sr.enumerate(budget, [&](const Subset& s) { out.members.push_back(s); });
  out.truncated = status == EnumerationStatus::truncated;
  return out;
}

// ---------------------------------------------------------------------------
// Algebra generated by a partition

namespace {

class AlgebraSemiring final : public Semiring {
 public:
  AlgebraSemiring(const GroundSpace& space, Partition atoms)
      : Semiring("algebra", 1, space), atoms_(std::move(atoms)) {
    require(atoms_.universe() == space.size(), ErrorCode::dimension_mismatch,
            "generating partition lives on a different space");
  }

  bool contains(const Subset& s) const override {
    return s.universe() == space().size() && atoms_.measurable(s);
  }

  Subset random_member(std::mt19937_64& rng) const override {
    std::vector<char> chosen(atoms_.size());
    for (auto& c : chosen) c = coin(rng);
    return union_of_cells(atoms_, chosen);
  }

  double log2_enumeration_size() const override { return static_cast<double>(atoms_.size()); }
  double log2_exact_search_cost() const override { return std::log2(static_cast<double>(space().size())); }

  ExtremalMembers extremal_members(std::span<const double> mass) const override {
    check_mass(mass);
    const auto sums = cell_sums(atoms_, mass, space().full());
    std::vector<char> positive(atoms_.size()), negative(atoms_.size());
    double hi = 0.0, lo = 0.0;
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (sums[c] > 0) {
        positive[c] = 1;
        hi += sums[c];
      } else if (sums[c] < 0) {
        negative[c] = 1;
        lo += sums[c];
      }
    }
    return ExtremalMembers{union_of_cells(atoms_, positive), hi, union_of_cells(atoms_, negative), lo};
  }

 protected:
  std::vector<Subset> do_subtract(const Subset& s, const Subset& t) const override {
    Subset d = s - t;
    if (d.is_empty()) return {};
    return {d};
  }

  void generate(const std::function<bool(const Subset&)>& emit) const override {
    std::vector<char> chosen(atoms_.size(), 0);
    while (true) {
      if (!emit(union_of_cells(atoms_, chosen))) return;
      std::size_t i = 0;
      while (i < chosen.size() && chosen[i]) chosen[i++] = 0;
      if (i == chosen.size()) return;
      chosen[i] = 1;
    }
  }

 private:
  Partition atoms_;
};

// ---------------------------------------------------------------------------
// Intervals of a linear order

class IntervalSemiring final : public Semiring {
 public:
  IntervalSemiring(const GroundSpace& space, std::vector<std::size_t> order)
      : Semiring("intervals", 2, space), order_(std::move(order)), position_(order_.size()) {
    require(order_.size() == space.size(), ErrorCode::dimension_mismatch,
            "linear order must list every point once");
    std::vector<char> seen(order_.size(), 0);
    for (std::size_t pos = 0; pos < order_.size(); ++pos) {
      const std::size_t p = order_[pos];
      require(p < order_.size() && !seen[p], ErrorCode::invalid_argument,
              "linear order is not a permutation of the points");
      seen[p] = 1;
      position_[p] = pos;
    }
  }

  bool contains(const Subset& s) const override {
    if (s.universe() != space().size()) return false;
    if (s.is_empty()) return true;
    auto [lo, hi] = bounds(s);
    return s.count() == hi - lo + 1;
  }

  Subset random_member(std::mt19937_64& rng) const override {
    if (pick(rng, 10) == 0) return space().none();
    std::size_t a = pick(rng, order_.size()), b = pick(rng, order_.size());
    if (a > b) std::swap(a, b);
    return interval(a, b);
  }

  double log2_enumeration_size() const override {
    const double n = static_cast<double>(order_.size());
    return std::log2(n * (n + 1) / 2 + 1);
  }
  double log2_exact_search_cost() const override {
    return 2.0 * std::log2(static_cast<double>(order_.size()) + 1.0);
  }

  ExtremalMembers extremal_members(std::span<const double> mass) const override {
    check_mass(mass);
    const std::size_t n = order_.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t pos = 0; pos < n; ++pos) prefix[pos + 1] = prefix[pos] + mass[order_[pos]];
    auto best = ExtremalMembers::empty_baseline(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = prefix[j + 1] - prefix[i];
        const double slack = kTieTolerance * std::max({1.0, std::abs(v), std::abs(best.max_value),
                                                       std::abs(best.min_value)});
        if (v >= best.max_value - slack || v <= best.min_value + slack) best.absorb(interval(i, j), v);
      }
    }
    return best;
  }

 protected:
  std::vector<Subset> do_subtract(const Subset& s, const Subset& t) const override {
    if (s.is_empty()) return {};
    if (t.is_empty()) return {s};
    auto [a, b] = bounds(s);
    auto [c, d] = bounds(t);
    std::vector<Subset> pieces;
    const long long left_end = std::min<long long>(static_cast<long long>(b), static_cast<long long>(c) - 1);
    if (static_cast<long long>(a) <= left_end) pieces.push_back(interval(a, static_cast<std::size_t>(left_end)));
    const std::size_t right_start = std::max(a, d + 1);
    if (right_start <= b) pieces.push_back(interval(right_start, b));
    return pieces;
  }

  void generate(const std::function<bool(const Subset&)>& emit) const override {
    if (!emit(space().none())) return;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      for (std::size_t j = i; j < order_.size(); ++j) {
        if (!emit(interval(i, j))) return;
      }
    }
  }

 private:
  Subset interval(std::size_t lo, std::size_t hi) const {
    Subset s(order_.size());
    for (std::size_t pos = lo; pos <= hi; ++pos) s.insert(order_[pos]);
    return s;
  }

  std::pair<std::size_t, std::size_t> bounds(const Subset& s) const {
    std::size_t lo = order_.size(), hi = 0;
    for (std::size_t p : s.indices()) {
      lo = std::min(lo, position_[p]);
      hi = std::max(hi, position_[p]);
    }
    return {lo, hi};
  }

  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
};

// ---------------------------------------------------------------------------
// Products of semirings

std::size_t sum_k(const std::vector<SemiringPtr>& factors) {
  std::size_t k = 0;
  for (const auto& f : factors) k += f->k();
  return k;
}

GroundSpace factor_product_space(const std::vector<SemiringPtr>& factors) {
  require(!factors.empty(), ErrorCode::invalid_argument, "product needs at least one factor");
  std::vector<GroundSpace> spaces;
  for (const auto& f : factors) {
    require(f != nullptr, ErrorCode::invalid_argument, "null product factor");
    spaces.push_back(f->space());
  }
  return product_space(spaces);
}

class ProductSemiring final : public Semiring {
 public:
  ProductSemiring(std::vector<SemiringPtr> factors, std::string kind)
      : Semiring(std::move(kind), sum_k(factors), factor_product_space(factors)),
        factors_(std::move(factors)) {
    std::vector<std::size_t> dims;
    for (const auto& f : factors_) dims.push_back(f->space().size());
    indexer_ = ProductIndexer(dims);
    coords_.resize(indexer_.size());
    for (std::size_t idx = 0; idx < indexer_.size(); ++idx) coords_[idx] = indexer_.decode(idx);
    free_factor_ = 0;
    for (std::size_t i = 1; i < factors_.size(); ++i) {
      if (factors_[i]->log2_enumeration_size() >= factors_[free_factor_]->log2_enumeration_size()) {
        free_factor_ = i;
      }
    }
  }

  bool contains(const Subset& s) const override {
    if (s.universe() != space().size()) return false;
    if (s.is_empty()) return true;
    auto parts = projections(s);
    std::size_t expected = 1;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!factors_[i]->contains(parts[i])) return false;
      expected *= parts[i].count();
    }
    return expected == s.count();
  }

  Subset random_member(std::mt19937_64& rng) const override {
    std::vector<Subset> parts;
    for (const auto& f : factors_) parts.push_back(f->random_member(rng));
    return product_of(parts);
  }

  double log2_enumeration_size() const override {
    double total = 0.0;
    for (const auto& f : factors_) total += f->log2_enumeration_size();
    return total;
  }

  double log2_exact_search_cost() const override {
    double total = 0.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      total += i == free_factor_ ? factors_[i]->log2_exact_search_cost() : factors_[i]->log2_enumeration_size();
    }
    return total;
  }

  ExtremalMembers extremal_members(std::span<const double> mass) const override {
    check_mass(mass);
    auto best = ExtremalMembers::empty_baseline(space().size());
    std::vector<std::vector<Subset>> lists(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i == free_factor_) continue;
      auto members = collect_members(*factors_[i], std::uint64_t{1} << 40);
      if (members.truncated) throw InfeasibleError("product factor cannot be enumerated", log2_exact_search_cost());
      std::erase_if(members.members, [](const Subset& s) { return s.is_empty(); });
      if (members.members.empty()) return best;
      lists[i] = std::move(members.members);
    }
    std::vector<std::size_t> cursor(factors_.size(), 0);
    std::vector<Subset> parts(factors_.size());
    const auto& free = *factors_[free_factor_];
    while (true) {
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i != free_factor_) parts[i] = lists[i][cursor[i]];
      }
      auto marginal = marginal_mass(mass, parts, free_factor_);
      auto sub = free.extremal_members(marginal);
      if (!sub.max_set.is_empty()) {
        parts[free_factor_] = sub.max_set;
        offer_max(best, product_of(parts), sub.max_value);
      }
      if (!sub.min_set.is_empty()) {
        parts[free_factor_] = sub.min_set;
        offer_min(best, product_of(parts), sub.min_value);
      }
      std::size_t i = 0;
      for (; i < factors_.size(); ++i) {
        if (i == free_factor_) continue;
        if (++cursor[i] < lists[i].size()) break;
        cursor[i] = 0;
      }
      if (i == factors_.size()) break;
    }
    return best;
  }

  ExtremalMembers local_search(std::span<const double> mass, std::mt19937_64& rng, int restarts,
                               const Subset* seed_member) const override {
    check_mass(mass);
    auto best = ExtremalMembers::empty_baseline(space().size());
    std::vector<std::vector<Subset>> starts;
    if (seed_member != nullptr && !seed_member->is_empty() && contains(*seed_member)) {
      starts.push_back(projections(*seed_member));
    }
    for (int r = 0; r < restarts; ++r) {
      std::vector<Subset> parts;
      for (const auto& f : factors_) {
        Subset part = f->random_member(rng);
        for (int tries = 0; part.is_empty() && tries < 16; ++tries) part = f->random_member(rng);
        if (part.is_empty()) part = f->space().full();
        parts.push_back(std::move(part));
      }
      starts.push_back(std::move(parts));
    }
    for (const auto& start : starts) {
      for (double sign : {1.0, -1.0}) {
        auto parts = start;
        double value = sign * sum_over(mass, product_of(parts));
        for (int round = 0; round < kMaxLocalSearchRounds; ++round) {
          const double before = value;
          for (std::size_t i = 0; i < factors_.size(); ++i) {
            auto sub = factors_[i]->extremal_members(marginal_mass(mass, parts, i));
            Subset candidate = sign > 0 ? sub.max_set : sub.min_set;
            auto trial = parts;
            trial[i] = candidate;
            const double v = sign * sum_over(mass, product_of(trial));
            if (improved(v, value)) {
              parts = std::move(trial);
              value = v;
            }
          }
          if (!improved(value, before)) break;
        }
        const Subset set = product_of(parts);
        if (sign > 0) {
          offer_max(best, set, sum_over(mass, set));
        } else {
          offer_min(best, set, sum_over(mass, set));
        }
      }
    }
    return best;
  }

 protected:
  std::vector<Subset> do_subtract(const Subset& s, const Subset& t) const override {
    if (s.is_empty()) return {};
    if (t.is_empty()) return {s};
    const auto sp = projections(s);
    const auto tp = projections(t);
    std::vector<Subset> pieces;
    std::vector<Subset> parts(factors_.size());
    for (std::size_t j = 0; j < factors_.size(); ++j) {
      // B_j x R x C_j with B_j = prod_{i<j} (S_i & T_i) and C_j = prod_{i>j} S_i.
      for (std::size_t i = j + 1; i < factors_.size(); ++i) parts[i] = sp[i];
      for (const auto& r : factors_[j]->subtract(sp[j], tp[j])) {
        parts[j] = r;
        Subset piece = product_of(parts);
        if (!piece.is_empty()) pieces.push_back(std::move(piece));
      }
      parts[j] = sp[j] & tp[j];
      if (parts[j].is_empty()) break;
    }
    return pieces;
  }

  void generate(const std::function<bool(const Subset&)>& emit) const override {
    if (!emit(space().none())) return;
    std::vector<std::vector<Subset>> lists;
    for (const auto& f : factors_) {
      auto members = collect_members(*f, std::uint64_t{1} << 40);
      std::erase_if(members.members, [](const Subset& s) { return s.is_empty(); });
      if (members.members.empty()) return;
      lists.push_back(std::move(members.members));
    }
    std::vector<std::size_t> cursor(factors_.size(), 0);
    std::vector<Subset> parts(factors_.size());
    while (true) {
      for (std::size_t i = 0; i < factors_.size(); ++i) parts[i] = lists[i][cursor[i]];
      if (!emit(product_of(parts))) return;
      std::size_t i = 0;
      for (; i < factors_.size(); ++i) {
        if (++cursor[i] < lists[i].size()) break;
        cursor[i] = 0;
      }
      if (i == factors_.size()) return;
    }
  }

 private:
  static void offer_max(ExtremalMembers& best, const Subset& set, double value) {
    if (better_maximum(value, set, best.max_value, best.max_set)) {
      best.max_set = set;
      best.max_value = value;
    }
  }
  static void offer_min(ExtremalMembers& best, const Subset& set, double value) {
    if (better_maximum(-value, set, -best.min_value, best.min_set)) {
      best.min_set = set;
      best.min_value = value;
    }
  }

  std::vector<Subset> projections(const Subset& s) const {
    std::vector<Subset> parts;
    for (const auto& f : factors_) parts.emplace_back(f->space().size());
    for (std::size_t idx : s.indices()) {
      for (std::size_t i = 0; i < factors_.size(); ++i) parts[i].insert(coords_[idx][i]);
    }
    return parts;
  }

  Subset product_of(const std::vector<Subset>& parts) const {
    Subset s(space().size());
    for (const auto& p : parts) {
      if (p.is_empty()) return s;
    }
    for (std::size_t idx = 0; idx < coords_.size(); ++idx) {
      bool inside = true;
      for (std::size_t i = 0; i < parts.size() && inside; ++i) inside = parts[i].contains(coords_[idx][i]);
      if (inside) s.insert(idx);
    }
    return s;
  }

  // Mass pushed onto factor `j` from points whose other coordinates lie in `parts`.
  std::vector<double> marginal_mass(std::span<const double> mass, const std::vector<Subset>& parts,
                                    std::size_t j) const {
    std::vector<double> marginal(factors_[j]->space().size(), 0.0);
    for (std::size_t idx = 0; idx < coords_.size(); ++idx) {
      bool inside = true;
      for (std::size_t i = 0; i < parts.size() && inside; ++i) {
        if (i != j) inside = parts[i].contains(coords_[idx][i]);
      }
      if (inside) marginal[coords_[idx][j]] += mass[idx];
    }
    return marginal;
  }

  std::vector<SemiringPtr> factors_;
  ProductIndexer indexer_;
  std::vector<std::vector<std::size_t>> coords_;
  std::size_t free_factor_ = 0;
};

// ---------------------------------------------------------------------------
// Symmetric rectangles

class SymmetricRectangleSemiring final : public Semiring {
 public:
  explicit SymmetricRectangleSemiring(const GroundSpace& base)
      : Semiring("symmetric-rectangles", 4, square_space(base)), n_(base.size()) {}

  bool contains(const Subset& s) const override {
    if (s.universe() != space().size()) return false;
    if (s.is_empty()) return true;
    auto [a, b] = projections(s);
    if (a.count() * b.count() != s.count()) return false;
    return a == b || !a.intersects(b);
  }

  Subset random_member(std::mt19937_64& rng) const override {
    Subset a = random_subset(n_, rng);
    if (coin(rng)) return rect(a, a);
    Subset b = random_subset(n_, rng) - a;
    return rect(a, b);
  }

  double log2_enumeration_size() const override {
    const double n = static_cast<double>(n_);
    return log2_sum_exp2(n, n * std::log2(3.0));
  }
  double log2_exact_search_cost() const override {
    return static_cast<double>(n_) + 2.0 * std::log2(static_cast<double>(n_) + 1.0);
  }

  ExtremalMembers extremal_members(std::span<const double> mass) const override {
    check_mass(mass);
    require(n_ < 63, ErrorCode::invalid_argument, "base too large for exhaustive search");
    auto best = ExtremalMembers::empty_baseline(space().size());
    const std::uint64_t limit = std::uint64_t{1} << n_;
    std::vector<double> column(n_);
    for (std::uint64_t mask = 1; mask < limit; ++mask) {
      Subset a = from_mask(mask);
      std::fill(column.begin(), column.end(), 0.0);
      for (std::size_t x = 0; x < n_; ++x) {
        if (!((mask >> x) & 1U)) continue;
        for (std::size_t y = 0; y < n_; ++y) column[y] += mass[x * n_ + y];
      }
      double square = 0.0;
      Subset pos(n_), neg(n_);
      double hi = 0.0, lo = 0.0;
      for (std::size_t y = 0; y < n_; ++y) {
        if ((mask >> y) & 1U) {
          square += column[y];
        } else if (column[y] > 0) {
          pos.insert(y);
          hi += column[y];
        } else if (column[y] < 0) {
          neg.insert(y);
          lo += column[y];
        }
      }
      best.absorb(rect(a, a), square);
      if (!pos.is_empty()) best.absorb(rect(a, pos), hi);
      if (!neg.is_empty()) best.absorb(rect(a, neg), lo);
    }
    return best;
  }

  ExtremalMembers local_search(std::span<const double> mass, std::mt19937_64& rng, int restarts,
                               const Subset* seed_member) const override {
    check_mass(mass);
    auto best = ExtremalMembers::empty_baseline(space().size());
    struct Start {
      Subset a, b;
      bool square;
    };
    std::vector<Start> starts;
    if (seed_member != nullptr && !seed_member->is_empty() && contains(*seed_member)) {
      auto [a, b] = projections(*seed_member);
      starts.push_back({a, b, a == b});
    }
    for (int r = 0; r < restarts; ++r) {
      Subset a = random_subset(n_, rng);
      if (a.is_empty()) a.insert(pick(rng, n_));
      starts.push_back({a, a, true});
      Subset b = random_subset(n_, rng) - a;
      starts.push_back({a, b, false});
    }
    for (const auto& start : starts) {
      for (double sign : {1.0, -1.0}) {
        const Subset set = start.square ? climb_square(mass, start.a, sign) : alternate(mass, start.a, start.b, sign);
        const double v = sum_over(mass, set);
        if (sign > 0 && better_maximum(v, set, best.max_value, best.max_set)) {
          best.max_set = set;
          best.max_value = v;
        }
        if (sign < 0 && better_maximum(-v, set, -best.min_value, best.min_set)) {
          best.min_set = set;
          best.min_value = v;
        }
      }
    }
    return best;
  }

 protected:
  std::vector<Subset> do_subtract(const Subset& x, const Subset& y) const override {
    if (x.is_empty()) return {};
    if (y.is_empty()) return {x};
    auto [a, b] = projections(x);
    auto [c, d] = projections(y);
    std::vector<Subset> candidates;
    if (a == b && c == d) {
      // A x A minus C x C
      const Subset e = a & c, g = a - c;
      candidates = {rect(g, g), rect(g, e), rect(e, g)};
    } else if (a == b) {
      // A x A minus (A & C) x (A & D), with C and D disjoint
      const Subset a1 = a & c, a2 = a & d, a3 = a - (c | d);
      const Subset rest = a2 | a3;
      candidates = {rect(rest, rest), rect(rest, a1), rect(a1, a1), rect(a1, a3)};
    } else {
      // A x B with A, B disjoint: every sub-rectangle keeps disjoint sides
      candidates = {rect(a - c, b), rect(a & c, b - d)};
    }
    std::vector<Subset> pieces;
    for (auto& piece : candidates) {
      if (!piece.is_empty()) pieces.push_back(std::move(piece));
    }
    return pieces;
  }

  void generate(const std::function<bool(const Subset&)>& emit) const override {
    require(n_ < 63, ErrorCode::invalid_argument, "base too large for enumeration");
    if (!emit(space().none())) return;
    const std::uint64_t limit = std::uint64_t{1} << n_;
    for (std::uint64_t mask = 1; mask < limit; ++mask) {
      const Subset a = from_mask(mask);
      if (!emit(rect(a, a))) return;
      const std::uint64_t rest = (limit - 1) & ~mask;
      for (std::uint64_t sub = rest; sub != 0; sub = (sub - 1) & rest) {
        if (!emit(rect(a, from_mask(sub)))) return;
      }
    }
  }

 private:
  static GroundSpace square_space(const GroundSpace& base) {
    const GroundSpace factors[] = {base, base};
    return product_space(factors);
  }

  Subset from_mask(std::uint64_t mask) const {
    Subset s(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if ((mask >> i) & 1U) s.insert(i);
    }
    return s;
  }

  Subset rect(const Subset& a, const Subset& b) const {
    Subset s(n_ * n_);
    for (std::size_t x : a.indices()) {
      for (std::size_t y : b.indices()) s.insert(x * n_ + y);
    }
    return s;
  }

  std::pair<Subset, Subset> projections(const Subset& s) const {
    Subset a(n_), b(n_);
    for (std::size_t idx : s.indices()) {
      a.insert(idx / n_);
      b.insert(idx % n_);
    }
    return {a, b};
  }

  // Alternates between the best T outside S and the best S outside T.
  Subset alternate(std::span<const double> mass, Subset a, Subset b, double sign) const {
    double value = sign * sum_over(mass, rect(a, b));
    for (int round = 0; round < kMaxLocalSearchRounds; ++round) {
      const double before = value;
      for (int side = 0; side < 2; ++side) {
        const Subset& fixed = side == 0 ? a : b;
        Subset chosen(n_);
        for (std::size_t z = 0; z < n_; ++z) {
          if (fixed.contains(z)) continue;
          double total = 0.0;
          for (std::size_t w : fixed.indices()) total += side == 0 ? mass[w * n_ + z] : mass[z * n_ + w];
          if (sign * total > 0) chosen.insert(z);
        }
        const Subset trial = side == 0 ? rect(a, chosen) : rect(chosen, b);
        const double v = sign * sum_over(mass, trial);
        if (improved(v, value)) {
          (side == 0 ? b : a) = chosen;
          value = v;
        }
      }
      if (!improved(value, before)) break;
    }
    return rect(a, b);
  }

  // Single-point flips of a square S x S while they improve.
  Subset climb_square(std::span<const double> mass, Subset a, double sign) const {
    double value = sign * sum_over(mass, rect(a, a));
    for (int round = 0; round < kMaxLocalSearchRounds; ++round) {
      bool moved = false;
      for (std::size_t z = 0; z < n_; ++z) {
        Subset trial = a;
        if (trial.contains(z)) {
          trial.erase(z);
        } else {
          trial.insert(z);
        }
        const double v = sign * sum_over(mass, rect(trial, trial));
        if (improved(v, value)) {
          a = std::move(trial);
          value = v;
          moved = true;
        }
      }
      if (!moved) break;
    }
    return rect(a, a);
  }

  std::size_t n_;
};

// ---------------------------------------------------------------------------
// Intersections of algebras (cylinder and hypercube families)

class AlgebraIntersectionSemiring final : public Semiring {
 public:
  AlgebraIntersectionSemiring(const GroundSpace& space, std::vector<Partition> atoms, std::string kind)
      : Semiring(std::move(kind), atoms.size(), space), atoms_(std::move(atoms)) {
    require(!atoms_.empty(), ErrorCode::invalid_argument, "need at least one algebra");
    for (const auto& a : atoms_) {
      require(a.universe() == space.size(), ErrorCode::dimension_mismatch,
              "algebra atoms live on a different space");
    }
    free_ = 0;
    for (std::size_t i = 1; i < atoms_.size(); ++i) {
      if (atoms_[i].size() >= atoms_[free_].size()) free_ = i;
    }
  }

  bool contains(const Subset& s) const override {
    if (s.universe() != space().size()) return false;
    if (s.is_empty()) return true;
    Subset meet = space().full();
    for (std::size_t i = 0; i < atoms_.size(); ++i) meet &= hull(i, s);
    return meet == s;
  }

  Subset random_member(std::mt19937_64& rng) const override {
    Subset meet = space().full();
    for (const auto& a : atoms_) {
      std::vector<char> chosen(a.size());
      for (auto& c : chosen) c = coin(rng);
      meet &= union_of_cells(a, chosen);
    }
    return meet;
  }

  double log2_enumeration_size() const override {
    double total = 0.0;
    for (const auto& a : atoms_) total += static_cast<double>(a.size());
    return total;
  }

  double log2_exact_search_cost() const override {
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i != free_) total += static_cast<double>(atoms_[i].size());
    }
    return total + std::log2(static_cast<double>(space().size()));
  }

  ExtremalMembers extremal_members(std::span<const double> mass) const override {
    check_mass(mass);
    auto best = ExtremalMembers::empty_baseline(space().size());
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i != free_) others.push_back(i);
    }
    const auto& free_atoms = atoms_[free_];
    for (const auto& base : distinct_meets(others)) {
      if (base.is_empty()) continue;
      const auto sums = cell_sums(free_atoms, mass, base);
      std::vector<char> positive(sums.size()), negative(sums.size());
      double hi = 0.0, lo = 0.0;
      for (std::size_t c = 0; c < sums.size(); ++c) {
        if (sums[c] > 0) {
          positive[c] = 1;
          hi += sums[c];
        } else if (sums[c] < 0) {
          negative[c] = 1;
          lo += sums[c];
        }
      }
      const Subset max_set = base & union_of_cells(free_atoms, positive);
      const Subset min_set = base & union_of_cells(free_atoms, negative);
      if (better_maximum(hi, max_set, best.max_value, best.max_set)) {
        best.max_set = max_set;
        best.max_value = hi;
      }
      if (better_maximum(-lo, min_set, -best.min_value, best.min_set)) {
        best.min_set = min_set;
        best.min_value = lo;
      }
    }
    return best;
  }

  ExtremalMembers local_search(std::span<const double> mass, std::mt19937_64& rng, int restarts,
                               const Subset* seed_member) const override {
    check_mass(mass);
    auto best = ExtremalMembers::empty_baseline(space().size());
    std::vector<std::vector<Subset>> starts;
    if (seed_member != nullptr && !seed_member->is_empty() && contains(*seed_member)) {
      std::vector<Subset> unions;
      for (std::size_t i = 0; i < atoms_.size(); ++i) unions.push_back(hull(i, *seed_member));
      starts.push_back(std::move(unions));
    }
    for (int r = 0; r < restarts; ++r) {
      std::vector<Subset> unions;
      for (const auto& a : atoms_) {
        std::vector<char> chosen(a.size());
        for (auto& c : chosen) c = coin(rng);
        unions.push_back(union_of_cells(a, chosen));
      }
      starts.push_back(std::move(unions));
    }
    for (const auto& start : starts) {
      for (double sign : {1.0, -1.0}) {
        auto unions = start;
        double value = sign * sum_over(mass, meet_of(unions));
        for (int round = 0; round < kMaxLocalSearchRounds; ++round) {
          const double before = value;
          for (std::size_t i = 0; i < atoms_.size(); ++i) {
            Subset others = space().full();
            for (std::size_t l = 0; l < atoms_.size(); ++l) {
              if (l != i) others &= unions[l];
            }
            const auto sums = cell_sums(atoms_[i], mass, others);
            std::vector<char> chosen(sums.size());
            for (std::size_t c = 0; c < sums.size(); ++c) chosen[c] = sign * sums[c] > 0;
            Subset candidate = union_of_cells(atoms_[i], chosen);
            const double v = sign * sum_over(mass, others & candidate);
            if (improved(v, value)) {
              unions[i] = std::move(candidate);
              value = v;
            }
          }
          if (!improved(value, before)) break;
        }
        const Subset set = meet_of(unions);
        const double v = sum_over(mass, set);
        if (sign > 0 && better_maximum(v, set, best.max_value, best.max_set)) {
          best.max_set = set;
          best.max_value = v;
        }
        if (sign < 0 && better_maximum(-v, set, -best.min_value, best.min_set)) {
          best.min_set = set;
          best.min_value = v;
        }
      }
    }
    return best;
  }

 protected:
  std::vector<Subset> do_subtract(const Subset& s, const Subset& t) const override {
    if (s.is_empty()) return {};
    if (t.is_empty()) return {s};
    const std::size_t m = atoms_.size();
    std::vector<Subset> sh, th;
    for (std::size_t i = 0; i < m; ++i) {
      sh.push_back(hull(i, s));
      th.push_back(hull(i, t));
    }
    // suffix[j] = intersection of S_i for i >= j
    std::vector<Subset> suffix(m + 1, space().full());
    for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] & sh[j];
    std::vector<Subset> pieces;
    Subset prefix = space().full();
    for (std::size_t j = 0; j < m; ++j) {
      Subset piece = prefix & (sh[j] - th[j]) & suffix[j + 1];
      if (!piece.is_empty()) pieces.push_back(std::move(piece));
      prefix &= sh[j] & th[j];
      if (prefix.is_empty()) break;
    }
    return pieces;
  }

  void generate(const std::function<bool(const Subset&)>& emit) const override {
    std::vector<std::size_t> leading;
    for (std::size_t i = 0; i + 1 < atoms_.size(); ++i) leading.push_back(i);
    const auto& last = atoms_.back();
    for (const auto& base : distinct_meets(leading)) {
      std::vector<char> chosen(last.size(), 0);
      while (true) {
        if (!emit(base & union_of_cells(last, chosen))) return;
        std::size_t i = 0;
        while (i < chosen.size() && chosen[i]) chosen[i++] = 0;
        if (i == chosen.size()) break;
        chosen[i] = 1;
      }
    }
  }

 private:
  Subset hull(std::size_t algebra, const Subset& s) const {
    const auto& a = atoms_[algebra];
    std::vector<char> touched(a.size(), 0);
    for (std::size_t p : s.indices()) touched[a.cell_of(p)] = 1;
    return union_of_cells(a, touched);
  }

  Subset meet_of(const std::vector<Subset>& unions) const {
    Subset meet = space().full();
    for (const auto& u : unions) meet &= u;
    return meet;
  }

  // Distinct intersections of one union of atoms per listed algebra, in
  // first-seen order.
  std::vector<Subset> distinct_meets(const std::vector<std::size_t>& algebras) const {
    std::vector<Subset> level{space().full()};
    for (std::size_t i : algebras) {
      const auto& a = atoms_[i];
      require(a.size() < 40, ErrorCode::invalid_argument, "algebra has too many atoms to enumerate");
      std::unordered_set<Subset, SubsetHash> seen;
      std::vector<Subset> next;
      for (const auto& base : level) {
        std::vector<char> chosen(a.size(), 0);
        while (true) {
          Subset s = base & union_of_cells(a, chosen);
          if (seen.insert(s).second) next.push_back(std::move(s));
          std::size_t c = 0;
          while (c < chosen.size() && chosen[c]) chosen[c++] = 0;
          if (c == chosen.size()) break;
          chosen[c] = 1;
        }
      }
      level = std::move(next);
    }
    return level;
  }

  std::vector<Partition> atoms_;
  std::size_t free_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Constructors

SemiringPtr make_algebra(const GroundSpace& space, const Partition& generating) {
  return std::make_shared<AlgebraSemiring>(space, generating);
}

SemiringPtr make_intervals(const GroundSpace& space, std::vector<std::size_t> order) {
  return std::make_shared<IntervalSemiring>(space, std::move(order));
}

SemiringPtr make_product(std::vector<SemiringPtr> factors) {
  return std::make_shared<ProductSemiring>(std::move(factors), "product");
}

SemiringPtr make_rectangles(const GroundSpace& base) {
  auto side = make_algebra(base, Partition::singletons(base.size()));
  return std::make_shared<ProductSemiring>(std::vector<SemiringPtr>{side, side}, "rectangles");
}

SemiringPtr make_symmetric_rectangles(const GroundSpace& base) {
  return std::make_shared<SymmetricRectangleSemiring>(base);
}

SemiringPtr make_algebra_intersection(const GroundSpace& space, std::vector<Partition> atoms,
                                      std::string kind) {
  return std::make_shared<AlgebraIntersectionSemiring>(space, std::move(atoms), std::move(kind));
}

SemiringPtr make_cylinder_family(const std::vector<GroundSpace>& spaces,
                                 const std::vector<std::vector<std::size_t>>& family) {
  require(!family.empty(), ErrorCode::invalid_argument, "cylinder family must be nonempty");
  require(!spaces.empty(), ErrorCode::invalid_argument, "cylinder family needs at least one coordinate");
  std::vector<std::size_t> dims;
  for (const auto& s : spaces) dims.push_back(s.size());
  const ProductIndexer indexer(dims);
  std::vector<Partition> atoms;
  std::vector<std::vector<std::size_t>> seen;
  for (auto coords : family) {
    std::sort(coords.begin(), coords.end());
    require(!coords.empty(), ErrorCode::invalid_argument, "cylinder family members must be nonempty");
    require(std::adjacent_find(coords.begin(), coords.end()) == coords.end(), ErrorCode::invalid_argument,
            "repeated coordinate in a cylinder family member");
    require(coords.back() < spaces.size(), ErrorCode::invalid_argument, "cylinder coordinate out of range");
    require(std::find(seen.begin(), seen.end(), coords) == seen.end(), ErrorCode::invalid_argument,
            "repeated member in cylinder family");
    seen.push_back(coords);
    std::vector<std::size_t> labels(indexer.size());
    for (std::size_t idx = 0; idx < indexer.size(); ++idx) {
      std::size_t label = 0;
      for (std::size_t c : coords) label = label * dims[c] + indexer.coordinate(idx, c);
      labels[idx] = label;
    }
    atoms.push_back(Partition::from_labels(labels));
  }
  return make_algebra_intersection(product_space(spaces), std::move(atoms), "cylinder");
}

HypercubeSpec HypercubeSpec::all_pairs(std::vector<std::string> alphabet, std::size_t n) {
  HypercubeSpec spec;
  spec.n = n;
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    for (std::size_t b = a + 1; b < alphabet.size(); ++b) spec.pairs.emplace_back(a, b);
  }
  spec.alphabet = std::move(alphabet);
  return spec;
}

void HypercubeSpec::validate() const {
  require(alphabet.size() >= 2, ErrorCode::invalid_argument, "hypercube alphabet needs at least two letters");
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    for (std::size_t j = i + 1; j < alphabet.size(); ++j) {
      require(alphabet[i] != alphabet[j], ErrorCode::invalid_argument, "hypercube alphabet has repeated letters");
    }
  }
  require(n >= 1, ErrorCode::invalid_argument, "hypercube word length must be positive");
  require(!pairs.empty(), ErrorCode::invalid_argument, "hypercube pair set must be nonempty");
  for (auto [a, b] : pairs) {
    require(a < alphabet.size() && b < alphabet.size() && a != b, ErrorCode::invalid_argument,
            "hypercube pair must name two distinct letters of the alphabet");
  }
  const double log2_points = static_cast<double>(n) * std::log2(static_cast<double>(alphabet.size()));
  require(log2_points <= 24.0, ErrorCode::invalid_argument, "hypercube has too many points");
}

std::size_t HypercubeSpec::point_count() const {
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= alphabet.size();
  return count;
}

std::vector<std::size_t> HypercubeSpec::word(std::size_t point) const {
  std::vector<std::size_t> letters(n);
  for (std::size_t pos = n; pos-- > 0;) {
    letters[pos] = point % alphabet.size();
    point /= alphabet.size();
  }
  return letters;
}

std::size_t HypercubeSpec::index_of(std::span<const std::size_t> letters) const {
  std::size_t index = 0;
  for (std::size_t letter : letters) index = index * alphabet.size() + letter;
  return index;
}

std::string HypercubeSpec::word_string(std::size_t point) const {
  std::string out;
  for (std::size_t letter : word(point)) out += alphabet[letter];
  return out;
}

Partition insensitive_atoms(const HypercubeSpec& spec, std::size_t a, std::size_t b) {
  std::vector<std::size_t> labels(spec.point_count());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    auto letters = spec.word(p);
    for (auto& letter : letters) {
      if (letter == b) letter = a;
    }
    labels[p] = spec.index_of(letters);
  }
  return Partition::from_labels(labels);
}

SemiringPtr make_hypercube(const HypercubeSpec& spec) {
  spec.validate();
  std::vector<Partition> atoms;
  for (auto [a, b] : spec.pairs) atoms.push_back(insensitive_atoms(spec, a, b));
  return make_algebra_intersection(GroundSpace::uniform(spec.point_count()), std::move(atoms), "hypercube");
}

}  // namespace regdec
