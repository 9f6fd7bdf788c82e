#pragma once

// k-semirings of "structured" subsets of a finite ground space.
//
// A k-semiring contains the empty set and the whole space, is closed under
// intersection, and every difference S - T of members splits into at most k
// pairwise disjoint members. Each concrete family below supplies a
// structural membership test, a constructive subtraction, and an exact
// optimiser for sum_{x in S} mass(x) over its members that exploits the
// family's shape; the uniformity norms are built on that optimiser.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regdec/measure.hpp"

namespace regdec {

// Default budget, in log2 units, for exhaustive enumerations and exact searches.
inline constexpr double kDefaultLog2Cap = 24.0;

// Relative slack under which two candidate values count as tied; ties go to
// the canonically smaller subset.
inline constexpr double kTieTolerance = 1e-12;

// True if (value, set) should replace (best_value, best_set) when maximising.
bool better_maximum(double value, const Subset& set, double best_value, const Subset& best_set);

// Best members for maximising and for minimising sum_{x in S} mass(x).
struct ExtremalMembers {
  Subset max_set;
  double max_value = 0.0;
  Subset min_set;
  double min_value = 0.0;

  // Folds another candidate pair in under the tie-breaking rule.
  void absorb(const Subset& set, double value);
  static ExtremalMembers empty_baseline(std::size_t universe);
};

enum class EnumerationStatus { complete, truncated };

class Semiring;
using SemiringPtr = std::shared_ptr<const Semiring>;

class Semiring {
 public:
  virtual ~Semiring() = default;

  std::size_t k() const noexcept { return k_; }
  const GroundSpace& space() const noexcept { return space_; }
  const std::string& kind() const noexcept { return kind_; }

  virtual bool contains(const Subset& s) const = 0;

  // Pairwise disjoint members whose union is S - T; at most k of them and
  // none empty. Throws not_a_member unless both arguments are members.
  std::vector<Subset> subtract(const Subset& s, const Subset& t) const;

  virtual Subset random_member(std::mt19937_64& rng) const = 0;

  // log2 of the number of candidates visited when listing every member.
  virtual double log2_enumeration_size() const = 0;
  bool exact_enumeration_feasible(double log2_cap = kDefaultLog2Cap) const {
    return log2_enumeration_size() <= log2_cap;
  }

  // Visits distinct members in a deterministic order. Returns truncated if
  // more than `budget` distinct members exist.
  EnumerationStatus enumerate(std::uint64_t budget,
                              const std::function<void(const Subset&)>& visit) const;

  // log2 of the work done by extremal_members.
  virtual double log2_exact_search_cost() const { return log2_enumeration_size(); }

  // Exact optimisers of sum_{x in S} mass(x) over members S, using the
  // family's own structure.
  virtual ExtremalMembers extremal_members(std::span<const double> mass) const;

  // Same optimisation by visiting every member; independent of the
  // structural routes and used as their oracle.
  ExtremalMembers extremal_by_enumeration(std::span<const double> mass, std::uint64_t budget) const;

  // Alternating local search: fix all components of a member but one and
  // optimise that one in closed form, until nothing improves. Runs from
  // `restarts` random starts plus `seed_member` when given. Returns a
  // feasible (not necessarily optimal) pair. Families whose exact optimiser
  // is polynomial return the exact answer.
  virtual ExtremalMembers local_search(std::span<const double> mass, std::mt19937_64& rng,
                                       int restarts, const Subset* seed_member) const;

 protected:
  Semiring(std::string kind, std::size_t k, GroundSpace space);

  virtual std::vector<Subset> do_subtract(const Subset& s, const Subset& t) const = 0;
  // Emits candidate members, possibly with repeats. Stops when emit returns false.
  virtual void generate(const std::function<bool(const Subset&)>& emit) const = 0;

  void check_mass(std::span<const double> mass) const;

 private:
  std::string kind_;
  std::size_t k_;
  GroundSpace space_;
};

// Algebra generated by a partition: members are unions of its cells (k = 1).
SemiringPtr make_algebra(const GroundSpace& space, const Partition& generating);

// Intervals of a linear order on the points (k = 2). `order` lists the
// points from first to last.
SemiringPtr make_intervals(const GroundSpace& space, std::vector<std::size_t> order);

// Products S_1 x ... x S_d of factor members over the product space with
// product weights; k is the sum of the factors' k.
SemiringPtr make_product(std::vector<SemiringPtr> factors);

// All rectangles S x T on base x base (k = 2).
SemiringPtr make_rectangles(const GroundSpace& base);

// Rectangles S x T with S = T or S and T disjoint (k = 4).
SemiringPtr make_symmetric_rectangles(const GroundSpace& base);

// Intersections of one member from each algebra; each algebra is given by
// its atoms. k = number of algebras.
SemiringPtr make_algebra_intersection(const GroundSpace& space, std::vector<Partition> atoms,
                                      std::string kind = "algebra-intersection");

// Cylinder semiring on V_1 x ... x V_d: intersections over F in `family` of
// sets depending only on the coordinates in F (0-based). k = |family|.
SemiringPtr make_cylinder_family(const std::vector<GroundSpace>& spaces,
                                 const std::vector<std::vector<std::size_t>>& family);

struct HypercubeSpec {
  std::vector<std::string> alphabet;
  std::size_t n = 1;
  // Unordered letter pairs, as alphabet indices.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  // Spec with every unordered pair of letters.
  static HypercubeSpec all_pairs(std::vector<std::string> alphabet, std::size_t n);

  void validate() const;
  std::size_t point_count() const;
  // Letters of the word at a point index (lexicographic order).
  std::vector<std::size_t> word(std::size_t point) const;
  std::size_t index_of(std::span<const std::size_t> letters) const;
  std::string word_string(std::size_t point) const;
};

// Atoms of the algebra of (a, b)-insensitive subsets of A^n.
Partition insensitive_atoms(const HypercubeSpec& spec, std::size_t a, std::size_t b);

// Intersections of (a, b)-insensitive sets over the spec's pairs, on the
// uniform measure. k = number of pairs.
SemiringPtr make_hypercube(const HypercubeSpec& spec);

// Convenience: all distinct members, or truncated = true past the budget.
struct MemberList {
  std::vector<Subset> members;
  bool truncated = false;
};
MemberList collect_members(const Semiring& sr, std::uint64_t budget);

}  // namespace regdec
