#pragma once

// Uniformity norms ||f||_S = sup_{S in S} |integral_S f| with exact and
// heuristic witness oracles, the cut norm on product spaces, and the
// comparison inequalities between these norms and L1.

#include <cstdint>
#include <optional>
#include <vector>

#include "regdec/measure.hpp"
#include "regdec/semiring.hpp"

namespace regdec {

// Comparison slack for strict inequalities against thresholds.
inline constexpr double kDefaultTolerance = 1e-9;

enum class SearchMode { exact, heuristic };

struct SearchOptions {
  SearchMode mode = SearchMode::exact;
  // Exact searches whose log2 cost exceeds this raise InfeasibleError.
  double log2_cap = kDefaultLog2Cap;
  std::uint64_t seed = 0;
  int restarts = 8;
  // Extra starting member for the heuristic.
  std::optional<Subset> seed_member;
};

struct Witness {
  Subset set;
  double value = 0.0;
  double abs_value = 0.0;
};

struct NormResult {
  double value = 0.0;
  Witness witness;
  bool exact = false;
};

// Pointwise w(x) f(x): the signed mass whose sums over members are integrals.
std::vector<double> mass_of(const RandomVar& f, const GroundSpace& space);

NormResult uniformity_norm(const RandomVar& f, const Semiring& sr, const SearchOptions& options = {});

// Same value by listing every member; used to cross-check the structural
// optimisers. Throws InfeasibleError past the budget.
NormResult uniformity_norm_by_enumeration(const RandomVar& f, const Semiring& sr,
                                          std::uint64_t budget = std::uint64_t{1} << 24);

// A member S with |integral_S f| > threshold + tol, or none. In exact mode
// none certifies that the norm is at most threshold + tol.
std::optional<Witness> find_violating_set(const RandomVar& f, const Semiring& sr, double threshold,
                                          const SearchOptions& options = {},
                                          double tol = kDefaultTolerance);

// Cut norm of f on base x base (points indexed x * n + y): for every row set
// S the best column set is read off the signs of the S-marginals.
NormResult cut_norm_exact(const RandomVar& f, const GroundSpace& base, std::size_t max_base = 20);

struct NormComparison {
  double norm = 0.0;       // ||f||_S
  double l1 = 0.0;         // ||f||_L1
  double cond_norm = 0.0;  // ||E(f|B)||_S
  bool below_l1 = false;
  bool contraction = false;
  // Only for algebra semirings: ||f||_S <= ||E(f|S)||_L1 <= 2 ||f||_S.
  std::optional<double> cond_l1;
  std::optional<bool> algebra_sandwich;

  bool all_pass() const { return below_l1 && contraction && algebra_sandwich.value_or(true); }
};

// Checks ||f||_S <= ||f||_L1 and ||E(f|B)||_S <= ||f||_S with exact norms.
// Every union of cells of B must be a member of sr. When `algebra_atoms` is given, sr
// must be the algebra those atoms generate and the L1 sandwich is checked too.
NormComparison check_norm_comparisons(const RandomVar& f, const Semiring& sr, const Partition& b,
                                      const Partition* algebra_atoms = nullptr,
                                      double tol = kDefaultTolerance);

}  // namespace regdec
