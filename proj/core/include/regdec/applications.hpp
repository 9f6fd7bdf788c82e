#pragma once

// Consequences of the decomposition: uniform partitions, density regularity
// on A^n, step graphons, and strong and weak regularity for Lp graphons.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "regdec/bounds.hpp"
#include "regdec/decompose.hpp"

namespace regdec {

// A symmetric function on base x base (points indexed x * n + y).
class Graphon {
 public:
  Graphon(GroundSpace base, RandomVar w);

  const GroundSpace& base() const noexcept { return base_; }
  const GroundSpace& square() const noexcept { return square_; }
  const RandomVar& values() const noexcept { return w_; }
  std::size_t n() const noexcept { return base_.size(); }
  double at(std::size_t x, std::size_t y) const { return w_[x * base_.size() + y]; }

 private:
  GroundSpace base_;
  GroundSpace square_;
  RandomVar w_;
};

struct CellCheck {
  bool uniform = true;
  // sup |integral_T (f - E(f|S))| over members T inside S.
  double worst = 0.0;
  double allowed = 0.0;  // eta * P(S)
  std::optional<Witness> violation;
};

// Whether S is uniform: |integral_T (f - E(f|S))| <= eta P(S) for every
// member T inside S. S must be a member.
CellCheck is_uniform_cell(const RandomVar& f, const Semiring& sr, const Subset& s, double eta,
                          const SearchOptions& search = {}, double tol = kDefaultTolerance);

struct UniformityReport {
  Partition partition;
  std::vector<CellCheck> cells;
  double eta = 0.0;
  double uniform_mass = 0.0;
  double nonuniform_mass = 0.0;
  Decomposition decomposition;
  // The fast sufficient condition: ||f_err||_L1 <= eta^2/8 and
  // ||f_unf||_S <= (eta^2/8)/|P|.
  bool fast_route = false;
  BoundReport bound;  // U(k, p, eta), possibly overflowed
  bool within_bound = true;
  bool passed = false;
};

struct ApplicationOptions {
  DecomposeOptions decompose;
  std::size_t digit_cap = kDefaultDigitCap;
};

// Decomposes with sigma = eta^2/8 and F(n) = 8n/eta^2 + 1, then checks
// every cell of P directly. Requires ||f||_p <= 1.
UniformityReport uniform_partition(const RandomVar& f, const Semiring& sr, double p, double eta,
                                   const ApplicationOptions& options = {});

struct HypercubeReport {
  UniformityReport uniformity;
  std::vector<double> densities;  // P_S(D) per cell of the partition
  std::uint64_t admissible_pairs = 0;
  std::uint64_t failed_pairs = 0;
  double worst_gap = 0.0;
  bool passed = false;
};

// Default limits on |A| and n for the exhaustive density check.
inline constexpr std::size_t kHypercubeAlphabetCap = 3;
inline constexpr std::size_t kHypercubeLengthCap = 3;

// Uniform partition of 1_D at eta = eps^2 over the insensitive-set semiring,
// then checks |P_T(D) - P_S(D)| <= eps for every uniform cell S and member
// T inside S with |T| >= eps |S|.
HypercubeReport hypercube_uniform(const Subset& d, const HypercubeSpec& spec, double eps,
                                  const ApplicationOptions& options = {}, bool accept_cost = false);

// W_R = E(W | R x R).
Graphon step_graphon(const Graphon& w, const Partition& r);

// Product partition R x R of base x base.
Partition square_partition(const Partition& r);

// Positive error profile h for strong regularity, with the matching growth
// function F(n) = (n+1) + sum_{i<=n} 8/h(i) when it has a closed form.
struct ErrorProfile {
  std::function<double(std::uint64_t)> h;
  std::optional<GrowthFunction> growth;
  std::string name;

  static ErrorProfile reciprocal();  // h(i) = 1/(i+1)
  static ErrorProfile constant(double c);
  double growth_at(std::uint64_t n) const;
};

struct StrongRegularity {
  Partition R;  // base partition, P = R x R
  Partition Z;  // base partition, Q = Z x Z
  RandomVar U;  // W_str + W_unf
  RandomVar w_str, w_err, w_unf;
  double err_lp = 0.0;         // ||W - U||_p
  double unf_symmetric = 0.0;  // ||W_unf|| over symmetric rectangles
  double unf_cut = 0.0;        // ||W_unf||_cut
  double step_gap = 0.0;       // ||U - U_R||_cut
  double h_bound = 0.0;        // h(|R|)
  std::size_t outer_iterations = 0;
  std::size_t refinement_steps = 0;
  std::vector<StepRecord> steps;
  std::optional<BoundReport> bound;  // s(eps, p, h)
  bool within_bound = true;
  bool passed = false;
};

StrongRegularity graphon_strong_regularity(const Graphon& w, double p, double eps, const ErrorProfile& h,
                                           const ApplicationOptions& options = {});

struct WeakRegularity {
  Partition R;
  std::size_t steps = 0;
  std::uint64_t step_limit = 0;  // ceil(1/((p-1) eps^2))
  std::vector<std::size_t> sizes;  // |R| after each step, starting at 1
  double final_cut = 0.0;           // ||W - W_R||_cut
  bool passed = false;
};

WeakRegularity graphon_weak_regularity(const Graphon& w, double p, double eps,
                                       double tol = kDefaultTolerance);

}  // namespace regdec
