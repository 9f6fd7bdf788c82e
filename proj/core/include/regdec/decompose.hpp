#pragma once

// Energy-increment decomposition f = f_str + f_err + f_unf over a k-semiring.
//
// The structured part is E(f|P), the error part E(f|Q) - E(f|P) is small in
// Lp, and the uniform part f - E(f|Q) is small in the semiring's uniformity
// norm. Certificates are always recomputed after the run.

#include <cstdint>
#include <optional>
#include <vector>

#include "regdec/growth.hpp"
#include "regdec/measure.hpp"
#include "regdec/semiring.hpp"
#include "regdec/uniformity.hpp"

namespace regdec {

struct RefineResult {
  Partition partition;
  Witness witness;
  // ||E(f|R) - E(f|Q)||_p, strictly above delta.
  double increment = 0.0;
};

// Splits every cell C of Q into C & S and the pieces of C - S for a witness
// S with |integral_S (f - E(f|Q))| > delta. None when no witness exists
// (certified in exact mode). Every cell of Q must be a member of sr.
std::optional<RefineResult> refine_step(const RandomVar& f, const Partition& q, const Semiring& sr,
                                        double delta, double p, const SearchOptions& search = {},
                                        double tol = kDefaultTolerance);

struct DecomposeOptions {
  SearchOptions search;
  // Error instead of rescaling inputs with ||f||_p > 1.
  bool strict = false;
  double tol = kDefaultTolerance;
  std::uint64_t max_steps = 1'000'000;
  // Heuristic witnesses are only accepted when this is set.
  bool best_effort = false;
};

struct StepRecord {
  std::size_t outer = 0;  // energy jumps so far
  std::size_t cells_before = 0;
  std::size_t cells_after = 0;
  std::size_t stage = 0;  // semiring index searched (multi-family runs)
  std::size_t function = 0;
  double delta = 0.0;
  double witness_value = 0.0;
  double increment = 0.0;
};

struct UniformCertificate {
  std::uint64_t index = 0;  // semiring index i (saturates)
  double bound = 0.0;     // 1/F(i)
  double measured = 0.0;
  bool exact = true;
};

struct Certificates {
  double err_lp = 0.0;
  std::vector<UniformCertificate> unf;
  std::size_t outer_iterations = 0;
  std::size_t refinement_steps = 0;
  std::vector<StepRecord> steps;
  // f was multiplied by `scale` before the run; certificates refer to the
  // scaled function.
  double scale = 1.0;
  double effective_p = 2.0;
  bool exact = true;
  bool passed = false;
};

struct Decomposition {
  Partition P;
  Partition Q;
  RandomVar f_str;
  RandomVar f_err;
  RandomVar f_unf;
  double p = 2.0;
  double sigma = 1.0;
  GrowthFunction growth = GrowthFunction::successor();
  Certificates certificates;
};

// Single-semiring loop: P = {Omega}; Q = P; jump P := Q when
// ||E(f|Q) - E(f|P)||_p > sigma, otherwise refine Q with delta = 1/F(|Q|)
// until no witness remains. Guarantees ||f_err||_p <= sigma and
// ||f_unf||_S <= 1/F(|P|).
Decomposition decompose(const RandomVar& f, const Semiring& sr, double p, double sigma,
                        const GrowthFunction& growth, const DecomposeOptions& options = {});

struct MultiDecomposition {
  Partition P;
  Partition Q;
  // One decomposition per input function, all sharing P and Q.
  std::vector<Decomposition> parts;
  std::optional<BigInt> N;       // F^(n_j)(0); empty past the digit cap
  std::size_t energy_stage = 0;  // j
  BigInt n_j;                    // stage where P was fixed
  BigInt J;                      // Q lies in the semiring of index F^(J)(0)
  std::size_t p_semiring = 0;    // list index whose members make up P
  std::size_t q_semiring = 0;    // list index whose members make up Q
  bool passed = false;
};

// Several functions against an increasing sequence of semirings S_0, S_1, ...
// (the list's last entry repeats forever). Stage bookkeeping: m_i = F^(i)(0),
// stage semiring S_{m_i}, witness threshold 1/H(n_j) with H(n) = F^(n+2)(0).
// Guarantees ||f_err||_p <= sigma and ||f_unf||_{S_i} <= 1/F(i) for all
// i <= F(N), for every function.
MultiDecomposition decompose_multi(const std::vector<RandomVar>& family,
                                   const std::vector<SemiringPtr>& semirings, double p, double sigma,
                                   const GrowthFunction& growth, const DecomposeOptions& options = {});

}  // namespace regdec
