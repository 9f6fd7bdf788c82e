#include "regdec/uniformity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "regdec/error.hpp"

namespace regdec {

namespace {

NormResult pick_larger(const ExtremalMembers& ext, bool exact) {
  NormResult r;
  r.exact = exact;
  const bool use_max = better_maximum(ext.max_value, ext.max_set, -ext.min_value, ext.min_set);
  r.witness.set = use_max ? ext.max_set : ext.min_set;
  r.witness.value = use_max ? ext.max_value : ext.min_value;
  r.witness.abs_value = std::abs(r.witness.value);
  r.value = r.witness.abs_value;
  return r;
}

void check_space(const RandomVar& f, const Semiring& sr) {
  require(f.size() == sr.space().size(), ErrorCode::dimension_mismatch,
          "function does not live on the semiring's space");
}

Subset rectangle(std::uint64_t rows, std::uint64_t cols, std::size_t n) {
  Subset s(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    if (!((rows >> x) & 1U)) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if ((cols >> y) & 1U) s.insert(x * n + y);
    }
  }
  return s;
}

}  // namespace

std::vector<double> mass_of(const RandomVar& f, const GroundSpace& space) {
  require(f.size() == space.size(), ErrorCode::dimension_mismatch, "function and space sizes differ");
  std::vector<double> mass(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) mass[i] = space.weight(i) * f[i];
  return mass;
}

NormResult uniformity_norm(const RandomVar& f, const Semiring& sr, const SearchOptions& options) {
  check_space(f, sr);
  const auto mass = mass_of(f, sr.space());
  if (options.mode == SearchMode::heuristic) {
    std::mt19937_64 rng(options.seed);
    const Subset* seed = options.seed_member ? &*options.seed_member : nullptr;
    return pick_larger(sr.local_search(mass, rng, options.restarts, seed), false);
  }
  const double cost = sr.log2_exact_search_cost();
  if (cost > options.log2_cap) {
    std::ostringstream msg;
    msg << "exact search over " << sr.kind() << " needs about 2^" << cost
        << " steps, above the cap of 2^" << options.log2_cap;
    throw InfeasibleError(msg.str(), cost);
  }
  return pick_larger(sr.extremal_members(mass), true);
}

NormResult uniformity_norm_by_enumeration(const RandomVar& f, const Semiring& sr, std::uint64_t budget) {
  check_space(f, sr);
  return pick_larger(sr.extremal_by_enumeration(mass_of(f, sr.space()), budget), true);
}

std::optional<Witness> find_violating_set(const RandomVar& f, const Semiring& sr, double threshold,
                                          const SearchOptions& options, double tol) {
  require(threshold >= 0.0, ErrorCode::invalid_argument, "threshold must be nonnegative");
  auto r = uniformity_norm(f, sr, options);
  if (r.value > threshold + tol) return r.witness;
  return std::nullopt;
}

NormResult cut_norm_exact(const RandomVar& f, const GroundSpace& base, std::size_t max_base) {
  const std::size_t n = base.size();
  require(f.size() == n * n, ErrorCode::dimension_mismatch, "cut norm needs a function on base x base");
  if (n > max_base || n > 62) {
    std::ostringstream msg;
    msg << "cut norm over a " << n << "-point base exceeds the cap of " << max_base << " points";
    throw InfeasibleError(msg.str(), static_cast<double>(n) + std::log2(static_cast<double>(n)));
  }
  std::vector<double> mass(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) mass[x * n + y] = base.weight(x) * base.weight(y) * f[x * n + y];
  }

  struct Best {
    double value = 0.0;
    std::uint64_t rows = 0, cols = 0;
  };
  Best hi, lo;
  // Ties are resolved on the canonical order of the rectangle itself.
  auto offer = [&](Best& best, double value, std::uint64_t rows, std::uint64_t cols, double sign) {
    const Subset candidate = rectangle(rows, cols, n);
    const Subset incumbent = rectangle(best.rows, best.cols, n);
    if (better_maximum(sign * value, candidate, sign * best.value, incumbent)) best = {value, rows, cols};
  };

  std::vector<double> column(n, 0.0);
  std::uint64_t rows = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const std::size_t flip = static_cast<std::size_t>(std::countr_zero(step));
    const double sign = ((rows >> flip) & 1U) ? -1.0 : 1.0;
    rows ^= std::uint64_t{1} << flip;
    for (std::size_t y = 0; y < n; ++y) column[y] += sign * mass[flip * n + y];
    std::uint64_t pos = 0, neg = 0;
    double up = 0.0, down = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (column[y] > 0) {
        pos |= std::uint64_t{1} << y;
        up += column[y];
      } else if (column[y] < 0) {
        neg |= std::uint64_t{1} << y;
        down += column[y];
      }
    }
    const double slack = kTieTolerance * std::max({1.0, std::abs(up), std::abs(hi.value)});
    if (pos != 0 && up >= hi.value - slack) offer(hi, up, rows, pos, 1.0);
    const double slack_lo = kTieTolerance * std::max({1.0, std::abs(down), std::abs(lo.value)});
    if (neg != 0 && down <= lo.value + slack_lo) offer(lo, down, rows, neg, -1.0);
  }

  ExtremalMembers ext;
  ext.max_set = rectangle(hi.rows, hi.cols, n);
  ext.min_set = rectangle(lo.rows, lo.cols, n);
  // Re-evaluate in ascending point order so the reported value does not
  // depend on the Gray-code path.
  const GroundSpace square = [&] {
    const GroundSpace factors[] = {base, base};
    return product_space(factors);
  }();
  ext.max_value = integral_over(f, ext.max_set, square);
  ext.min_value = integral_over(f, ext.min_set, square);
  return pick_larger(ext, true);
}

NormComparison check_norm_comparisons(const RandomVar& f, const Semiring& sr, const Partition& b,
                                      const Partition* algebra_atoms, double tol) {
  check_space(f, sr);
  const auto& space = sr.space();
  require(b.universe() == space.size(), ErrorCode::dimension_mismatch, "partition lives on a different space");
  // The algebra generated by B must sit inside sr: every union of cells is a member.
  require(b.size() <= 20, ErrorCode::infeasible, "too many cells to check the generated algebra");
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << b.size()); ++mask) {
    Subset u(space.size());
    for (std::size_t c = 0; c < b.size(); ++c) {
      if ((mask >> c) & 1U) u |= b.cell(c);
    }
    require(sr.contains(u), ErrorCode::not_a_member, "a union of partition cells is not a member of the semiring");
  }
  NormComparison out;
  out.norm = uniformity_norm(f, sr).value;
  out.l1 = lp_norm(f, space, 1.0);
  out.cond_norm = uniformity_norm(cond_expectation(f, b, space), sr).value;
  out.below_l1 = out.norm <= out.l1 + tol;
  out.contraction = out.cond_norm <= out.norm + tol;
  if (algebra_atoms != nullptr) {
    require(sr.k() == 1, ErrorCode::invalid_argument, "the L1 sandwich needs an algebra semiring");
    for (const auto& cell : algebra_atoms->cells()) {
      require(sr.contains(cell), ErrorCode::not_a_member, "algebra atom is not a member of the semiring");
    }
    const double cond_l1 = lp_norm(cond_expectation(f, *algebra_atoms, space), space, 1.0);
    out.cond_l1 = cond_l1;
    out.algebra_sandwich = out.norm <= cond_l1 + tol && cond_l1 <= 2.0 * out.norm + tol;
  }
  return out;
}

}  // namespace regdec
