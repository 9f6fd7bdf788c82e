#include "regdec/applications.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "regdec/error.hpp"

namespace regdec {

namespace {

GroundSpace square_of(const GroundSpace& base) {
  const GroundSpace factors[] = {base, base};
  return product_space(factors);
}

double checked_exponent(double p) {
  require(std::isfinite(p) && p > 1.0, ErrorCode::invalid_argument, "p must exceed 1");
  return std::min(p, 2.0);
}

void require_unit_ball(const RandomVar& f, const GroundSpace& space, double p, double tol) {
  const double norm = lp_norm(f, space, p);
  if (norm > 1.0 + tol) {
    std::ostringstream msg;
    msg << "input has Lp norm " << norm << " > 1; rescale it first";
    fail(ErrorCode::invalid_argument, msg.str());
  }
}

// Projections of a rectangle of base x base onto its two sides.
std::pair<Subset, Subset> sides(const Subset& rect, std::size_t n) {
  Subset a(n), b(n);
  for (std::size_t idx : rect.indices()) {
    a.insert(idx / n);
    b.insert(idx % n);
  }
  return {a, b};
}

}  // namespace

Graphon::Graphon(GroundSpace base, RandomVar w)
    : base_(std::move(base)), square_(square_of(base_)), w_(std::move(w)) {
  const std::size_t n = base_.size();
  require(w_.size() == n * n, ErrorCode::dimension_mismatch, "graphon values must fill base x base");
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (at(x, y) != at(y, x)) {
        std::ostringstream msg;
        msg << "graphon is not symmetric at (" << x << ", " << y << ")";
        fail(ErrorCode::invalid_argument, msg.str());
      }
    }
  }
}

CellCheck is_uniform_cell(const RandomVar& f, const Semiring& sr, const Subset& s, double eta,
                          const SearchOptions& search, double tol) {
  require(eta >= 0.0, ErrorCode::invalid_argument, "eta must be nonnegative");
  require(sr.contains(s), ErrorCode::not_a_member, "cell is not a member of the semiring");
  const auto& space = sr.space();
  CellCheck out;
  const double mass = space.measure(s);
  out.allowed = eta * mass;
  if (mass == 0.0) return out;
  const double mean = conditional_mean(f, s, space);
  std::vector<double> g(f.size(), 0.0);
  for (std::size_t x : s.indices()) g[x] = f[x] - mean;
  // g vanishes off S and S is a member, so the sup over members inside S
  // equals the full uniformity norm of g.
  auto r = uniformity_norm(RandomVar(std::move(g)), sr, search);
  out.worst = r.value;
  if (r.value > out.allowed + tol) {
    out.uniform = false;
    r.witness.set &= s;
    out.violation = r.witness;
  }
  return out;
}

UniformityReport uniform_partition(const RandomVar& f, const Semiring& sr, double p, double eta,
                                   const ApplicationOptions& options) {
  require(eta > 0.0 && eta <= 1.0, ErrorCode::invalid_argument, "eta must lie in (0, 1]");
  const double ep = checked_exponent(p);
  const double tol = options.decompose.tol;
  require(f.size() == sr.space().size(), ErrorCode::dimension_mismatch,
          "function does not live on the semiring's space");
  require_unit_ball(f, sr.space(), ep, tol);
  const auto& space = sr.space();

  const BigRational eta_q = rational_from_double(eta);
  const GrowthFunction growth = GrowthFunction::uniform_partition_preset(eta_q);
  const double sigma = eta * eta / 8.0;

  UniformityReport out;
  out.eta = eta;
  out.decomposition = decompose(f, sr, p, sigma, growth, options.decompose);
  const auto& d = out.decomposition;
  out.partition = d.P;
  for (const auto& cell : d.P.cells()) {
    auto check = is_uniform_cell(f, sr, cell, eta, options.decompose.search, tol);
    (check.uniform ? out.uniform_mass : out.nonuniform_mass) += space.measure(cell);
    out.cells.push_back(std::move(check));
  }
  const double unf = d.certificates.unf.front().measured;
  out.fast_route = lp_norm(d.f_err, space, 1.0) <= sigma + tol &&
                   unf <= sigma / static_cast<double>(d.P.size()) + tol;

  const BigRational sigma_q = eta_q * eta_q / 8;
  out.bound = partition_count_bound(sr.k(), sigma_q, rational_from_double(ep), growth, options.digit_cap);
  if (out.bound.reg_prime) out.within_bound = BigInt(d.P.size()) <= *out.bound.reg_prime;
  out.passed = d.certificates.passed && out.nonuniform_mass <= eta + tol && out.within_bound;
  return out;
}

HypercubeReport hypercube_uniform(const Subset& d, const HypercubeSpec& spec, double eps,
                                  const ApplicationOptions& options, bool accept_cost) {
  spec.validate();
  require(eps > 0.0 && eps <= 1.0, ErrorCode::invalid_argument, "eps must lie in (0, 1]");
  {
    std::set<std::pair<std::size_t, std::size_t>> given;
    for (auto [a, b] : spec.pairs) given.emplace(std::min(a, b), std::max(a, b));
    require(given.size() == spec.alphabet.size() * (spec.alphabet.size() - 1) / 2, ErrorCode::invalid_argument,
            "hypercube regularity needs every pair of letters");
  }
  if (!accept_cost) {
    require(spec.alphabet.size() <= kHypercubeAlphabetCap && spec.n <= kHypercubeLengthCap,
            ErrorCode::infeasible, "hypercube instance exceeds the default size caps");
  }
  require(d.universe() == spec.point_count(), ErrorCode::dimension_mismatch,
          "subset does not live on A^n");
  const auto sr = make_hypercube(spec);
  const RandomVar f = RandomVar::indicator(d);
  const double tol = options.decompose.tol;

  HypercubeReport out;
  ApplicationOptions inner = options;
  if (accept_cost) inner.decompose.search.log2_cap = std::max(inner.decompose.search.log2_cap, 40.0);
  out.uniformity = uniform_partition(f, *sr, 2.0, eps * eps, inner);
  const auto& partition = out.uniformity.partition;
  for (const auto& cell : partition.cells()) {
    out.densities.push_back(static_cast<double>((cell & d).count()) / static_cast<double>(cell.count()));
  }

  const auto members = collect_members(*sr, accept_cost ? std::uint64_t{1} << 40 : std::uint64_t{1} << 26);
  require(!members.truncated, ErrorCode::infeasible, "too many members for the density check");
  for (std::size_t c = 0; c < partition.size(); ++c) {
    if (!out.uniformity.cells[c].uniform) continue;
    const Subset& s = partition.cell(c);
    const double size_s = static_cast<double>(s.count());
    for (const auto& t : members.members) {
      if (t.is_empty() || !t.is_subset_of(s)) continue;
      const double size_t_ = static_cast<double>(t.count());
      if (size_t_ < eps * size_s - 1e-12) continue;
      ++out.admissible_pairs;
      const double gap = std::abs(static_cast<double>((t & d).count()) / size_t_ - out.densities[c]);
      out.worst_gap = std::max(out.worst_gap, gap);
      if (gap > eps + tol) ++out.failed_pairs;
    }
  }
  out.passed = out.uniformity.passed && out.failed_pairs == 0 && out.uniformity.uniform_mass >= 1.0 - eps - tol;
  return out;
}

Partition square_partition(const Partition& r) {
  const std::size_t n = r.universe();
  std::vector<std::size_t> labels(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) labels[x * n + y] = r.cell_of(x) * r.size() + r.cell_of(y);
  }
  return Partition::from_labels(labels);
}

Graphon step_graphon(const Graphon& w, const Partition& r) {
  require(r.universe() == w.n(), ErrorCode::dimension_mismatch, "partition lives on a different base");
  const RandomVar avg = cond_expectation(w.values(), square_partition(r), w.square());
  // Mirror the upper triangle so rounding cannot break symmetry.
  const std::size_t n = w.n();
  std::vector<double> v(avg.values().begin(), avg.values().end());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < x; ++y) v[x * n + y] = v[y * n + x];
  }
  return Graphon(w.base(), RandomVar(std::move(v)));
}

ErrorProfile ErrorProfile::reciprocal() {
  return {[](std::uint64_t i) { return 1.0 / (static_cast<double>(i) + 1.0); },
          GrowthFunction::graphon_reciprocal_preset(), "recip"};
}

ErrorProfile ErrorProfile::constant(double c) {
  require(c > 0.0 && std::isfinite(c), ErrorCode::invalid_argument, "h must be positive");
  return {[c](std::uint64_t) { return c; }, GrowthFunction::graphon_constant_preset(rational_from_double(c)),
          "const"};
}

double ErrorProfile::growth_at(std::uint64_t n) const {
  if (growth) return growth->value(n);
  double total = static_cast<double>(n) + 1.0;
  for (std::uint64_t i = 0; i <= n; ++i) total += 8.0 / h(i);
  return total;
}

StrongRegularity graphon_strong_regularity(const Graphon& w, double p, double eps, const ErrorProfile& h,
                                           const ApplicationOptions& options) {
  const double ep = checked_exponent(p);
  require(eps > 0.0 && eps <= 1.0, ErrorCode::invalid_argument, "eps must lie in (0, 1]");
  require(static_cast<bool>(h.h), ErrorCode::invalid_argument, "missing error profile");
  const double tol = options.decompose.tol;
  const auto& square = w.square();
  const std::size_t n = w.n();
  require_unit_ball(w.values(), square, ep, tol);
  const RandomVar& values = w.values();

  StrongRegularity out;
  Partition R = Partition::trivial(n);
  Partition Z = R;
  RandomVar e_r = cond_expectation(values, square_partition(R), square);
  while (true) {
    const RandomVar e_z = cond_expectation(values, square_partition(Z), square);
    if (lp_norm(e_z - e_r, square, ep) > eps) {
      R = Z;
      e_r = e_z;
      ++out.outer_iterations;
      continue;
    }
    const double cells = static_cast<double>(Z.size()) * static_cast<double>(Z.size());
    const double delta = 1.0 / h.growth_at(static_cast<std::uint64_t>(cells));
    // A rectangle witness below delta certifies the symmetric-rectangle
    // norm too, since every symmetric rectangle is a rectangle.
    const auto cut = cut_norm_exact(values - e_z, w.base());
    if (cut.value <= delta + tol) break;
    auto [s, t] = sides(cut.witness.set, n);
    Partition next = common_refinement(common_refinement(Z, s), t);
    const double increment =
        lp_norm(cond_expectation(values, square_partition(next), square) - e_z, square, ep);
    out.steps.push_back({out.outer_iterations, Z.size(), next.size(), 0, 0, delta, cut.witness.value, increment});
    Z = std::move(next);
    if (++out.refinement_steps > options.decompose.max_steps) {
      fail(ErrorCode::iteration_cap, "refinement step cap exceeded");
    }
  }

  out.R = R;
  out.Z = Z;
  out.w_str = cond_expectation(values, square_partition(R), square);
  const RandomVar e_z = cond_expectation(values, square_partition(Z), square);
  out.w_err = e_z - out.w_str;
  out.w_unf = values - e_z;
  out.U = out.w_str + out.w_unf;
  out.err_lp = lp_norm(out.w_err, square, ep);
  const auto sym = make_symmetric_rectangles(w.base());
  SearchOptions exact;
  exact.log2_cap = std::max(options.decompose.search.log2_cap, 30.0);
  out.unf_symmetric = uniformity_norm(out.w_unf, *sym, exact).value;
  out.unf_cut = cut_norm_exact(out.w_unf, w.base()).value;
  const RandomVar u_r = cond_expectation(out.U, square_partition(R), square);
  out.step_gap = cut_norm_exact(out.U - u_r, w.base()).value;
  out.h_bound = h.h(R.size());
  const double r2 = static_cast<double>(R.size()) * static_cast<double>(R.size());
  const double unf_bound = 1.0 / h.growth_at(static_cast<std::uint64_t>(r2));

  if (h.growth) {
    out.bound = partition_count_bound(4, rational_from_double(eps), rational_from_double(ep), *h.growth,
                                      options.digit_cap);
    if (out.bound->reg_prime) out.within_bound = BigInt(R.size()) * R.size() <= *out.bound->reg_prime;
  }
  out.passed = out.err_lp <= eps + tol && out.unf_symmetric <= unf_bound + tol &&
               out.step_gap <= out.h_bound + tol && out.within_bound;
  return out;
}

WeakRegularity graphon_weak_regularity(const Graphon& w, double p, double eps, double tol) {
  const double ep = checked_exponent(p);
  require(eps > 0.0 && eps <= 1.0, ErrorCode::invalid_argument, "eps must lie in (0, 1]");
  const auto& square = w.square();
  require_unit_ball(w.values(), square, ep, tol);
  const std::size_t n = w.n();

  WeakRegularity out;
  const BigRational eps_q = rational_from_double(eps);
  const BigInt limit = ceil(BigRational(1) / ((rational_from_double(ep) - 1) * eps_q * eps_q));
  out.step_limit = limit.convert_to<std::uint64_t>();
  out.R = Partition::trivial(n);
  out.sizes.push_back(1);
  bool growth_ok = true;
  while (true) {
    const RandomVar w_r = cond_expectation(w.values(), square_partition(out.R), square);
    const auto cut = cut_norm_exact(w.values() - w_r, w.base());
    out.final_cut = cut.value;
    if (cut.value <= eps + tol) break;
    auto [s, t] = sides(cut.witness.set, n);
    Partition next = common_refinement(common_refinement(out.R, s), t);
    growth_ok = growth_ok && next.size() <= 4 * out.R.size();
    out.R = std::move(next);
    out.sizes.push_back(out.R.size());
    if (++out.steps > 1'000'000) fail(ErrorCode::iteration_cap, "refinement step cap exceeded");
  }
  out.passed = growth_ok && out.steps <= out.step_limit && out.final_cut <= eps + tol;
  return out;
}

}  // namespace regdec
