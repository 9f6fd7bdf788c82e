#include "regdec/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "regdec/error.hpp"

namespace regdec {

namespace {

struct Normalized {
  RandomVar g;
  double scale = 1.0;
};

double effective_exponent(double p) {
  require(std::isfinite(p), ErrorCode::invalid_argument, "p must be finite");
  require(p > 1.0, ErrorCode::invalid_argument,
          "p must exceed 1: the decomposition fails for p = 1 in general");
  return std::min(p, 2.0);
}

Normalized normalize(const RandomVar& f, const GroundSpace& space, double p, const DecomposeOptions& opt) {
  const double norm = lp_norm(f, space, p);
  if (norm <= 1.0 + 1e-12) return {f, 1.0};
  if (opt.strict) {
    std::ostringstream msg;
    msg << "input has Lp norm " << norm << " > 1 (strict mode)";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  return {f * (1.0 / norm), 1.0 / norm};
}

void check_search(const DecomposeOptions& opt) {
  require(opt.search.mode == SearchMode::exact || opt.best_effort, ErrorCode::invalid_argument,
          "heuristic witness search requires best-effort mode");
  require(opt.tol >= 0.0, ErrorCode::invalid_argument, "tolerance must be nonnegative");
}

void check_cells(const Partition& q, const Semiring& sr) {
  require(q.universe() == sr.space().size(), ErrorCode::dimension_mismatch,
          "partition lives on a different space");
  for (const auto& cell : q.cells()) {
    require(sr.contains(cell), ErrorCode::not_a_member, "partition cell is not a member of the semiring");
  }
}

double reciprocal_at(const GrowthFunction& growth, std::uint64_t n) {
  return 1.0 / growth.value(n);
}

// Splits every cell C into C & S plus the pieces of C - S.
Partition split_by(const Partition& q, const Subset& s, const Semiring& sr) {
  std::vector<Subset> cells;
  for (const auto& cell : q.cells()) {
    Subset inside = cell & s;
    if (!inside.is_empty()) cells.push_back(std::move(inside));
    for (auto& piece : sr.subtract(cell, s)) cells.push_back(std::move(piece));
  }
  Partition r(std::move(cells));
  if (r.size() > (sr.k() + 1) * q.size()) {
    fail(ErrorCode::certificate_failure, "refinement grew by more than a factor k + 1");
  }
  return r;
}

double uniform_norm_for_certificate(const RandomVar& g, const Semiring& sr, const DecomposeOptions& opt,
                                    bool& exact) {
  try {
    SearchOptions search = opt.search;
    search.mode = SearchMode::exact;
    return uniformity_norm(g, sr, search).value;
  } catch (const InfeasibleError&) {
    if (!opt.best_effort) throw;
    exact = false;
    SearchOptions search = opt.search;
    search.mode = SearchMode::heuristic;
    return uniformity_norm(g, sr, search).value;
  }
}

bool parts_sum_back(const RandomVar& f, const RandomVar& a, const RandomVar& b, const RandomVar& c) {
  double scale = 1.0;
  for (double v : f.values()) scale = std::max(scale, std::abs(v));
  return max_abs_difference(a + b + c, f) <= 1e-9 * scale;
}

void fill_parts(Decomposition& d, const RandomVar& f, const GroundSpace& space) {
  const RandomVar ep = cond_expectation(f, d.P, space);
  const RandomVar eq = cond_expectation(f, d.Q, space);
  d.f_str = ep;
  d.f_err = eq - ep;
  d.f_unf = f - eq;
}

}  // namespace

std::optional<RefineResult> refine_step(const RandomVar& f, const Partition& q, const Semiring& sr,
                                        double delta, double p, const SearchOptions& search, double tol) {
  require(delta > 0.0 || tol > 0.0, ErrorCode::invalid_argument, "delta must be positive");
  require(p >= 1.0, ErrorCode::invalid_argument, "p must be at least 1");
  require(f.size() == sr.space().size(), ErrorCode::dimension_mismatch,
          "function does not live on the semiring's space");
  check_cells(q, sr);
  const auto& space = sr.space();
  const RandomVar eq = cond_expectation(f, q, space);
  auto witness = find_violating_set(f - eq, sr, std::max(delta, 0.0), search, tol);
  if (!witness) return std::nullopt;
  RefineResult out{split_by(q, witness->set, sr), *witness, 0.0};
  out.increment = lp_norm(cond_expectation(f, out.partition, space) - eq, space, p);
  if (search.mode == SearchMode::exact && !(out.increment > delta)) {
    fail(ErrorCode::certificate_failure, "refinement did not increase the energy past delta");
  }
  return out;
}

Decomposition decompose(const RandomVar& f, const Semiring& sr, double p, double sigma,
                        const GrowthFunction& growth, const DecomposeOptions& options) {
  const double ep = effective_exponent(p);
  require(sigma > 0.0 && sigma <= 1.0, ErrorCode::invalid_argument, "sigma must lie in (0, 1]");
  check_search(options);
  const auto& space = sr.space();
  require(f.size() == space.size(), ErrorCode::dimension_mismatch,
          "function does not live on the semiring's space");
  const auto [g, scale] = normalize(f, space, ep, options);

  Decomposition d;
  d.p = p;
  d.sigma = sigma;
  d.growth = growth;
  auto& cert = d.certificates;
  cert.scale = scale;
  cert.effective_p = ep;
  cert.exact = options.search.mode == SearchMode::exact;

  Partition P = Partition::trivial(space.size());
  Partition Q = P;
  RandomVar e_p = cond_expectation(g, P, space);
  while (true) {
    const RandomVar e_q = cond_expectation(g, Q, space);
    if (lp_norm(e_q - e_p, space, ep) > sigma) {
      P = Q;
      e_p = e_q;
      ++cert.outer_iterations;
      continue;
    }
    const double delta = reciprocal_at(growth, Q.size());
    auto r = refine_step(g, Q, sr, delta, ep, options.search, options.tol);
    if (!r) break;
    cert.steps.push_back({cert.outer_iterations, Q.size(), r->partition.size(), 0, 0, delta,
                          r->witness.value, r->increment});
    Q = std::move(r->partition);
    if (++cert.refinement_steps > options.max_steps) {
      fail(ErrorCode::iteration_cap, "refinement step cap exceeded");
    }
  }

  d.P = std::move(P);
  d.Q = std::move(Q);
  fill_parts(d, f, space);

  const RandomVar g_ep = cond_expectation(g, d.P, space);
  const RandomVar g_eq = cond_expectation(g, d.Q, space);
  cert.err_lp = lp_norm(g_eq - g_ep, space, ep);
  UniformCertificate u;
  u.index = d.P.size();
  u.bound = reciprocal_at(growth, d.P.size());
  u.exact = cert.exact;
  u.measured = uniform_norm_for_certificate(g - g_eq, sr, options, u.exact);
  cert.exact = cert.exact && u.exact;
  cert.unf.push_back(u);
  cert.passed = cert.err_lp <= sigma + options.tol && u.measured <= u.bound + options.tol &&
                parts_sum_back(f, d.f_str, d.f_err, d.f_unf);
  return d;
}

MultiDecomposition decompose_multi(const std::vector<RandomVar>& family,
                                   const std::vector<SemiringPtr>& semirings, double p, double sigma,
                                   const GrowthFunction& growth, const DecomposeOptions& options) {
  const double ep = effective_exponent(p);
  require(sigma > 0.0 && sigma <= 1.0, ErrorCode::invalid_argument, "sigma must lie in (0, 1]");
  check_search(options);
  require(!family.empty(), ErrorCode::invalid_argument, "need at least one function");
  require(!semirings.empty(), ErrorCode::invalid_argument, "need at least one semiring");
  for (const auto& sr : semirings) require(sr != nullptr, ErrorCode::invalid_argument, "null semiring");
  const auto& space = semirings.front()->space();
  const std::size_t k = semirings.front()->k();
  for (const auto& sr : semirings) {
    require(sr->space() == space, ErrorCode::dimension_mismatch, "semirings live on different spaces");
    require(sr->k() == k, ErrorCode::invalid_argument, "all semirings in the sequence must share k");
  }
  {
    std::mt19937_64 rng(options.search.seed);
    for (std::size_t i = 0; i + 1 < semirings.size(); ++i) {
      for (int trial = 0; trial < 16; ++trial) {
        const Subset s = semirings[i]->random_member(rng);
        require(semirings[i + 1]->contains(s), ErrorCode::invalid_argument,
                "semiring sequence is not increasing");
      }
    }
  }
  std::vector<RandomVar> gs;
  std::vector<double> scales;
  for (const auto& f : family) {
    require(f.size() == space.size(), ErrorCode::dimension_mismatch, "function does not live on the space");
    auto [g, scale] = normalize(f, space, ep, options);
    gs.push_back(std::move(g));
    scales.push_back(scale);
  }
  const std::size_t ell = family.size();
  const BigRational sigma_q = rational_from_double(sigma);
  const BigRational p_q = rational_from_double(ep);

  // List index of the stage semiring S_{m_i}, m_i = F^(i)(0).
  auto stage_index = [&](const BigInt& i) -> std::size_t {
    const auto m = iterate_from_zero(growth, i);
    if (m.overflowed() || *m.value >= semirings.size()) return semirings.size() - 1;
    return m.value->convert_to<std::size_t>();
  };
  // 1/H(n) with H(n) = F^(n+2)(0); zero once H leaves the digit cap.
  auto threshold = [&](const BigInt& n) -> double {
    const auto h = iterate_from_zero(growth, n + 2);
    if (h.overflowed()) return 0.0;
    return to_double(BigRational(1) / BigRational(*h.value));
  };

  MultiDecomposition out;
  Certificates base_cert;
  base_cert.effective_p = ep;
  base_cert.exact = options.search.mode == SearchMode::exact;

  Partition P = Partition::trivial(space.size());
  BigInt nj = 0;
  std::size_t j = 0;
  Partition Q = P;
  BigInt J = nj;
  bool restart = true;
  std::vector<RandomVar> e_p(ell);
  double delta = 0.0;
  while (true) {
    if (restart) {
      Q = P;
      J = nj;
      for (std::size_t f = 0; f < ell; ++f) e_p[f] = cond_expectation(gs[f], P, space);
      delta = threshold(nj);
      restart = false;
    }
    std::vector<RandomVar> e_q(ell);
    bool jump = false;
    for (std::size_t f = 0; f < ell; ++f) {
      e_q[f] = cond_expectation(gs[f], Q, space);
      if (lp_norm(e_q[f] - e_p[f], space, ep) > sigma) jump = true;
    }
    if (jump) {
      const auto h = iterate_from_zero(growth, nj + 2);
      if (h.overflowed()) fail(ErrorCode::infeasible, "stage counter exceeds the digit cap");
      const BigRational hq(*h.value);
      nj += ceil(sigma_q * sigma_q * BigRational(ell) * hq * hq / (p_q - 1));
      P = Q;
      ++j;
      ++base_cert.outer_iterations;
      restart = true;
      continue;
    }
    const std::size_t stage = stage_index(J + 1);
    const Semiring& sr = *semirings[stage];
    std::optional<Witness> best;
    std::size_t best_f = 0;
    for (std::size_t f = 0; f < ell; ++f) {
      auto w = find_violating_set(gs[f] - e_q[f], sr, delta, options.search, options.tol);
      if (w && (!best || w->abs_value > best->abs_value)) {
        best = w;
        best_f = f;
      }
    }
    if (!best) break;
    Partition r = split_by(Q, best->set, sr);
    const double increment = lp_norm(cond_expectation(gs[best_f], r, space) - e_q[best_f], space, ep);
    base_cert.steps.push_back({base_cert.outer_iterations, Q.size(), r.size(), stage, best_f, delta,
                               best->value, increment});
    Q = std::move(r);
    J += 1;
    if (++base_cert.refinement_steps > options.max_steps) {
      fail(ErrorCode::iteration_cap, "refinement step cap exceeded");
    }
  }

  out.P = P;
  out.Q = Q;
  out.energy_stage = j;
  out.n_j = nj;
  out.J = J;
  out.p_semiring = stage_index(nj);
  out.q_semiring = stage_index(J);
  const auto n_value = iterate_from_zero(growth, nj);
  if (!n_value.overflowed()) out.N = *n_value.value;

  // Semiring indices to certify: every listed index up to F(N), then the
  // strictest point F(N) of the constant tail.
  const auto fn = iterate_from_zero(growth, nj + 1);
  const std::uint64_t cap_index = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t fn_index =
      fn.overflowed() || *fn.value > BigInt(cap_index) ? cap_index : fn.value->convert_to<std::uint64_t>();
  std::vector<std::pair<std::uint64_t, double>> checks;
  for (std::uint64_t i = 0; i < semirings.size() && i <= fn_index; ++i) {
    checks.emplace_back(i, reciprocal_at(growth, i));
  }
  if (fn_index >= semirings.size()) checks.emplace_back(fn_index, threshold(nj));

  out.passed = true;
  for (std::size_t f = 0; f < ell; ++f) {
    Decomposition d;
    d.P = P;
    d.Q = Q;
    d.p = p;
    d.sigma = sigma;
    d.growth = growth;
    d.certificates = base_cert;
    auto& cert = d.certificates;
    cert.scale = scales[f];
    fill_parts(d, family[f], space);
    const RandomVar g_ep = cond_expectation(gs[f], P, space);
    const RandomVar g_eq = cond_expectation(gs[f], Q, space);
    cert.err_lp = lp_norm(g_eq - g_ep, space, ep);
    bool ok = cert.err_lp <= sigma + options.tol && parts_sum_back(family[f], d.f_str, d.f_err, d.f_unf);
    for (auto [index, bound] : checks) {
      const std::size_t list_index = std::min<std::uint64_t>(index, semirings.size() - 1);
      UniformCertificate u;
      u.index = index;
      u.bound = bound;
      u.exact = base_cert.exact;
      u.measured = uniform_norm_for_certificate(gs[f] - g_eq, *semirings[list_index], options, u.exact);
      cert.exact = cert.exact && u.exact;
      ok = ok && u.measured <= u.bound + options.tol;
      cert.unf.push_back(u);
    }
    cert.passed = ok;
    out.passed = out.passed && ok;
    out.parts.push_back(std::move(d));
  }
  return out;
}

}  // namespace regdec
