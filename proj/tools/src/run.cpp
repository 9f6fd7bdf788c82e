#include "regdec/cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "regdec/applications.hpp"
#include "regdec/bounds.hpp"
#include "regdec/cli/ingest.hpp"
#include "regdec/decompose.hpp"
#include "regdec/error.hpp"
#include "regdec/uniformity.hpp"

namespace regdec::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) { fail(ErrorCode::invalid_argument, message); }

BigRational exact_param(const std::string& name, const std::string& text) {
  if (text.empty()) config_error("missing --" + name);
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    config_error("--" + name + ": " + e.what());
  }
}

double real_param(const std::string& name, const std::string& text) { return to_double(exact_param(name, text)); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

// Partitions: cells as sorted index lists, ordered by smallest index.
json to_json(const Partition& p) {
  std::vector<std::vector<std::size_t>> cells;
  for (const auto& c : p.cells()) cells.push_back(c.indices());
  std::sort(cells.begin(), cells.end());
  return cells;
}

Partition partition_from(const json& j, std::size_t universe) {
  require(j.is_array(), ErrorCode::io, "report partition is not a list of cells");
  std::vector<Subset> cells;
  for (const auto& cell : j) {
    Subset s(universe);
    for (const auto& x : cell) {
      const auto i = x.get<std::size_t>();
      require(i < universe, ErrorCode::io, "report partition mentions a point outside the input");
      s.insert(i);
    }
    cells.push_back(std::move(s));
  }
  return Partition(std::move(cells));
}

json to_json(const RandomVar& f) { return std::vector<double>(f.values().begin(), f.values().end()); }

json to_json(const BigInt& n) { return n.str(); }

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? to_json(*v) : json(nullptr);
}

json to_json(const Witness& w) { return {{"set", w.set.indices()}, {"value", w.value}}; }

json to_json(const BoundReport& b) {
  json h = json::array();
  for (const auto& x : b.h_table) h.push_back(x.str());
  return {{"L", b.L.str()},
          {"h", h},
          {"R", optional_json(b.R)},
          {"reg", optional_json(b.reg)},
          {"inner_reg", optional_json(b.inner_reg)},
          {"reg_prime", optional_json(b.reg_prime)},
          {"overflowed", b.overflowed},
          {"log10_estimate", b.log10_estimate}};
}

json to_json(const StepRecord& s) {
  return {{"outer", s.outer},       {"cells_before", s.cells_before},   {"cells_after", s.cells_after},
          {"stage", s.stage},       {"function", s.function},           {"delta", s.delta},
          {"witness", s.witness_value}, {"increment", s.increment}};
}

json to_json(const Certificates& c) {
  json unf = json::array();
  for (const auto& u : c.unf) {
    unf.push_back({{"index", u.index}, {"bound", u.bound}, {"measured", u.measured}, {"exact", u.exact}});
  }
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(to_json(s));
  return {{"err_lp", c.err_lp},
          {"unf", unf},
          {"outer_iterations", c.outer_iterations},
          {"refinement_steps", c.refinement_steps},
          {"steps", steps},
          {"scale", c.scale},
          {"effective_p", c.effective_p},
          {"exact", c.exact},
          {"passed", c.passed}};
}

json parts_json(const Decomposition& d) {
  return {{"f_str", to_json(d.f_str)}, {"f_err", to_json(d.f_err)}, {"f_unf", to_json(d.f_unf)}};
}

Caps caps_of(const RunConfig& c) { return parse_caps(c.caps); }

DecomposeOptions decompose_options(const RunConfig& c) {
  const Caps caps = caps_of(c);
  DecomposeOptions o;
  o.tol = c.tol;
  o.strict = c.strict;
  o.max_steps = caps.steps;
  o.search.log2_cap = caps.log2;
  o.search.seed = c.seed;
  if (c.mode == "exact") {
    o.search.mode = SearchMode::exact;
  } else if (c.mode == "best-effort" || c.mode == "heuristic") {
    o.search.mode = SearchMode::heuristic;
    o.best_effort = true;
  } else {
    config_error("--mode must be exact or best-effort");
  }
  return o;
}

ApplicationOptions application_options(const RunConfig& c) {
  ApplicationOptions o;
  o.decompose = decompose_options(c);
  o.digit_cap = caps_of(c).digits;
  return o;
}

GrowthFunction growth_of(const RunConfig& c) {
  try {
    return parse_growth(c.growth);
  } catch (const Error& e) {
    config_error(std::string("--growth: ") + e.what());
  }
}

ErrorProfile profile_of(const RunConfig& c) {
  if (c.h == "recip") return ErrorProfile::reciprocal();
  if (c.h.starts_with("const:")) return ErrorProfile::constant(real_param("profile", c.h.substr(6)));
  config_error("--profile must be recip or const:c");
}

const std::string& single_input(const RunConfig& c) {
  if (c.inputs.size() != 1) config_error(c.operation + " needs exactly one --input");
  return c.inputs.front();
}

MatrixInput load_matrix(const RunConfig& c, const std::string& path) {
  return ingest_matrix(path, parse_format(c.format));
}

std::vector<SemiringPtr> semiring_list(const RunConfig& c, const GroundSpace& base) {
  std::vector<SemiringPtr> out;
  for (const auto& spec : split(c.semiring, ',')) out.push_back(matrix_semiring(spec, base));
  if (out.empty()) config_error("--semiring is empty");
  return out;
}

json hypercube_cells(const Partition& p, const HypercubeSpec& spec) {
  json cells = json::array();
  for (const auto& cell : to_json(p)) {
    json words = json::array();
    for (const auto& x : cell) words.push_back(spec.word_string(x.get<std::size_t>()));
    cells.push_back(words);
  }
  return cells;
}

// ---- run ------------------------------------------------------------------

Outcome run_decompose(const RunConfig& c) {
  const auto in = load_matrix(c, single_input(c));
  const auto sr = matrix_semiring(c.semiring, in.base);
  const auto d = decompose(in.values, *sr, real_param("p", c.p), real_param("sigma", c.sigma), growth_of(c),
                           decompose_options(c));
  json outputs = {{"P", to_json(d.P)}, {"Q", to_json(d.Q)}, {"parts", parts_json(d)}, {"k", sr->k()}};
  return {{{"outputs", outputs}, {"certificates", to_json(d.certificates)}}, d.certificates.passed};
}

Outcome run_multi(const RunConfig& c) {
  if (c.inputs.empty()) config_error("multi needs at least one --input");
  std::vector<RandomVar> family;
  std::optional<GroundSpace> base;
  for (const auto& path : c.inputs) {
    auto in = load_matrix(c, path);
    if (base) {
      require(in.base == *base, ErrorCode::dimension_mismatch, "inputs live on different spaces");
    } else {
      base = in.base;
    }
    family.push_back(std::move(in.values));
  }
  const auto semirings = semiring_list(c, *base);
  const auto m = decompose_multi(family, semirings, real_param("p", c.p), real_param("sigma", c.sigma),
                                 growth_of(c), decompose_options(c));
  json parts = json::array();
  json certs = json::array();
  for (const auto& d : m.parts) {
    parts.push_back(parts_json(d));
    certs.push_back(to_json(d.certificates));
  }
  json outputs = {{"P", to_json(m.P)},
                  {"Q", to_json(m.Q)},
                  {"parts", parts},
                  {"N", optional_json(m.N)},
                  {"energy_stage", m.energy_stage},
                  {"n_j", to_json(m.n_j)},
                  {"J", to_json(m.J)},
                  {"p_semiring", m.p_semiring},
                  {"q_semiring", m.q_semiring}};
  return {{{"outputs", outputs}, {"certificates", {{"functions", certs}, {"passed", m.passed}}}}, m.passed};
}

json uniformity_json(const UniformityReport& r) {
  json cells = json::array();
  // Cells in the order of to_json(partition).
  std::map<std::vector<std::size_t>, std::size_t> order;
  for (std::size_t i = 0; i < r.partition.size(); ++i) order[r.partition.cell(i).indices()] = i;
  for (const auto& [indices, i] : order) {
    const auto& cell = r.cells[i];
    cells.push_back({{"uniform", cell.uniform}, {"worst", cell.worst}, {"allowed", cell.allowed}});
  }
  return {{"cells", cells},
          {"eta", r.eta},
          {"uniform_mass", r.uniform_mass},
          {"nonuniform_mass", r.nonuniform_mass},
          {"fast_route", r.fast_route},
          {"bound", to_json(r.bound)},
          {"within_bound", r.within_bound},
          {"decomposition", to_json(r.decomposition.certificates)},
          {"passed", r.passed}};
}

Outcome run_uniform(const RunConfig& c) {
  const auto in = load_matrix(c, single_input(c));
  const auto sr = matrix_semiring(c.semiring, in.base);
  const auto r = uniform_partition(in.values, *sr, real_param("p", c.p), real_param("eta", c.eta),
                                   application_options(c));
  json outputs = {{"P", to_json(r.partition)}, {"Q", to_json(r.decomposition.Q)}, {"k", sr->k()}};
  return {{{"outputs", outputs}, {"certificates", uniformity_json(r)}}, r.passed};
}

Outcome run_hypercube(const RunConfig& c) {
  const auto in = ingest_hypercube(single_input(c));
  const auto r = hypercube_uniform(in.subset, in.spec, real_param("eps", c.eps), application_options(c),
                                   c.accept_cost);
  json densities = json::array();
  std::map<std::vector<std::size_t>, std::size_t> order;
  for (std::size_t i = 0; i < r.uniformity.partition.size(); ++i) {
    order[r.uniformity.partition.cell(i).indices()] = i;
  }
  for (const auto& [indices, i] : order) densities.push_back(r.densities[i]);
  json outputs = {{"P", to_json(r.uniformity.partition)},
                  {"P_words", hypercube_cells(r.uniformity.partition, in.spec)},
                  {"densities", densities},
                  {"points", in.spec.point_count()},
                  {"subset_size", in.subset.count()},
                  {"warnings", in.warnings}};
  json certs = uniformity_json(r.uniformity);
  certs["admissible_pairs"] = r.admissible_pairs;
  certs["failed_pairs"] = r.failed_pairs;
  certs["worst_gap"] = r.worst_gap;
  certs["passed"] = r.passed;
  return {{{"outputs", outputs}, {"certificates", certs}}, r.passed};
}

Outcome run_graphon_strong(const RunConfig& c) {
  const auto in = load_matrix(c, single_input(c));
  const Graphon w(in.base, in.values);
  const auto r = graphon_strong_regularity(w, real_param("p", c.p), real_param("eps", c.eps), profile_of(c),
                                           application_options(c));
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back(to_json(s));
  json outputs = {{"R", to_json(r.R)}, {"Z", to_json(r.Z)}, {"U", to_json(r.U)}, {"W_str", to_json(r.w_str)}};
  json certs = {{"err_lp", r.err_lp},
                {"unf_symmetric", r.unf_symmetric},
                {"unf_cut", r.unf_cut},
                {"step_gap", r.step_gap},
                {"h_bound", r.h_bound},
                {"outer_iterations", r.outer_iterations},
                {"refinement_steps", r.refinement_steps},
                {"steps", steps},
                {"bound", r.bound ? to_json(*r.bound) : json(nullptr)},
                {"within_bound", r.within_bound},
                {"passed", r.passed}};
  return {{{"outputs", outputs}, {"certificates", certs}}, r.passed};
}

Outcome run_graphon_weak(const RunConfig& c) {
  const auto in = load_matrix(c, single_input(c));
  const Graphon w(in.base, in.values);
  const auto r = graphon_weak_regularity(w, real_param("p", c.p), real_param("eps", c.eps), c.tol);
  json outputs = {{"R", to_json(r.R)}, {"sizes", r.sizes}};
  json certs = {{"steps", r.steps}, {"step_limit", r.step_limit}, {"final_cut", r.final_cut}, {"passed", r.passed}};
  return {{{"outputs", outputs}, {"certificates", certs}}, r.passed};
}

Outcome run_norm(const RunConfig& c) {
  const auto in = load_matrix(c, single_input(c));
  const auto sr = matrix_semiring(c.semiring, in.base);
  const auto search = decompose_options(c).search;
  const auto r = uniformity_norm(in.values, *sr, search);
  json outputs = {{"norm", r.value}, {"witness", to_json(r.witness)}, {"exact", r.exact}, {"k", sr->k()}};
  return {{{"outputs", outputs}, {"certificates", {{"exact", r.exact}, {"passed", true}}}}, true};
}

Outcome run_bounds(const RunConfig& c) {
  const auto sigma = exact_param("sigma", c.sigma);
  const auto p = exact_param("p", c.p);
  const auto growth = growth_of(c);
  const std::size_t digits = caps_of(c).digits;
  const auto reg = regularity_bound(c.k, c.ell, sigma, p, growth, digits);
  const auto prime = partition_count_bound(c.k, sigma, p, growth, digits);
  json outputs = {{"regularity", to_json(reg)}, {"partition_count", to_json(prime)}, {"growth", growth.describe()}};
  return {{{"outputs", outputs}, {"certificates", {{"passed", true}}}}, true};
}

// ---- verify ---------------------------------------------------------------

class Checks {
 public:
  explicit Checks(double tol) : tol_(tol) {}

  void close(const std::string& name, double reported, double recomputed) {
    add(name, std::abs(reported - recomputed) <= tol_, reported, recomputed);
  }
  void at_most(const std::string& name, double value, double bound) { add(name, value <= bound + tol_, value, bound); }
  void holds(const std::string& name, bool ok) { add(name, ok, ok, true); }

  json result() const { return list_; }
  bool passed() const { return passed_; }

 private:
  void add(const std::string& name, bool ok, const json& a, const json& b) {
    list_.push_back({{"check", name}, {"ok", ok}, {"reported", a}, {"recomputed", b}});
    passed_ = passed_ && ok;
  }

  double tol_;
  json list_ = json::array();
  bool passed_ = true;
};

SearchOptions exact_search(const RunConfig& c) {
  SearchOptions s;
  s.log2_cap = caps_of(c).log2;
  return s;
}

void members_of(Checks& checks, const std::string& name, const Partition& p, const Semiring& sr) {
  bool ok = true;
  for (const auto& cell : p.cells()) ok = ok && sr.contains(cell);
  checks.holds(name + " cells are members", ok);
}

void values_match(Checks& checks, const std::string& name, const json& reported, const RandomVar& recomputed) {
  const auto v = reported.get<std::vector<double>>();
  require(v.size() == recomputed.size(), ErrorCode::io, "report " + name + " has the wrong length");
  checks.close(name, 0.0, max_abs_difference(RandomVar(v), recomputed));
}

// Checks one function's parts and certificates against partitions P and Q.
void check_decomposition(Checks& checks, const std::string& tag, const RandomVar& f, const Partition& P,
                         const Partition& Q, const std::vector<SemiringPtr>& semirings, const json& parts,
                         const json& certs, double sigma, const RunConfig& c) {
  const auto& space = semirings.front()->space();
  const double scale = certs.at("scale").get<double>();
  const double p = certs.at("effective_p").get<double>();
  const RandomVar g = f * scale;
  const RandomVar ep = cond_expectation(g, P, space);
  const RandomVar eq = cond_expectation(g, Q, space);
  const double err = lp_norm(eq - ep, space, p);
  checks.close(tag + "err_lp", certs.at("err_lp").get<double>(), err);
  checks.at_most(tag + "err_lp <= sigma", err, sigma);
  const double back = 1.0 / scale;
  values_match(checks, tag + "f_str", parts.at("f_str"), cond_expectation(f, P, space));
  values_match(checks, tag + "f_err", parts.at("f_err"), (eq - ep) * back);
  values_match(checks, tag + "f_unf", parts.at("f_unf"), (g - eq) * back);
  for (const auto& u : certs.at("unf")) {
    const auto index = u.at("index").get<std::uint64_t>();
    const auto& sr = *semirings[std::min<std::uint64_t>(index, semirings.size() - 1)];
    const double measured = uniformity_norm(g - eq, sr, exact_search(c)).value;
    const std::string name = tag + "unf[" + std::to_string(index) + "]";
    checks.close(name, u.at("measured").get<double>(), measured);
    checks.at_most(name + " <= bound", measured, u.at("bound").get<double>());
  }
}

Outcome verify_decompose(const RunConfig& c, const json& report, Checks& checks) {
  const auto in = load_matrix(c, single_input(c));
  const auto sr = matrix_semiring(c.semiring, in.base);
  const auto& out = report.at("outputs");
  const auto& certs = report.at("certificates");
  const std::size_t n = in.values.size();
  const Partition P = partition_from(out.at("P"), n);
  const Partition Q = partition_from(out.at("Q"), n);
  checks.holds("Q refines P", Q.refines(P));
  members_of(checks, "P", P, *sr);
  members_of(checks, "Q", Q, *sr);
  check_decomposition(checks, "", in.values, P, Q, {sr}, out.at("parts"), certs, real_param("sigma", c.sigma), c);
  const double bound = 1.0 / growth_of(c).value(P.size());
  checks.at_most("unf <= 1/F(|P|)", certs.at("unf").at(0).at("measured").get<double>(), bound);
  return {};
}

Outcome verify_multi(const RunConfig& c, const json& report, Checks& checks) {
  std::vector<MatrixInput> inputs;
  for (const auto& path : c.inputs) inputs.push_back(load_matrix(c, path));
  require(!inputs.empty(), ErrorCode::invalid_argument, "multi needs at least one --input");
  const auto semirings = semiring_list(c, inputs.front().base);
  const auto& out = report.at("outputs");
  const auto& certs = report.at("certificates").at("functions");
  const std::size_t n = inputs.front().values.size();
  const Partition P = partition_from(out.at("P"), n);
  const Partition Q = partition_from(out.at("Q"), n);
  checks.holds("Q refines P", Q.refines(P));
  const auto pi = std::min(out.at("p_semiring").get<std::size_t>(), semirings.size() - 1);
  const auto qi = std::min(out.at("q_semiring").get<std::size_t>(), semirings.size() - 1);
  members_of(checks, "P", P, *semirings[pi]);
  members_of(checks, "Q", Q, *semirings[qi]);
  require(certs.size() == inputs.size(), ErrorCode::io, "report lists a different number of functions");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check_decomposition(checks, "f" + std::to_string(i) + ".", inputs[i].values, P, Q, semirings,
                        out.at("parts").at(i), certs.at(i), real_param("sigma", c.sigma), c);
  }
  return {};
}

// Rechecks the uniform cells of P and returns the non-uniform mass.
double check_cells(Checks& checks, const RandomVar& f, const Semiring& sr, const Partition& P, double eta,
                   const json& reported, const RunConfig& c) {
  require(reported.size() == P.size(), ErrorCode::io, "report lists a different number of cells");
  double nonuniform = 0.0;
  std::size_t i = 0;
  std::vector<Subset> ordered(P.cells().begin(), P.cells().end());
  std::sort(ordered.begin(), ordered.end(), [](const Subset& a, const Subset& b) { return a.indices() < b.indices(); });
  for (const auto& cell : ordered) {
    const auto check = is_uniform_cell(f, sr, cell, eta, exact_search(c), c.tol);
    const std::string name = "cell " + std::to_string(i);
    checks.holds(name + " uniformity flag", check.uniform == reported.at(i).at("uniform").get<bool>());
    checks.close(name + " worst", reported.at(i).at("worst").get<double>(), check.worst);
    if (!check.uniform) nonuniform += sr.space().measure(cell);
    ++i;
  }
  return nonuniform;
}

Outcome verify_uniform(const RunConfig& c, const json& report, Checks& checks) {
  const auto in = load_matrix(c, single_input(c));
  const auto sr = matrix_semiring(c.semiring, in.base);
  const Partition P = partition_from(report.at("outputs").at("P"), in.values.size());
  members_of(checks, "P", P, *sr);
  const double eta = real_param("eta", c.eta);
  const auto& certs = report.at("certificates");
  const double nonuniform = check_cells(checks, in.values, *sr, P, eta, certs.at("cells"), c);
  checks.close("nonuniform_mass", certs.at("nonuniform_mass").get<double>(), nonuniform);
  checks.at_most("nonuniform_mass <= eta", nonuniform, eta);
  return {};
}

Outcome verify_hypercube(const RunConfig& c, const json& report, Checks& checks) {
  const auto in = ingest_hypercube(single_input(c));
  const auto sr = make_hypercube(in.spec);
  const Partition P = partition_from(report.at("outputs").at("P"), in.spec.point_count());
  members_of(checks, "P", P, *sr);
  const double eps = real_param("eps", c.eps);
  const RandomVar f = RandomVar::indicator(in.subset);
  const auto& certs = report.at("certificates");
  check_cells(checks, f, *sr, P, eps * eps, certs.at("cells"), c);
  const auto members = collect_members(*sr, c.accept_cost ? std::uint64_t{1} << 40 : std::uint64_t{1} << 26);
  require(!members.truncated, ErrorCode::infeasible, "too many members for the density check");
  std::uint64_t failed = 0;
  double worst = 0.0;
  std::size_t i = 0;
  std::vector<Subset> ordered(P.cells().begin(), P.cells().end());
  std::sort(ordered.begin(), ordered.end(), [](const Subset& a, const Subset& b) { return a.indices() < b.indices(); });
  for (const auto& s : ordered) {
    if (certs.at("cells").at(i++).at("uniform").get<bool>()) {
      const double ds = static_cast<double>((s & in.subset).count()) / static_cast<double>(s.count());
      for (const auto& t : members.members) {
        if (t.is_empty() || !t.is_subset_of(s)) continue;
        const double nt = static_cast<double>(t.count());
        if (nt < eps * static_cast<double>(s.count()) - 1e-12) continue;
        const double gap = std::abs(static_cast<double>((t & in.subset).count()) / nt - ds);
        worst = std::max(worst, gap);
        if (gap > eps + c.tol) ++failed;
      }
    }
  }
  checks.close("worst_gap", certs.at("worst_gap").get<double>(), worst);
  checks.holds("no density gap above eps", failed == 0);
  return {};
}

Outcome verify_graphon_strong(const RunConfig& c, const json& report, Checks& checks) {
  const auto in = load_matrix(c, single_input(c));
  const Graphon w(in.base, in.values);
  const auto& out = report.at("outputs");
  const auto& certs = report.at("certificates");
  const Partition R = partition_from(out.at("R"), w.n());
  const Partition Z = partition_from(out.at("Z"), w.n());
  checks.holds("Z refines R", Z.refines(R));
  const double p = std::min(real_param("p", c.p), 2.0);
  const auto& square = w.square();
  const RandomVar w_str = cond_expectation(w.values(), square_partition(R), square);
  const RandomVar e_z = cond_expectation(w.values(), square_partition(Z), square);
  const RandomVar w_unf = w.values() - e_z;
  const RandomVar u = w_str + w_unf;
  const double err = lp_norm(e_z - w_str, square, p);
  checks.close("err_lp", certs.at("err_lp").get<double>(), err);
  checks.at_most("err_lp <= eps", err, real_param("eps", c.eps));
  SearchOptions exact = exact_search(c);
  exact.log2_cap = std::max(exact.log2_cap, 30.0);
  const double unf = uniformity_norm(w_unf, *make_symmetric_rectangles(w.base()), exact).value;
  checks.close("unf_symmetric", certs.at("unf_symmetric").get<double>(), unf);
  const auto profile = profile_of(c);
  const double r2 = static_cast<double>(R.size()) * static_cast<double>(R.size());
  checks.at_most("unf_symmetric <= 1/F(|R|^2)", unf, 1.0 / profile.growth_at(static_cast<std::uint64_t>(r2)));
  const double gap = cut_norm_exact(u - cond_expectation(u, square_partition(R), square), w.base()).value;
  checks.close("step_gap", certs.at("step_gap").get<double>(), gap);
  checks.at_most("step_gap <= h(|R|)", gap, profile.h(R.size()));
  values_match(checks, "U", out.at("U"), u);
  return {};
}

Outcome verify_graphon_weak(const RunConfig& c, const json& report, Checks& checks) {
  const auto in = load_matrix(c, single_input(c));
  const Graphon w(in.base, in.values);
  const Partition R = partition_from(report.at("outputs").at("R"), w.n());
  const auto& certs = report.at("certificates");
  const RandomVar wr = cond_expectation(w.values(), square_partition(R), w.square());
  const double cut = cut_norm_exact(w.values() - wr, w.base()).value;
  checks.close("final_cut", certs.at("final_cut").get<double>(), cut);
  checks.at_most("final_cut <= eps", cut, real_param("eps", c.eps));
  const double p = std::min(real_param("p", c.p), 2.0);
  const double eps = real_param("eps", c.eps);
  const auto limit = static_cast<double>(certs.at("step_limit").get<std::uint64_t>());
  checks.holds("step limit is ceil(1/((p-1) eps^2))", limit >= 1.0 / ((p - 1.0) * eps * eps) - 1e-9 &&
                                                         limit < 1.0 / ((p - 1.0) * eps * eps) + 1.0);
  checks.at_most("steps <= limit", certs.at("steps").get<double>(), limit);
  return {};
}

Outcome verify_norm(const RunConfig& c, const json& report, Checks& checks) {
  const auto in = load_matrix(c, single_input(c));
  const auto sr = matrix_semiring(c.semiring, in.base);
  const auto& out = report.at("outputs");
  Subset s(in.values.size());
  for (const auto& x : out.at("witness").at("set")) s.insert(x.get<std::size_t>());
  checks.holds("witness is a member", sr->contains(s));
  const double value = integral_over(in.values, s, sr->space());
  checks.close("witness value", out.at("witness").at("value").get<double>(), value);
  checks.close("norm equals |witness value|", out.at("norm").get<double>(), std::abs(value));
  if (out.at("exact").get<bool>()) {
    checks.close("exact norm", out.at("norm").get<double>(), uniformity_norm(in.values, *sr, exact_search(c)).value);
  }
  return {};
}

Outcome verify_bounds(const RunConfig& c, const json& report, Checks& checks) {
  const auto again = run_bounds(c);
  checks.holds("regularity bound", again.report.at("outputs").at("regularity") ==
                                       report.at("outputs").at("regularity"));
  checks.holds("partition count bound", again.report.at("outputs").at("partition_count") ==
                                            report.at("outputs").at("partition_count"));
  return {};
}

using Runner = std::function<Outcome(const RunConfig&)>;
using Verifier = std::function<Outcome(const RunConfig&, const json&, Checks&)>;

const std::map<std::string, std::pair<Runner, Verifier>>& operations() {
  static const std::map<std::string, std::pair<Runner, Verifier>> table = {
      {"decompose", {run_decompose, verify_decompose}},
      {"multi", {run_multi, verify_multi}},
      {"uniform", {run_uniform, verify_uniform}},
      {"hypercube", {run_hypercube, verify_hypercube}},
      {"graphon-strong", {run_graphon_strong, verify_graphon_strong}},
      {"graphon-weak", {run_graphon_weak, verify_graphon_weak}},
      {"norm", {run_norm, verify_norm}},
      {"bounds", {run_bounds, verify_bounds}},
  };
  return table;
}

}  // namespace

Caps parse_caps(const std::string& text) {
  Caps caps;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) config_error("--caps entries look like key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "log2") {
        caps.log2 = std::stod(value, &used);
      } else if (key == "digits") {
        caps.digits = std::stoull(value, &used);
      } else if (key == "steps") {
        caps.steps = std::stoull(value, &used);
      } else {
        config_error("unknown cap '" + key + "' (expected log2, digits or steps)");
      }
      if (used != value.size()) config_error("bad value for cap '" + key + "'");
    } catch (const std::logic_error&) {
      config_error("bad value for cap '" + key + "'");
    }
  }
  return caps;
}

json RunConfig::echo() const {
  return {{"operation", operation}, {"inputs", inputs}, {"format", format}, {"semiring", semiring},
          {"p", p},                 {"sigma", sigma},   {"eta", eta},       {"eps", eps},
          {"growth", growth},       {"mode", mode},     {"tol", tol},       {"seed", seed},
          {"caps", caps},           {"k", k},           {"ell", ell},       {"h", h},
          {"strict", strict},       {"accept_cost", accept_cost}};
}

RunConfig RunConfig::from_echo(const json& j) {
  RunConfig c;
  try {
    c.operation = j.at("operation").get<std::string>();
    c.inputs = j.at("inputs").get<std::vector<std::string>>();
    c.format = j.at("format").get<std::string>();
    c.semiring = j.at("semiring").get<std::string>();
    c.p = j.at("p").get<std::string>();
    c.sigma = j.at("sigma").get<std::string>();
    c.eta = j.at("eta").get<std::string>();
    c.eps = j.at("eps").get<std::string>();
    c.growth = j.at("growth").get<std::string>();
    c.mode = j.at("mode").get<std::string>();
    c.tol = j.at("tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.caps = j.at("caps").get<std::string>();
    c.k = j.at("k").get<std::uint64_t>();
    c.ell = j.at("ell").get<std::uint64_t>();
    c.h = j.at("h").get<std::string>();
    c.strict = j.at("strict").get<bool>();
    c.accept_cost = j.at("accept_cost").get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorCode::io, std::string("report config is incomplete: ") + e.what());
  }
  return c;
}

SemiringPtr matrix_semiring(const std::string& spec, const GroundSpace& base) {
  const std::size_t n = base.size();
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "rectangles") {
    if (arg.empty()) return make_rectangles(base);
    std::size_t block = 0;
    try {
      block = std::stoull(arg);
    } catch (const std::logic_error&) {
      config_error("rectangles:b needs a positive block size");
    }
    if (block == 0) config_error("rectangles:b needs a positive block size");
    std::vector<std::size_t> labels(n);
    for (std::size_t x = 0; x < n; ++x) labels[x] = x / block;
    const auto side = make_algebra(base, Partition::from_labels(labels));
    return make_product({side, side});
  }
  if (!arg.empty()) config_error("semiring '" + head + "' takes no parameter");
  if (head == "symmetric-rectangles") return make_symmetric_rectangles(base);
  std::vector<std::size_t> order(n);
  for (std::size_t x = 0; x < n; ++x) order[x] = x;
  if (head == "interval-boxes") {
    const auto side = make_intervals(base, order);
    return make_product({side, side});
  }
  if (head == "intervals") {
    const GroundSpace factors[2] = {base, base};
    const GroundSpace square = product_space(factors);
    std::vector<std::size_t> flat(n * n);
    for (std::size_t x = 0; x < n * n; ++x) flat[x] = x;
    return make_intervals(square, flat);
  }
  config_error("unknown semiring '" + spec +
               "' (expected rectangles, rectangles:b, symmetric-rectangles, interval-boxes or intervals)");
}

Outcome run(const RunConfig& config) {
  const auto& table = operations();
  const auto it = table.find(config.operation);
  if (it == table.end()) config_error("unknown operation '" + config.operation + "'");
  const auto t0 = std::chrono::steady_clock::now();
  Outcome body = it->second.first(config);
  json report = {{"schema", kReportSchema},
                 {"tool", {{"name", "regdec"}, {"version", kToolVersion}}},
                 {"operation", config.operation},
                 {"config", config.echo()},
                 {"outputs", body.report.at("outputs")},
                 {"certificates", body.report.at("certificates")},
                 {"passed", body.passed}};
  if (!config.stable_output) {
    report["timings"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  }
  return {report, body.passed};
}

Outcome verify(const RunConfig& config) {
  if (config.report.empty()) config_error("verify needs --report");
  json report;
  try {
    report = json::parse(read_file(config.report));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::io, std::string("malformed report: ") + e.what());
  }
  require(report.value("schema", "") == kReportSchema, ErrorCode::io, "not a regdec report");
  RunConfig original = RunConfig::from_echo(report.at("config"));
  if (!config.inputs.empty()) original.inputs = config.inputs;
  const auto it = operations().find(original.operation);
  require(it != operations().end(), ErrorCode::io, "report names an unknown operation");
  Checks checks(config.tol);
  try {
    it->second.second(original, report, checks);
  } catch (const json::exception& e) {
    fail(ErrorCode::io, std::string("report is missing a field: ") + e.what());
  }
  checks.holds("report passed flag matches", report.at("passed").get<bool>() == checks.passed());
  json out = {{"schema", kVerifySchema},
              {"operation", original.operation},
              {"checks", checks.result()},
              {"passed", checks.passed()}};
  return {out, checks.passed()};
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::dimension_mismatch:
      return 2;
    case ErrorCode::infeasible:
      return 3;
    case ErrorCode::not_a_member:
    case ErrorCode::iteration_cap:
    case ErrorCode::certificate_failure:
      return 4;
    case ErrorCode::io:
      return 5;
  }
  return 4;
}

}  // namespace regdec::cli
