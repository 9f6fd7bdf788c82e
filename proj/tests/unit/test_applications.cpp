#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "regdec/applications.hpp"
#include "regdec/error.hpp"

using namespace regdec;

namespace {

Graphon random_graphon(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x; y < n; ++y) v[x * n + y] = v[y * n + x] = u(rng);
  }
  return Graphon(GroundSpace::uniform(n), RandomVar(v));
}

Graphon random_simple_graph(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(density);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) v[x * n + y] = v[y * n + x] = edge(rng) ? 1.0 : 0.0;
  }
  return Graphon(GroundSpace::uniform(n), RandomVar(v));
}

}  // namespace

TEST_CASE("graphon construction") {
  CHECK_THROWS_AS(Graphon(GroundSpace::uniform(2), RandomVar{0, 1, 0.5, 0}), Error);
  Graphon g(GroundSpace::uniform(2), RandomVar{0, 1, 1, 0});
  CHECK(g.at(0, 1) == 1.0);
  CHECK(g.square().size() == 4);
}

TEST_CASE("uniform cells") {
  auto rect = make_rectangles(GroundSpace::uniform(2));
  const RandomVar sign{1, -1, -1, 1};
  auto whole = is_uniform_cell(sign, *rect, Subset::full(4), 0.2);
  CHECK_FALSE(whole.uniform);
  CHECK(whole.worst == doctest::Approx(0.25));
  REQUIRE(whole.violation);
  CHECK(whole.violation->abs_value == doctest::Approx(0.25));
  CHECK(is_uniform_cell(sign, *rect, Subset::full(4), 0.25).uniform);
  CHECK(is_uniform_cell(sign, *rect, Subset::of(4, {0}), 0.0).uniform);
  CHECK_THROWS_AS(is_uniform_cell(sign, *rect, Subset::of(4, {0, 3}), 0.5), Error);
}

TEST_CASE("uniform partitions on small instances") {
  std::mt19937_64 rng(9);
  auto rect = make_rectangles(GroundSpace::uniform(3));
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(9);
    for (auto& x : v) x = (rng() & 1U) ? 1.0 : 0.0;
    auto report = uniform_partition(RandomVar(v), *rect, 2.0, 0.9);
    CHECK(report.passed);
    CHECK(report.nonuniform_mass <= 0.9 + 1e-9);
    CHECK(report.uniform_mass + report.nonuniform_mass == doctest::Approx(1.0));
    CHECK(report.bound.overflowed);
    CHECK(report.within_bound);
  }
  CHECK_THROWS_AS(uniform_partition(RandomVar::constant(9, 2.0), *rect, 2.0, 0.5), Error);
  CHECK_THROWS_AS(uniform_partition(RandomVar::constant(9, 0.5), *rect, 2.0, 0.0), Error);
}

TEST_CASE("hypercube density regularity") {
  auto spec = HypercubeSpec::all_pairs({"a", "b"}, 2);
  Subset d = Subset::of(4, {0, 3});
  auto report = hypercube_uniform(d, spec, 0.9);
  CHECK(report.passed);
  CHECK(report.failed_pairs == 0);
  CHECK(report.densities.size() == report.uniformity.partition.size());

  auto big = HypercubeSpec::all_pairs({"a", "b", "c", "d"}, 2);
  CHECK_THROWS_AS(hypercube_uniform(Subset(16), big, 0.5), Error);
  HypercubeSpec partial = HypercubeSpec::all_pairs({"a", "b", "c"}, 2);
  partial.pairs.pop_back();
  CHECK_THROWS_AS(hypercube_uniform(Subset(9), partial, 0.5), Error);
}

TEST_CASE("step graphons are exact symmetric averages") {
  std::mt19937_64 rng(4);
  auto w = random_graphon(5, rng);
  auto r = Partition::from_labels(std::vector<std::size_t>{0, 1, 0, 2, 1});
  auto s = step_graphon(w, r);
  auto labels = std::vector<std::size_t>(25);
  for (std::size_t x = 0; x < 5; ++x) {
    for (std::size_t y = 0; y < 5; ++y) labels[x * 5 + y] = r.cell_of(x) * 3 + r.cell_of(y);
  }
  auto expected = oracle::cell_average(w.values().values(), oracle::uniform_weights(25), labels);
  for (std::size_t i = 0; i < 25; ++i) CHECK(s.values()[i] == doctest::Approx(expected[i]));
  for (std::size_t x = 0; x < 5; ++x) {
    for (std::size_t y = 0; y < 5; ++y) CHECK(s.at(x, y) == s.at(y, x));
  }
  CHECK(square_partition(r).size() == 9);
}

TEST_CASE("strong regularity certificates") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 4; ++trial) {
    auto w = random_simple_graph(6, 0.5, rng);
    for (double eps : {0.5, 0.3}) {
      auto s = graphon_strong_regularity(w, 2.0, eps, ErrorProfile::reciprocal());
      CHECK(s.passed);
      CHECK(s.err_lp <= eps + 1e-9);
      CHECK(s.step_gap <= s.h_bound + 1e-9);
      CHECK(s.unf_symmetric <= s.unf_cut + 1e-12);
      CHECK(s.unf_symmetric == doctest::Approx(oracle::symmetric_cut_norm(s.w_unf.values(), oracle::uniform_weights(6))));
      CHECK(s.Z.refines(s.R));
      CHECK(max_abs_difference(s.w_str + s.w_err + s.w_unf, w.values()) <= 1e-12);
    }
  }
  auto w = random_graphon(5, rng, 0.9);
  auto c = graphon_strong_regularity(w, 1.5, 0.4, ErrorProfile::constant(0.5));
  CHECK(c.passed);
  CHECK_THROWS_AS(graphon_strong_regularity(random_graphon(3, rng, 5.0), 2.0, 0.5, ErrorProfile::reciprocal()),
                  Error);
}

TEST_CASE("weak regularity") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    auto w = random_simple_graph(7, 0.4, rng);
    auto r = graphon_weak_regularity(w, 2.0, 0.1);
    CHECK(r.passed);
    CHECK(r.step_limit == 100);
    CHECK(r.final_cut <= 0.1 + 1e-9);
    auto wr = step_graphon(w, r.R);
    CHECK(oracle::cut_norm((w.values() - wr.values()).values(), oracle::uniform_weights(7)) ==
          doctest::Approx(r.final_cut));
    for (std::size_t i = 1; i < r.sizes.size(); ++i) CHECK(r.sizes[i] <= 4 * r.sizes[i - 1]);
  }
  Graphon flat(GroundSpace::uniform(3), RandomVar::constant(9, 0.5));
  auto f = graphon_weak_regularity(flat, 2.0, 0.2);
  CHECK(f.steps == 0);
  CHECK(f.R.size() == 1);
}
