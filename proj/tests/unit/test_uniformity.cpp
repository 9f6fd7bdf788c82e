#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "regdec/error.hpp"
#include "regdec/uniformity.hpp"

using namespace regdec;

namespace {

RandomVar sign_matrix() { return RandomVar{1, -1, -1, 1}; }

Subset cell(std::size_t n, std::size_t x, std::size_t y) { return Subset::of(n * n, {x * n + y}); }

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("norm of zero and of the sign matrix") {
  auto rect = make_rectangles(GroundSpace::uniform(2));
  auto zero = uniformity_norm(RandomVar::constant(4, 0.0), *rect);
  CHECK(zero.value == 0.0);
  CHECK(zero.witness.set.is_empty());
  CHECK(zero.exact);
  auto r = uniformity_norm(sign_matrix(), *rect);
  CHECK(r.value == doctest::Approx(0.25));
  CHECK(r.witness.set == cell(2, 0, 0));
  CHECK(r.witness.value == doctest::Approx(0.25));
}

TEST_CASE("violating sets") {
  auto rect = make_rectangles(GroundSpace::uniform(2));
  CHECK_FALSE(find_violating_set(sign_matrix(), *rect, 0.25));
  CHECK_FALSE(find_violating_set(sign_matrix(), *rect, 0.3));
  auto w = find_violating_set(sign_matrix(), *rect, 0.2);
  REQUIRE(w);
  CHECK(w->set == cell(2, 0, 0));
  CHECK(w->value == doctest::Approx(0.25));
  CHECK_FALSE(find_violating_set(RandomVar::constant(4, 0.0), *rect, 1e-6));
  CHECK_THROWS_AS(find_violating_set(sign_matrix(), *rect, -1.0), Error);
}

TEST_CASE("function with zero mean on every cell has zero algebra norm") {
  auto space = GroundSpace::uniform(4);
  Partition q({Subset::of(4, {0, 1}), Subset::of(4, {2, 3})});
  RandomVar f{1, -1, 2, -2};
  auto sr = make_algebra(space, q);
  CHECK(uniformity_norm(f - cond_expectation(f, q, space), *sr).value == doctest::Approx(0.0));
}

TEST_CASE("cut norm examples") {
  auto base = GroundSpace::uniform(3);
  auto c = cut_norm_exact(RandomVar::constant(9, -0.7), base);
  CHECK(c.value == doctest::Approx(0.7));
  CHECK(c.witness.set == Subset::full(9));
  CHECK(cut_norm_exact(sign_matrix(), GroundSpace::uniform(2)).value == doctest::Approx(0.25));
  // W minus its average over the trivial partition is W itself here.
  auto flat = cond_expectation(sign_matrix(), Partition::trivial(4), GroundSpace::uniform(4));
  CHECK(cut_norm_exact(sign_matrix() - flat, GroundSpace::uniform(2)).value == doctest::Approx(0.25));
  CHECK_THROWS_AS(cut_norm_exact(RandomVar::constant(25, 1.0), GroundSpace::uniform(5), 4), InfeasibleError);
}

TEST_CASE("cut norm matches brute force and the rectangle semiring") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 4;
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += (x = 0.2 + std::uniform_real_distribution<double>(0, 1)(rng));
    for (auto& x : w) x /= total;
    GroundSpace base(w);
    auto f = random_values(n * n, rng);
    const double brute = oracle::cut_norm(f, w);
    auto fast = cut_norm_exact(RandomVar(f), base);
    CHECK(fast.value == doctest::Approx(brute).epsilon(1e-12));
    auto rect = make_rectangles(base);
    auto via = uniformity_norm(RandomVar(f), *rect);
    CHECK(via.value == doctest::Approx(brute).epsilon(1e-12));
    CHECK(fast.witness.set == via.witness.set);
    auto enumerated = uniformity_norm_by_enumeration(RandomVar(f), *rect);
    CHECK(enumerated.value == doctest::Approx(brute).epsilon(1e-12));
    auto sym = make_symmetric_rectangles(base);
    const double sym_brute = oracle::symmetric_cut_norm(f, w);
    CHECK(uniformity_norm(RandomVar(f), *sym).value == doctest::Approx(sym_brute).epsilon(1e-12));
    CHECK(sym_brute <= brute + 1e-12);
    CHECK(brute <= 4 * sym_brute + 1e-12);
  }
}

TEST_CASE("interval norm matches brute force") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 12;
    auto f = random_values(n, rng);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto sr = make_intervals(GroundSpace::uniform(n), order);
    CHECK(uniformity_norm(RandomVar(f), *sr).value ==
          doctest::Approx(oracle::interval_norm(f, oracle::uniform_weights(n))).epsilon(1e-12));
  }
}

TEST_CASE("seminorm laws and comparisons") {
  std::mt19937_64 rng(17);
  auto base = GroundSpace::uniform(4);
  auto rect = make_rectangles(base);
  auto space = rect->space();
  for (int trial = 0; trial < 40; ++trial) {
    RandomVar f(random_values(16, rng)), g(random_values(16, rng));
    const double nf = uniformity_norm(f, *rect).value;
    const double ng = uniformity_norm(g, *rect).value;
    CHECK(uniformity_norm(-2.5 * f, *rect).value == doctest::Approx(2.5 * nf).epsilon(1e-12));
    CHECK(uniformity_norm(f + g, *rect).value <= nf + ng + 1e-12);
    CHECK(nf <= lp_norm(f, space, 1.0) + 1e-12);
    SearchOptions heuristic;
    heuristic.mode = SearchMode::heuristic;
    heuristic.seed = static_cast<std::uint64_t>(trial);
    auto h = uniformity_norm(f, *rect, heuristic);
    CHECK_FALSE(h.exact);
    CHECK(h.value <= nf + 1e-12);
    heuristic.seed_member = uniformity_norm(f, *rect).witness.set;
    CHECK(uniformity_norm(f, *rect, heuristic).value == doctest::Approx(nf).epsilon(1e-12));
  }
}

TEST_CASE("norm comparison report") {
  std::mt19937_64 rng(23);
  auto space = GroundSpace::uniform(6);
  std::vector<std::size_t> order{0, 1, 2, 3, 4, 5};
  auto intervals = make_intervals(space, order);
  auto zero = check_norm_comparisons(RandomVar::constant(6, 0.0), *intervals, Partition::trivial(6));
  CHECK(zero.all_pass());
  CHECK(zero.norm == 0.0);
  for (int trial = 0; trial < 30; ++trial) {
    RandomVar f(random_values(6, rng));
    auto r = check_norm_comparisons(f, *intervals, Partition::trivial(6));
    CHECK(r.below_l1);
    CHECK(r.contraction);
    CHECK_FALSE(r.algebra_sandwich.has_value());
    Partition atoms = Partition::from_labels(std::vector<std::size_t>{0, 0, 1, 2, 1, 2});
    auto algebra = make_algebra(space, atoms);
    Partition coarse = Partition::from_labels(std::vector<std::size_t>{0, 0, 1, 0, 1, 0});
    auto a = check_norm_comparisons(f, *algebra, coarse, &atoms);
    CHECK(a.all_pass());
    REQUIRE(a.cond_l1.has_value());
  }
  // B must consist of members.
  CHECK_THROWS_AS(check_norm_comparisons(RandomVar::constant(6, 1.0), *intervals,
                                         Partition::from_labels(std::vector<std::size_t>{0, 1, 0, 1, 0, 1})),
                  Error);
  // Cells that are members are not enough: the union of the outer two is not an interval.
  CHECK_THROWS_AS(check_norm_comparisons(RandomVar::constant(6, 1.0), *intervals,
                                         Partition::from_labels(std::vector<std::size_t>{0, 0, 1, 1, 2, 2})),
                  Error);
  auto halves = check_norm_comparisons(RandomVar(random_values(6, rng)), *intervals,
                                       Partition::from_labels(std::vector<std::size_t>{0, 0, 0, 1, 1, 1}));
  CHECK(halves.all_pass());
}

TEST_CASE("exact search past the cap is infeasible") {
  auto sym = make_symmetric_rectangles(GroundSpace::uniform(6));
  SearchOptions tight;
  tight.log2_cap = 3;
  CHECK_THROWS_AS(uniformity_norm(RandomVar::constant(36, 1.0), *sym, tight), InfeasibleError);
}
