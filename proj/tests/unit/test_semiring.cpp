#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "axioms.hpp"
#include "regdec/error.hpp"
#include "regdec/semiring.hpp"

using namespace regdec;

namespace {

std::vector<Subset> sorted_members(const Semiring& sr) {
  auto list = collect_members(sr, 1u << 24);
  REQUIRE_FALSE(list.truncated);
  std::sort(list.members.begin(), list.members.end());
  return list.members;
}

Subset interval(std::size_t n, std::size_t lo, std::size_t hi) {
  Subset s(n);
  for (std::size_t i = lo; i <= hi; ++i) s.insert(i);
  return s;
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

Subset grid(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> cells) {
  Subset s(n * n);
  for (auto [x, y] : cells) s.insert(x * n + y);
  return s;
}

std::vector<SemiringPtr> zoo() {
  auto space4 = GroundSpace::uniform(4);
  auto space6 = GroundSpace({0.1, 0.2, 0.05, 0.3, 0.15, 0.2});
  auto iv3 = make_intervals(GroundSpace::uniform(3), identity(3));
  auto iv4 = make_intervals(GroundSpace::uniform(4), {2, 0, 3, 1});
  return {
      make_algebra(space6, Partition::from_labels(std::vector<std::size_t>{0, 1, 0, 2, 1, 3})),
      make_algebra(space4, Partition::singletons(4)),
      make_intervals(space6, {5, 3, 1, 0, 2, 4}),
      make_product({iv3, iv4}),
      make_product({iv3, make_algebra(space4, Partition::singletons(4)), iv3}),
      make_rectangles(GroundSpace::uniform(4)),
      make_rectangles(space6),
      make_symmetric_rectangles(GroundSpace::uniform(4)),
      make_symmetric_rectangles(space6),
      make_cylinder_family({GroundSpace::uniform(2), GroundSpace::uniform(3), GroundSpace::uniform(2)},
                           {{0, 1}, {1, 2}, {0, 2}}),
      make_cylinder_family({GroundSpace::uniform(2), GroundSpace::uniform(3)}, {{0}, {1}}),
      make_hypercube(HypercubeSpec::all_pairs({"a", "b", "c"}, 2)),
      make_hypercube(HypercubeSpec::all_pairs({"a", "b", "c"}, 1)),
  };
}

}  // namespace

TEST_CASE("algebra semiring") {
  auto space = GroundSpace::uniform(4);
  auto trivial = make_algebra(space, Partition::trivial(4));
  CHECK(trivial->k() == 1);
  CHECK(sorted_members(*trivial) == std::vector<Subset>{Subset(4), Subset::full(4)});
  auto power = make_algebra(space, Partition::singletons(4));
  CHECK(sorted_members(*power).size() == 16);
  auto pieces = power->subtract(Subset::of(4, {0, 1}), Subset::of(4, {1, 2}));
  CHECK(pieces == std::vector<Subset>{Subset::of(4, {0})});
  CHECK_THROWS_AS(trivial->subtract(Subset::of(4, {0}), Subset(4)), Error);
}

TEST_CASE("interval semiring") {
  auto sr = make_intervals(GroundSpace::uniform(10), identity(10));
  CHECK(sr->k() == 2);
  auto a = sr->subtract(interval(10, 2, 8), interval(10, 4, 6));
  CHECK(a == std::vector<Subset>{interval(10, 2, 3), interval(10, 7, 8)});
  auto b = sr->subtract(interval(10, 2, 8), interval(10, 6, 9));
  CHECK(b == std::vector<Subset>{interval(10, 2, 5)});
  CHECK(sr->subtract(interval(10, 4, 6), interval(10, 1, 9)).empty());
  CHECK(sr->subtract(Subset::full(10), Subset::full(10)).empty());
  CHECK_FALSE(sr->contains(Subset::of(10, {1, 3})));
  CHECK(sorted_members(*make_intervals(GroundSpace::uniform(3), identity(3))).size() == 7);
  CHECK_THROWS_AS(make_intervals(GroundSpace::uniform(3), {0, 0, 1}), Error);
}

TEST_CASE("product of interval semirings") {
  auto iv = make_intervals(GroundSpace::uniform(3), identity(3));
  auto sr = make_product({iv, iv});
  CHECK(sr->k() == 4);
  const auto s = grid(3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto t = grid(3, {{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  auto pieces = sr->subtract(s, t);
  std::sort(pieces.begin(), pieces.end());
  std::vector<Subset> expected{grid(3, {{0, 0}, {0, 1}}), grid(3, {{1, 0}})};
  std::sort(expected.begin(), expected.end());
  CHECK(pieces == expected);
  CHECK(sr->subtract(s, Subset(9)) == std::vector<Subset>{s});
  CHECK(sr->subtract(s, s).empty());
}

TEST_CASE("rectangles and symmetric rectangles") {
  auto rect = make_rectangles(GroundSpace::uniform(3));
  CHECK(rect->k() == 2);
  CHECK(rect->contains(Subset::full(9)));
  CHECK(rect->contains(grid(3, {{1, 0}, {1, 1}, {1, 2}})));
  CHECK_FALSE(rect->contains(grid(3, {{0, 0}, {1, 1}, {2, 2}})));
  CHECK(sorted_members(*make_rectangles(GroundSpace::uniform(2))).size() == 10);

  auto sym = make_symmetric_rectangles(GroundSpace::uniform(3));
  CHECK(sym->k() == 4);
  CHECK(sym->contains(grid(3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}})));
  CHECK(sym->contains(grid(3, {{0, 2}, {1, 2}})));
  CHECK_FALSE(sym->contains(grid(3, {{0, 1}, {0, 2}, {1, 1}, {1, 2}})));
}

TEST_CASE("every rectangle is a union of at most four symmetric rectangles") {
  const std::size_t n = 5;
  auto sym = make_symmetric_rectangles(GroundSpace::uniform(n));
  auto rect_of = [&](std::uint32_t a, std::uint32_t b) {
    Subset s(n * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (((a >> x) & 1U) && ((b >> y) & 1U)) s.insert(x * n + y);
      }
    }
    return s;
  };
  for (std::uint32_t s = 0; s < 32; ++s) {
    for (std::uint32_t t = 0; t < 32; ++t) {
      const std::uint32_t both = s & t, only_s = s & ~t, only_t = t & ~s;
      const Subset parts[] = {rect_of(both, both), rect_of(both, only_t), rect_of(only_s, both),
                              rect_of(only_s, only_t)};
      Subset joined(n * n);
      for (const auto& part : parts) {
        CHECK(sym->contains(part));
        CHECK_FALSE(joined.intersects(part));
        joined |= part;
      }
      CHECK(joined == rect_of(s, t));
    }
  }
}

TEST_CASE("cylinder families") {
  auto v = GroundSpace::uniform(2);
  auto w = GroundSpace::uniform(3);
  auto cyl = make_cylinder_family({v, w}, {{0}, {1}});
  CHECK(cyl->k() == 2);
  CHECK(sorted_members(*cyl) == sorted_members(*make_product({make_algebra(v, Partition::singletons(2)),
                                                              make_algebra(w, Partition::singletons(3))})));
  auto box = make_cylinder_family({v, v, v}, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(box->k() == 3);
  auto full = make_cylinder_family({v, v, v}, {{0, 1, 2}});
  CHECK(full->k() == 1);
  CHECK(sorted_members(*full).size() == 256);
  CHECK_THROWS_AS(make_cylinder_family({v, v}, {}), Error);
  CHECK_THROWS_AS(make_cylinder_family({v, v}, {{2}}), Error);
}

TEST_CASE("hypercube insensitive sets") {
  for (std::size_t n = 1; n <= 3; ++n) {
    auto binary = make_hypercube(HypercubeSpec::all_pairs({"a", "b"}, n));
    CHECK(sorted_members(*binary) == std::vector<Subset>{Subset(1u << n), Subset::full(1u << n)});
  }
  HypercubeSpec spec{{"a", "b", "c"}, 1, {{0, 1}}};
  auto one = make_hypercube(spec);
  CHECK(one->k() == 1);
  CHECK(sorted_members(*one) ==
        std::vector<Subset>{Subset(3), Subset::of(3, {0, 1}), Subset::of(3, {2}), Subset::full(3)});
  auto full = make_hypercube(HypercubeSpec::all_pairs({"a", "b", "c"}, 2));
  CHECK(full->k() == 3);
  CHECK(full->contains(Subset::full(9)));
  CHECK_THROWS_AS(make_hypercube(HypercubeSpec{{"a", "a"}, 1, {{0, 1}}}), Error);
  CHECK_THROWS_AS(make_hypercube(HypercubeSpec{{"a", "b"}, 1, {}}), Error);
}

TEST_CASE("insensitive atoms are closed under letter swaps") {
  auto spec = HypercubeSpec::all_pairs({"a", "b", "c"}, 3);
  std::mt19937_64 rng(5);
  for (auto [a, b] : spec.pairs) {
    const auto atoms = insensitive_atoms(spec, a, b);
    auto algebra = make_algebra(GroundSpace::uniform(spec.point_count()), atoms);
    for (int trial = 0; trial < 50; ++trial) {
      const Subset x = algebra->random_member(rng);
      // Union, intersection and complement stay in the algebra.
      const Subset y = algebra->random_member(rng);
      CHECK(algebra->contains(x | y));
      CHECK(algebra->contains(x & y));
      CHECK(algebra->contains(x.complement()));
      for (std::size_t point : x.indices()) {
        auto word = spec.word(point);
        for (auto& letter : word) {
          if (letter != a && letter != b) continue;
          const auto saved = letter;
          letter = letter == a ? b : a;
          CHECK(x.contains(spec.index_of(word)));
          letter = saved;
        }
      }
    }
  }
}

TEST_CASE("axioms hold on random member pairs") {
  std::mt19937_64 rng(2024);
  for (const auto& sr : zoo()) {
    CAPTURE(sr->kind());
    auto outcome = axioms::check(*sr, 300, rng);
    CHECK_MESSAGE(outcome.failures == 0, outcome.first_failure);
    CHECK(outcome.max_pieces <= sr->k());
  }
}

TEST_CASE("structural optimisers agree with enumeration") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss;
  for (const auto& sr : zoo()) {
    CAPTURE(sr->kind());
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> mass(sr->space().size());
      for (auto& m : mass) m = gauss(rng);
      const auto fast = sr->extremal_members(mass);
      const auto slow = sr->extremal_by_enumeration(mass, 1u << 24);
      CHECK(fast.max_value == doctest::Approx(slow.max_value).epsilon(1e-12));
      CHECK(fast.min_value == doctest::Approx(slow.min_value).epsilon(1e-12));
      CHECK(fast.max_set == slow.max_set);
      CHECK(fast.min_set == slow.min_set);
      std::mt19937_64 local(trial);
      const auto heur = sr->local_search(mass, local, 4, nullptr);
      CHECK(heur.max_value <= fast.max_value + 1e-12);
      CHECK(heur.min_value >= fast.min_value - 1e-12);
      CHECK(sr->contains(heur.max_set));
      CHECK(sr->contains(heur.min_set));
      const auto seeded = sr->local_search(mass, local, 0, &fast.max_set);
      CHECK(seeded.max_value == doctest::Approx(fast.max_value).epsilon(1e-12));
    }
  }
}

TEST_CASE("enumeration truncation is signalled") {
  auto sr = make_algebra(GroundSpace::uniform(6), Partition::singletons(6));
  std::size_t seen = 0;
  CHECK(sr->enumerate(10, [&](const Subset&) { ++seen; }) == EnumerationStatus::truncated);
  CHECK(seen == 10);
  std::vector<double> mass(6, 1.0);
  CHECK_THROWS_AS(sr->extremal_by_enumeration(mass, 10), InfeasibleError);
  CHECK(sr->enumerate(64, [](const Subset&) {}) == EnumerationStatus::complete);
}
