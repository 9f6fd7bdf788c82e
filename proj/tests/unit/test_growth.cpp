#include <doctest.h>

#include "regdec/bounds.hpp"
#include "regdec/error.hpp"
#include "regdec/growth.hpp"

using namespace regdec;

TEST_CASE("exact rational parsing") {
  CHECK(parse_rational("0.9") == BigRational(9, 10));
  CHECK(parse_rational("-1.5e-3") == BigRational(-3, 2000));
  CHECK(parse_rational("7/8") == BigRational(7, 8));
  CHECK(parse_rational("12") == BigRational(12));
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK(rational_from_double(0.9) == BigRational(9, 10));
  CHECK(rational_from_double(0.25) == BigRational(1, 4));
  CHECK(ceil(BigRational(7, 2)) == 4);
  CHECK(ceil(BigRational(-7, 2)) == -3);
}

TEST_CASE("growth spec strings") {
  CHECK(parse_growth("succ").value(5) == 6.0);
  CHECK(parse_growth("affine:2,3").value(4) == 11.0);
  CHECK(parse_growth("prop42:0.5").value(1) == doctest::Approx(33.0));
  CHECK(parse_growth("uniform:0.5").value(2) == doctest::Approx(65.0));
  CHECK(parse_growth("table:1,3,7;2,1").value(2) == 7.0);
  CHECK(parse_growth("table:1,3,7;2,1").value(5) == 11.0);
  CHECK(parse_growth("poly:1,1").value(3) == 4.0);
  CHECK_THROWS_AS(parse_growth("affine:0.5,1"), Error);
  CHECK_THROWS_AS(parse_growth("affine:1,0"), Error);
  CHECK_THROWS_AS(parse_growth("table:5,3;1,1"), Error);
  CHECK_THROWS_AS(parse_growth("wiggle"), Error);
  CHECK_THROWS_AS(parse_growth("prop42:1.5"), Error);
  for (const char* spec : {"succ", "affine:2,3", "prop42:0.5", "cor45:h=recip", "table:1,3,7;2,1"}) {
    CAPTURE(spec);
    const auto f = parse_growth(spec);
    CHECK(parse_growth(f.describe()).describe() == f.describe());
  }
}

TEST_CASE("graphon presets match their defining sums") {
  const auto recip = parse_growth("cor45:h=recip");
  const auto recip_alias = parse_growth("graphon:h=recip");
  for (std::uint64_t n = 0; n < 50; ++n) {
    double sum = static_cast<double>(n) + 1.0;
    for (std::uint64_t i = 0; i <= n; ++i) sum += 8.0 * static_cast<double>(i + 1);
    CHECK(recip.value(n) == doctest::Approx(sum));
    CHECK(recip_alias.value(n) == doctest::Approx(sum));
  }
  const auto constant = parse_growth("cor45:h=const:0.5");
  for (std::uint64_t n = 0; n < 20; ++n) {
    CHECK(constant.value(n) == doctest::Approx(static_cast<double>(n + 1) * (1.0 + 16.0)));
  }
}

TEST_CASE("iterates from zero") {
  CHECK(*iterate_from_zero(GrowthFunction::successor(), 8).value == 8);
  CHECK(*iterate_from_zero(GrowthFunction::successor(), BigInt("1000000000000000000000")).value ==
        BigInt("1000000000000000000000"));
  // 2x + 1 from 0: 2^t - 1
  const auto doubling = parse_growth("affine:2,1");
  CHECK(*iterate_from_zero(doubling, 10).value == 1023);
  CHECK(iterate_from_zero(doubling, 1000000).overflowed());
  // Non-integer slope steps through ceil explicitly: 0 -> 1 -> 3 (2.5) -> 6 (5.5)
  const auto half = parse_growth("affine:1.5,1");
  CHECK(*iterate_from_zero(half, 3).value == 6);
  const auto poly = parse_growth("cor45:h=recip");
  CHECK(*iterate_from_zero(poly, 1).value == 9);
  CHECK(*iterate_from_zero(poly, 2).value == 4 * 81 + 13 * 9 + 9);
  CHECK(iterate_from_zero(poly, 40).overflowed());
  // Exponential precomposition: F(2^n) with F = succ, from 0: 2, 5, 33
  const auto shifted = GrowthFunction::exp_precomposed(2, GrowthFunction::successor());
  CHECK(*iterate_from_zero(shifted, 3).value == 33);
  CHECK(iterate_from_zero(shifted, 6).overflowed());
}
