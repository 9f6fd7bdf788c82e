#include "regdec/growth.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "regdec/error.hpp"

namespace regdec {

namespace {

constexpr std::uint64_t kValidationRange = 10000;
// Explicit iteration budget for growth functions without a closed form.
constexpr std::uint64_t kExplicitStepBudget = 10'000'000;
const double kLog10Two = std::log10(2.0);

bool is_integer(const BigRational& q) { return denominator(q) == 1; }

BigInt pow_big(const BigInt& base, std::uint64_t exponent) {
  BigInt result = 1;
  BigInt b = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent > 0) b *= b;
  }
  return result;
}

double to_double_big(const BigInt& n) {
  if (n == 0) return 0.0;
  return std::pow(10.0, log10_of(n));
}

std::vector<BigRational> parse_rational_list(std::string_view text) {
  std::vector<BigRational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(parse_rational(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad_growth(std::string_view spec, const std::string& why) {
  fail(ErrorCode::invalid_argument, "invalid growth spec '" + std::string(spec) + "': " + why);
}

}  // namespace

// ---------------------------------------------------------------------------
// Rational helpers

BigRational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  auto bad = [&] {
    fail(ErrorCode::invalid_argument, "not a number: '" + std::string(text) + "'");
  };
  if (text.empty()) bad();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigRational num = parse_rational(text.substr(0, slash));
    BigRational den = parse_rational(text.substr(slash + 1));
    if (den == 0) bad();
    return num / den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  BigInt digits = 0;
  long long scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (seen_point) --scale;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) bad();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') bad();
    long long exponent = 0;
    auto rest = text.substr(i + 1);
    if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), exponent);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) bad();
    if (exponent > 100000 || exponent < -100000) bad();
    scale += exponent;
  }
  BigRational value(digits);
  if (scale > 0) value *= BigRational(pow_big(10, static_cast<std::uint64_t>(scale)));
  if (scale < 0) value /= BigRational(pow_big(10, static_cast<std::uint64_t>(-scale)));
  return negative ? BigRational(-value) : value;
}

BigRational rational_from_double(double x) {
  require(std::isfinite(x), ErrorCode::invalid_argument, "cannot convert a non-finite value");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  require(ec == std::errc(), ErrorCode::invalid_argument, "cannot format value");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

BigInt ceil(const BigRational& q) {
  const BigInt& num = numerator(q);
  const BigInt& den = denominator(q);
  BigInt quotient = num / den;
  if (num % den != 0 && num > 0) quotient += 1;
  return quotient;
}

std::string to_string(const BigRational& q) {
  if (is_integer(q)) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const BigRational& q) {
  const BigInt& num = numerator(q);
  const BigInt& den = denominator(q);
  if (num == 0) return 0.0;
  const double sign = num < 0 ? -1.0 : 1.0;
  BigInt abs_num = num < 0 ? BigInt(-num) : num;
  const double lg = log10_of(abs_num) - log10_of(den);
  if (lg < 300.0 && lg > -300.0 && abs_num < (BigInt(1) << 1000) && den < (BigInt(1) << 1000)) {
    return static_cast<double>(q);
  }
  return sign * std::pow(10.0, lg);
}

double log10_of(const BigInt& n) {
  if (n <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = boost::multiprecision::msb(n) + 1;
  if (bits <= 53) return std::log10(static_cast<double>(n));
  const std::size_t shift = bits - 53;
  BigInt top = n >> shift;
  return std::log10(static_cast<double>(top)) + static_cast<double>(shift) * kLog10Two;
}

// ---------------------------------------------------------------------------
// GrowthFunction

GrowthFunction::GrowthFunction(Kind kind) : kind_(std::move(kind)) { validate(); }

GrowthFunction GrowthFunction::successor() { return GrowthFunction(Successor{}); }

GrowthFunction GrowthFunction::affine(BigRational a, BigRational b) {
  return GrowthFunction(Affine{std::move(a), std::move(b)});
}

GrowthFunction GrowthFunction::table(std::vector<BigRational> values, BigRational tail_a,
                                     BigRational tail_b) {
  return GrowthFunction(Table{std::move(values), std::move(tail_a), std::move(tail_b)});
}

GrowthFunction GrowthFunction::polynomial(std::vector<BigRational> coefficients) {
  while (coefficients.size() > 1 && coefficients.back() == 0) coefficients.pop_back();
  if (coefficients.size() <= 2) {
    coefficients.resize(2);
    return affine(coefficients[1], coefficients[0]);
  }
  return GrowthFunction(Polynomial{std::move(coefficients)});
}

GrowthFunction GrowthFunction::exp_precomposed(std::uint64_t base, GrowthFunction inner) {
  return GrowthFunction(
      ExpPrecomposed{base, std::make_shared<const GrowthFunction>(std::move(inner))});
}

GrowthFunction GrowthFunction::uniform_partition_preset(const BigRational& eta) {
  require(eta > 0 && eta <= 1, ErrorCode::invalid_argument, "eta must lie in (0, 1]");
  return affine(BigRational(8) / (eta * eta), BigRational(1));
}

GrowthFunction GrowthFunction::graphon_reciprocal_preset() {
  // (n+1) + sum_{i=0}^{n} 8(i+1) = (n+1) + 4(n+1)(n+2)
  return polynomial({BigRational(9), BigRational(13), BigRational(4)});
}

GrowthFunction GrowthFunction::graphon_constant_preset(const BigRational& c) {
  require(c > 0, ErrorCode::invalid_argument, "h must be positive");
  // (n+1) + 8(n+1)/c
  const BigRational slope = BigRational(1) + BigRational(8) / c;
  return affine(slope, slope);
}

BigRational GrowthFunction::operator()(const BigInt& n) const {
  require(n >= 0, ErrorCode::invalid_argument, "growth functions are evaluated on naturals");
  return std::visit(
      [&](const auto& k) -> BigRational {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Successor>) {
          return BigRational(n + 1);
        } else if constexpr (std::is_same_v<T, Affine>) {
          return k.a * BigRational(n) + k.b;
        } else if constexpr (std::is_same_v<T, Table>) {
          if (n < k.values.size()) return k.values[static_cast<std::size_t>(n)];
          return k.tail_a * BigRational(n) + k.tail_b;
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          BigRational acc = 0;
          const BigRational x(n);
          for (auto it = k.coefficients.rbegin(); it != k.coefficients.rend(); ++it) acc = acc * x + *it;
          return acc;
        } else {
          require(static_cast<double>(n) * std::log10(static_cast<double>(k.base)) < 1e7,
                  ErrorCode::invalid_argument, "exponent too large to evaluate exactly");
          return (*k.inner)(pow_big(BigInt(k.base), static_cast<std::uint64_t>(n)));
        }
      },
      kind_);
}

namespace {

// ceil(a*n + b) in integer arithmetic, avoiding rational normalisation.
BigInt ceil_affine(const BigRational& a, const BigRational& b, const BigInt& n) {
  const BigInt num = numerator(a) * denominator(b) * n + numerator(b) * denominator(a);
  const BigInt den = denominator(a) * denominator(b);
  BigInt quotient = num / den;
  if (num % den != 0 && num > 0) quotient += 1;
  return quotient;
}

}  // namespace

BigInt GrowthFunction::ceil_at(const BigInt& n) const {
  if (std::holds_alternative<Successor>(kind_)) return n + 1;
  if (const auto* a = std::get_if<Affine>(&kind_)) return ceil_affine(a->a, a->b, n);
  if (const auto* t = std::get_if<Table>(&kind_); t != nullptr && n >= t->values.size()) {
    return ceil_affine(t->tail_a, t->tail_b, n);
  }
  return regdec::ceil((*this)(n));
}

double GrowthFunction::value(std::uint64_t n) const { return to_double((*this)(BigInt(n))); }

std::string GrowthFunction::describe() const {
  return std::visit(
      [&](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Successor>) {
          return "succ";
        } else if constexpr (std::is_same_v<T, Affine>) {
          return "affine:" + to_string(k.a) + "," + to_string(k.b);
        } else if constexpr (std::is_same_v<T, Table>) {
          std::string out = "table:";
          for (std::size_t i = 0; i < k.values.size(); ++i) {
            if (i > 0) out += ",";
            out += to_string(k.values[i]);
          }
          return out + ";" + to_string(k.tail_a) + "," + to_string(k.tail_b);
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          std::string out = "poly:";
          for (std::size_t i = 0; i < k.coefficients.size(); ++i) {
            if (i > 0) out += ",";
            out += to_string(k.coefficients[i]);
          }
          return out;
        } else {
          return "exp:" + std::to_string(k.base) + ":" + k.inner->describe();
        }
      },
      kind_);
}

void GrowthFunction::validate() const {
  auto invalid = [](const std::string& why) {
    fail(ErrorCode::invalid_argument, "not a growth function: " + why);
  };
  if (const auto* a = std::get_if<Affine>(&kind_)) {
    if (a->a < 1 || a->b < 1) invalid("affine a*n+b needs a >= 1 and b >= 1");
    return;
  }
  if (std::holds_alternative<Successor>(kind_)) return;
  if (const auto* e = std::get_if<ExpPrecomposed>(&kind_)) {
    // inner(base^n) is increasing and >= base^n + 1 >= n + 1 once inner is.
    if (e->base < 2) invalid("exponential base must be at least 2");
    if (!e->inner) invalid("missing inner growth function");
    return;
  }
  if (const auto* t = std::get_if<Table>(&kind_)) {
    if (t->tail_a < 1) invalid("affine tail needs slope >= 1");
  }
  if (const auto* p = std::get_if<Polynomial>(&kind_)) {
    if (p->coefficients.back() <= 0) invalid("leading coefficient must be positive");
  }
  std::uint64_t range = kValidationRange;
  if (const auto* t = std::get_if<Table>(&kind_)) range = std::max<std::uint64_t>(range, t->values.size() + 1);
  BigRational previous = (*this)(BigInt(0));
  if (previous < 1) invalid("F(0) < 1");
  for (std::uint64_t n = 1; n <= range; ++n) {
    BigRational current = (*this)(BigInt(n));
    if (current < previous) invalid("decreases at n = " + std::to_string(n));
    if (current < BigRational(n + 1)) invalid("F(n) < n + 1 at n = " + std::to_string(n));
    previous = std::move(current);
  }
}

// ---------------------------------------------------------------------------
// Parsing

GrowthFunction parse_growth(std::string_view spec) {
  auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  try {
    if (head == "succ") {
      if (colon != std::string_view::npos) bad_growth(spec, "succ takes no parameters");
      return GrowthFunction::successor();
    }
    if (head == "affine") {
      auto params = parse_rational_list(rest);
      if (params.size() != 2) bad_growth(spec, "expected affine:a,b");
      return GrowthFunction::affine(params[0], params[1]);
    }
    if (head == "poly") {
      return GrowthFunction::polynomial(parse_rational_list(rest));
    }
    if (head == "table") {
      auto semi = rest.find(';');
      if (semi == std::string_view::npos) bad_growth(spec, "expected table:v0,...;a,b");
      auto tail = parse_rational_list(rest.substr(semi + 1));
      if (tail.size() != 2) bad_growth(spec, "affine tail needs two values");
      return GrowthFunction::table(parse_rational_list(rest.substr(0, semi)), tail[0], tail[1]);
    }
    if (head == "prop42" || head == "uniform") {
      return GrowthFunction::uniform_partition_preset(parse_rational(rest));
    }
    if (head == "cor45" || head == "graphon") {
      if (rest == "h=recip") return GrowthFunction::graphon_reciprocal_preset();
      if (rest.starts_with("h=const:")) {
        return GrowthFunction::graphon_constant_preset(parse_rational(rest.substr(8)));
      }
      bad_growth(spec, "expected h=recip or h=const:c");
    }
    if (head == "exp") {
      auto sep = rest.find(':');
      if (sep == std::string_view::npos) bad_growth(spec, "expected exp:base:inner");
      BigRational base = parse_rational(rest.substr(0, sep));
      if (!is_integer(base) || base < 2) bad_growth(spec, "base must be an integer >= 2");
      return GrowthFunction::exp_precomposed(numerator(base).convert_to<std::uint64_t>(),
                                             parse_growth(rest.substr(sep + 1)));
    }
  } catch (const Error& e) {
    if (std::string_view(e.what()).starts_with("invalid growth spec")) throw;
    bad_growth(spec, e.what());
  }
  bad_growth(spec, "unknown kind");
}

// ---------------------------------------------------------------------------
// Iteration

namespace {

struct AffineRegime {
  BigRational a, b;
};

// The affine law that applies to every argument >= x, if any.
std::optional<AffineRegime> affine_regime(const GrowthFunction& f, const BigInt& x) {
  return std::visit(
      [&](const auto& k) -> std::optional<AffineRegime> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, GrowthFunction::Successor>) {
          return AffineRegime{1, 1};
        } else if constexpr (std::is_same_v<T, GrowthFunction::Affine>) {
          return AffineRegime{k.a, k.b};
        } else if constexpr (std::is_same_v<T, GrowthFunction::Table>) {
          if (x >= k.values.size()) return AffineRegime{k.tail_a, k.tail_b};
          return std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      f.kind());
}

IterationResult overflow(double log10_estimate) {
  // Saturate rather than report inf or nan: the estimate is only a lower bound.
  if (!(log10_estimate <= std::numeric_limits<double>::max())) log10_estimate = std::numeric_limits<double>::max();
  return IterationResult{std::nullopt, log10_estimate};
}

IterationResult done(BigInt value) {
  const double lg = value > 0 ? log10_of(value) : 0.0;
  return IterationResult{std::move(value), lg};
}

}  // namespace

IterationResult iterate_from_zero(const GrowthFunction& f, const BigInt& times, std::size_t digit_cap) {
  require(times >= 0, ErrorCode::invalid_argument, "iteration count must be nonnegative");
  const double cap = static_cast<double>(digit_cap);
  BigInt x = 0;
  BigInt steps = 0;
  std::uint64_t explicit_steps = 0;
  while (steps < times) {
    const BigInt remaining = times - steps;
    if (auto regime = affine_regime(f, x)) {
      const BigRational& a = regime->a;
      const BigRational& b = regime->b;
      if (a == 1) {
        // ceil(x + b) = x + ceil(b) for integer x.
        BigInt result = x + remaining * regdec::ceil(b);
        if (log10_of(result) > cap) return overflow(log10_of(result));
        return done(std::move(result));
      }
      const double lg_a = std::log10(to_double(a));
      const double lg_r = log10_of(remaining);
      // Every step multiplies by at least a once x >= 1.
      const double lower = (std::pow(10.0, std::min(lg_r, 300.0)) - 1.0) * lg_a;
      if (lg_r > 15.0 || lower > cap) return overflow(lower);
      const std::uint64_t r = remaining.convert_to<std::uint64_t>();
      if (is_integer(a) && is_integer(b)) {
        // a^r x + b (a^r - 1)/(a - 1)
        const BigInt ai = numerator(a);
        const BigInt bi = numerator(b);
        const BigInt ar = pow_big(ai, r);
        BigInt result = ar * x + bi * (ar - 1) / (ai - 1);
        if (log10_of(result) > cap) return overflow(log10_of(result));
        return done(std::move(result));
      }
    }
    if (const auto* e = std::get_if<GrowthFunction::ExpPrecomposed>(&f.kind())) {
      const double lg = static_cast<double>(to_double_big(x)) * std::log10(static_cast<double>(e->base));
      if (!(lg <= cap)) return overflow(lg);
    }
    x = f.ceil_at(x);
    steps += 1;
    ++explicit_steps;
    if (log10_of(x) > cap) return overflow(log10_of(x));
    if (explicit_steps > kExplicitStepBudget) return overflow(log10_of(x));
  }
  return done(std::move(x));
}

}  // namespace regdec
