#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "regdec/error.hpp"
#include "regdec/growth.hpp"
#include "regdec/semiring.hpp"

namespace regdec::cli {

inline constexpr const char* kReportSchema = "regdec-report/1";
inline constexpr const char* kVerifySchema = "regdec-verify/1";
inline constexpr const char* kToolVersion = "0.1.0";

struct Caps {
  double log2 = 24.0;  // exact search cost
  std::size_t digits = kDefaultDigitCap;
  std::uint64_t steps = 1'000'000;
};

// "log2=30,digits=50000,steps=1000"; unknown keys are config errors.
Caps parse_caps(const std::string& text);

struct RunConfig {
  std::string operation;  // decompose, multi, uniform, ...
  std::vector<std::string> inputs;
  std::string format = "auto";
  std::string semiring = "rectangles";
  // Numeric parameters are kept as text so the bound calculators can read
  // them as exact rationals.
  std::string p = "2";
  std::string sigma;
  std::string eta;
  std::string eps;
  std::string growth = "succ";
  std::string mode = "exact";  // exact | best-effort
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::string caps;
  std::string output;
  bool stable_output = false;
  // Operation-specific extras.
  std::uint64_t k = 1;
  std::uint64_t ell = 1;
  std::string h = "recip";  // graphon-strong error profile: recip | const:c
  bool strict = false;
  bool accept_cost = false;
  std::string report;  // verify: report to check

  nlohmann::json echo() const;
  static RunConfig from_echo(const nlohmann::json& j);
};

// Builds the semiring named by `spec` on base x base ("rectangles",
// "rectangles:b" for blocks of b consecutive points, "symmetric-rectangles",
// "interval-boxes", "intervals" on the row-major order).
SemiringPtr matrix_semiring(const std::string& spec, const GroundSpace& base);

struct Outcome {
  nlohmann::json report;
  bool passed = false;
};

// Runs one operation and returns its report. Module errors propagate as
// regdec::Error.
Outcome run(const RunConfig& config);

// Recomputes the certificates of `report` from its echoed config, the
// partitions it lists, and the input (config.inputs overrides the paths
// stored in the report when given).
Outcome verify(const RunConfig& config);

// Exit status for an error code: 2 config, 3 infeasible, 4 certificate, 5 I/O.
int exit_code_for(ErrorCode code);

}  // namespace regdec::cli
