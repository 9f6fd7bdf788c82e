// regdec: command line front end for the regularity decomposition library.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "regdec/cli/run.hpp"
#include "regdec/error.hpp"

namespace {

using regdec::cli::RunConfig;

void add_common(CLI::App& sub, RunConfig& c) {
  sub.add_option("--input,-i", c.inputs, "Input file (repeat for multi)");
  sub.add_option("--format", c.format, "Input format: csv, json or auto")->capture_default_str();
  sub.add_option("--semiring", c.semiring,
                 "rectangles, rectangles:b, symmetric-rectangles, interval-boxes, intervals "
                 "(comma-separated list for multi)")
      ->capture_default_str();
  sub.add_option("--p", c.p, "Exponent p")->capture_default_str();
  sub.add_option("--sigma", c.sigma, "Energy threshold sigma");
  sub.add_option("--eta", c.eta, "Uniformity parameter eta");
  sub.add_option("--eps", c.eps, "Accuracy epsilon");
  sub.add_option("--growth", c.growth, "Growth function: succ, affine:a,b, uniform:eta, graphon:h=recip, ...")
      ->capture_default_str();
  sub.add_option("--mode", c.mode, "exact or best-effort")->capture_default_str();
  sub.add_option("--tol", c.tol, "Absolute tolerance for certificate comparisons")->capture_default_str();
  sub.add_option("--seed", c.seed, "Seed for heuristic search")->capture_default_str();
  sub.add_option("--caps", c.caps, "Cap overrides: log2=24,digits=100000,steps=1000000");
  sub.add_option("--output,-o", c.output, "Write the JSON report here instead of stdout");
  sub.add_flag("--stable-output", c.stable_output, "Omit timings so reports are byte-identical");
  sub.add_option("--k", c.k, "Semiring constant k (bounds)")->capture_default_str();
  sub.add_option("--ell", c.ell, "Number of functions (bounds)")->capture_default_str();
  sub.add_option("--profile", c.h, "Error profile h for graphon-strong: recip or const:c")->capture_default_str();
  sub.add_flag("--strict", c.strict, "Reject inputs outside the Lp unit ball instead of rescaling");
  sub.add_flag("--accept-cost", c.accept_cost, "Lift the hypercube size caps");
}

int write(const nlohmann::json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return std::cout ? 0 : 5;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "regdec: cannot write " << path << "\n";
    return 5;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified regularity decompositions over finite probability spaces"};
  app.set_version_flag("--version", regdec::cli::kToolVersion);
  app.require_subcommand(1);
  RunConfig config;
  const char* names[][2] = {
      {"decompose", "Decompose f = f_str + f_err + f_unf over one semiring"},
      {"multi", "Decompose several functions against an increasing semiring sequence"},
      {"uniform", "Uniform partition with exact per-cell checks"},
      {"hypercube", "Density regularity for a subset of A^n"},
      {"graphon-strong", "Strong regularity for an Lp graphon"},
      {"graphon-weak", "Weak regularity for an Lp graphon"},
      {"norm", "Uniformity norm and witness"},
      {"bounds", "Regularity and partition-count bounds"},
      {"verify", "Recompute the certificates of a report"},
  };
  for (const auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    add_common(*sub, config);
    if (std::string(name) == "verify") sub->add_option("--report", config.report, "Report to check")->required();
    sub->callback([&config, name = std::string(name)] { config.operation = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : 2;
  }

  try {
    const bool verifying = config.operation == "verify";
    const auto outcome = verifying ? regdec::cli::verify(config) : regdec::cli::run(config);
    if (const int status = write(outcome.report, config.output); status != 0) return status;
    if (!outcome.passed) {
      std::cerr << "regdec: " << (verifying ? "verification failed" : "certificate check failed") << "\n";
      return 4;
    }
    return 0;
  } catch (const regdec::Error& e) {
    std::cerr << "regdec: " << regdec::to_string(e.code()) << ": " << e.what() << "\n";
    return regdec::cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "regdec: internal error: " << e.what() << "\n";
    return 4;
  }
}
