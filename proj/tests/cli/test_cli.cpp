#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <unistd.h>

#include "regdec/cli/ingest.hpp"
#include "regdec/cli/run.hpp"
#include "regdec/error.hpp"

using namespace regdec;
using namespace regdec::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("regdec-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

int status_of(const std::string& args) {
  const std::string cmd = std::string(REGDEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

RunConfig config_for(const std::string& op, const fs::path& input) {
  RunConfig c;
  c.operation = op;
  c.inputs = {input.string()};
  c.stable_output = true;
  return c;
}

fs::path save_report(const std::string& name, const nlohmann::json& report) {
  return write_file(name, report.dump(2));
}

bool verifies(const nlohmann::json& report, const std::string& name) {
  RunConfig v;
  v.operation = "verify";
  v.report = save_report(name, report).string();
  return verify(v).passed;
}

std::string random_symmetric_csv(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> w(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x; y < n; ++y) w[x * n + y] = w[y * n + x] = (rng() & 1U) ? 1.0 : 0.0;
  }
  std::string out;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) out += (y ? "," : "") + std::to_string(w[x * n + y]);
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("matrix ingestion") {
  auto sign = parse_matrix_csv("1,-1\n-1,1\n");
  CHECK(sign.base.size() == 2);
  CHECK(sign.values == RandomVar{1, -1, -1, 1});
  CHECK_FALSE(sign.weighted);
  CHECK_THROWS_AS(parse_matrix_csv(""), Error);
  CHECK_THROWS_AS(parse_matrix_csv("1,2\n3\n"), Error);
  CHECK_THROWS_AS(parse_matrix_csv("1,x\n3,4\n"), Error);
  CHECK_THROWS_AS(parse_matrix_csv("1,2,3\n4,5,6\n"), Error);
  auto weighted = parse_matrix_csv("1,0,0,0.5\n0,1,0,0.25\n0,0,1,0.25\n");
  CHECK(weighted.weighted);
  double total = 0.0;
  for (double w : weighted.base.weights()) total += w;
  CHECK(total == doctest::Approx(1.0));
  CHECK(weighted.base.weights()[0] == 0.5);
  CHECK_THROWS_AS(parse_matrix_csv("1,0,0.5\n0,1,0.6\n"), Error);
  auto j = parse_matrix_json(R"({"matrix": [[1, -1], [-1, 1]], "weights": [0.25, 0.75]})");
  CHECK(j.values == sign.values);
  CHECK(j.base.weights()[1] == 0.75);
  CHECK(parse_matrix_json("[[1, 2], [2, 1]]").values == RandomVar{1, 2, 2, 1});
  CHECK_THROWS_AS(parse_matrix_json("[[1, 2], [2, \"a\"]]"), Error);
  CHECK_THROWS_AS(parse_matrix_json("{"), Error);
  CHECK_THROWS_AS(ingest_matrix(scratch() / "missing.csv"), Error);
}

TEST_CASE("hypercube ingestion") {
  auto one = parse_hypercube_json(R"({"alphabet": ["a", "b", "c"], "n": 1, "subset": ["c"]})");
  CHECK(one.spec.point_count() == 3);
  CHECK(one.subset.count() == 1);
  CHECK(one.subset.contains(2));
  auto dup = parse_hypercube_json(R"({"alphabet": ["a", "b"], "n": 2, "subset": ["ab", "ab", ["b", "b"]]})");
  CHECK(dup.subset.count() == 2);
  CHECK(dup.warnings.size() == 1);
  CHECK_THROWS_AS(parse_hypercube_json(R"({"alphabet": ["a", "b", "c"], "n": 2, "subset": ["ad"]})"), Error);
  CHECK_THROWS_AS(parse_hypercube_json(R"({"alphabet": ["a", "b", "c"], "n": 2, "subset": ["abc"]})"), Error);
  CHECK_THROWS_AS(parse_hypercube_json(R"({"alphabet": ["a"], "n": 2})"), Error);
}

TEST_CASE("semiring names") {
  auto base = GroundSpace::uniform(4);
  CHECK(matrix_semiring("rectangles", base)->k() == 2);
  CHECK(matrix_semiring("rectangles:2", base)->k() == 2);
  CHECK(matrix_semiring("symmetric-rectangles", base)->k() == 4);
  CHECK(matrix_semiring("interval-boxes", base)->k() == 4);
  CHECK(matrix_semiring("intervals", base)->k() == 2);
  CHECK_THROWS_AS(matrix_semiring("triangles", base), Error);
  CHECK_THROWS_AS(matrix_semiring("rectangles:0", base), Error);
  CHECK(parse_caps("log2=30,digits=10,steps=5").digits == 10);
  CHECK_THROWS_AS(parse_caps("speed=1"), Error);
  CHECK_THROWS_AS(parse_caps("log2=abc"), Error);
}

TEST_CASE("documented runs") {
  const auto sign = write_file("sign.csv", "1,-1\n-1,1\n");
  auto weak = config_for("graphon-weak", sign);
  weak.eps = "0.2";
  const auto w = run(weak);
  CHECK(w.passed);
  CHECK(w.report["certificates"]["steps"].get<int>() <= 25);
  CHECK(w.report["certificates"]["final_cut"].get<double>() <= 0.2 + 1e-9);
  CHECK(w.report["schema"] == kReportSchema);
  CHECK_FALSE(w.report.contains("timings"));

  RunConfig bounds;
  bounds.operation = "bounds";
  bounds.k = 1;
  bounds.ell = 2;
  bounds.sigma = "1";
  bounds.p = "2";
  const auto b = run(bounds);
  CHECK(b.report["outputs"]["regularity"]["reg"] == "8");

  bounds.growth = "affine:2";
  CHECK_THROWS_AS(run(bounds), Error);
}

TEST_CASE("reports are deterministic and re-verify") {
  const auto matrix = write_file("m.csv", random_symmetric_csv(5, 3));
  const auto other = write_file("m2.csv", random_symmetric_csv(5, 4));
  const auto cube = write_file("cube.json", R"({"alphabet": ["a", "b", "c"], "n": 2, "subset": ["aa", "ab", "cc", "ba"]})");

  std::vector<RunConfig> configs;
  {
    auto c = config_for("decompose", matrix);
    c.sigma = "0.3";
    c.growth = "affine:4,1";
    configs.push_back(c);
    auto big = config_for("decompose", write_file("big.csv", "3,-3\n-3,3\n"));
    big.sigma = "0.2";
    configs.push_back(big);
  }
  {
    auto c = config_for("multi", matrix);
    c.inputs.push_back(other.string());
    c.sigma = "0.5";
    c.semiring = "rectangles:5,rectangles";
    configs.push_back(c);
  }
  {
    auto c = config_for("uniform", matrix);
    c.eta = "0.9";
    configs.push_back(c);
  }
  {
    auto c = config_for("hypercube", cube);
    c.eps = "0.6";
    configs.push_back(c);
  }
  {
    auto c = config_for("graphon-strong", matrix);
    c.eps = "0.4";
    configs.push_back(c);
  }
  {
    auto c = config_for("graphon-weak", matrix);
    c.eps = "0.2";
    c.p = "1.5";
    configs.push_back(c);
  }
  for (const char* sr : {"rectangles", "symmetric-rectangles", "interval-boxes", "intervals"}) {
    auto c = config_for("norm", matrix);
    c.semiring = sr;
    configs.push_back(c);
  }
  {
    RunConfig c;
    c.operation = "bounds";
    c.sigma = "3/4";
    c.k = 2;
    c.stable_output = true;
    configs.push_back(c);
  }
  int i = 0;
  for (const auto& c : configs) {
    CAPTURE(c.operation);
    CAPTURE(c.semiring);
    const auto first = run(c);
    const auto second = run(c);
    CHECK(first.passed);
    CHECK(first.report.dump() == second.report.dump());
    CHECK(verifies(first.report, "report" + std::to_string(i++) + ".json"));
  }
}

TEST_CASE("tampered reports fail verification") {
  const auto matrix = write_file("t.csv", random_symmetric_csv(4, 9));
  auto c = config_for("decompose", matrix);
  c.sigma = "0.3";
  c.growth = "affine:4,1";
  auto report = run(c).report;
  CHECK(verifies(report, "ok.json"));
  auto err = report;
  err["certificates"]["err_lp"] = err["certificates"]["err_lp"].get<double>() + 0.01;
  CHECK_FALSE(verifies(err, "bad-err.json"));
  auto unf = report;
  unf["certificates"]["unf"][0]["measured"] = 0.0;
  CHECK_FALSE(verifies(unf, "bad-unf.json"));
  auto part = report;
  part["outputs"]["parts"]["f_str"][0] = 42.0;
  CHECK_FALSE(verifies(part, "bad-part.json"));

  auto w = config_for("graphon-weak", matrix);
  w.eps = "0.3";
  auto weak = run(w).report;
  weak["certificates"]["final_cut"] = 0.0;
  weak["outputs"]["R"] = nlohmann::json::array({nlohmann::json::array({0, 1, 2, 3})});
  CHECK_FALSE(verifies(weak, "bad-weak.json"));
}

TEST_CASE("exit codes") {
  const auto sign = write_file("sign2.csv", "1,-1\n-1,1\n");
  const auto asym = write_file("asym.csv", "1,2\n3,4\n");
  const std::string in = " -i " + sign.string();
  CHECK(status_of("decompose" + in + " --sigma 0.5 --stable-output") == 0);
  CHECK(status_of("bounds --sigma 1 --growth bogus") == 2);
  CHECK(status_of("decompose" + in + " --sigma 0.5 --p 1") == 2);
  CHECK(status_of("frobnicate") == 2);
  CHECK(status_of("graphon-weak -i " + asym.string() + " --eps 0.5") == 2);
  CHECK(status_of("norm" + in + " --semiring symmetric-rectangles --caps log2=1") == 3);
  CHECK(status_of("norm -i " + (scratch() / "nope.csv").string()) == 5);
  const auto out = scratch() / "cli-report.json";
  CHECK(status_of("graphon-weak" + in + " --eps 0.2 --stable-output -o " + out.string()) == 0);
  CHECK(status_of("verify --report " + out.string()) == 0);
  auto report = nlohmann::json::parse(read_file(out));
  report["certificates"]["final_cut"] = 0.5;
  const auto bad = save_report("cli-bad.json", report);
  CHECK(status_of("verify --report " + bad.string()) == 4);
}
