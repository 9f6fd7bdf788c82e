#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "regdec/measure.hpp"
#include "regdec/semiring.hpp"

namespace regdec::cli {

enum class MatrixFormat { automatic, csv, json };

MatrixFormat parse_format(const std::string& name);

// A square matrix f(x, y) on base x base, indexed x * n + y.
struct MatrixInput {
  GroundSpace base;
  RandomVar values;
  bool weighted = false;
};

// CSV: one row per line. A row with n + 1 entries carries its point's
// weight in the last column (all rows or none). JSON: either an array of
// rows or {"matrix": [...], "weights": [...]}. Weights must sum to 1.
MatrixInput ingest_matrix(const std::filesystem::path& path, MatrixFormat format = MatrixFormat::automatic);
MatrixInput parse_matrix_csv(const std::string& text);
MatrixInput parse_matrix_json(const std::string& text);

struct HypercubeInput {
  HypercubeSpec spec;
  Subset subset;
  std::vector<std::string> warnings;
};

// {"alphabet": [...], "n": 2, "subset": ["ab", ...], "pairs": [[0, 1], ...]}.
// Words are strings of one-character letters or arrays of letters; pairs
// default to every pair of letters.
HypercubeInput ingest_hypercube(const std::filesystem::path& path);
HypercubeInput parse_hypercube_json(const std::string& text);

std::string read_file(const std::filesystem::path& path);

}  // namespace regdec::cli
