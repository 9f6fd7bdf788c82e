#include "regdec/cli/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "regdec/error.hpp"

namespace regdec::cli {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
  const std::string t = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    fail(ErrorCode::io, "non-numeric entry '" + t + "' at row " + std::to_string(row + 1) + ", column " +
                            std::to_string(col + 1));
  }
  return value;
}

MatrixInput assemble(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), ErrorCode::io, "input matrix is empty");
  const std::size_t n = rows.size();
  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < n; ++r) {
    require(rows[r].size() == width, ErrorCode::io,
            "ragged input: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                " entries, row 1 has " + std::to_string(width));
  }
  require(width == n || width == n + 1, ErrorCode::io,
          "expected a square matrix, optionally with one weight column; got " + std::to_string(n) + " rows of " +
              std::to_string(width));
  MatrixInput out{GroundSpace::uniform(n), RandomVar::constant(n * n, 0.0), width == n + 1};
  std::vector<double> values(n * n);
  std::vector<double> weights;
  for (std::size_t r = 0; r < n; ++r) {
    std::copy_n(rows[r].begin(), n, values.begin() + static_cast<std::ptrdiff_t>(r * n));
    if (out.weighted) weights.push_back(rows[r][n]);
  }
  if (out.weighted) out.base = GroundSpace(weights);
  out.values = RandomVar(std::move(values));
  return out;
}

std::vector<double> numbers(const json& row, std::size_t r) {
  require(row.is_array(), ErrorCode::io, "row " + std::to_string(r + 1) + " is not an array");
  std::vector<double> out;
  for (std::size_t c = 0; c < row.size(); ++c) {
    require(row[c].is_number(), ErrorCode::io,
            "non-numeric entry at row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1));
    out.push_back(row[c].get<double>());
  }
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::io, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
  if (name.empty() || name == "auto") return MatrixFormat::automatic;
  if (name == "csv") return MatrixFormat::csv;
  if (name == "json") return MatrixFormat::json;
  fail(ErrorCode::invalid_argument, "unknown input format '" + name + "' (expected csv or json)");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), ErrorCode::io, "cannot read " + path.string());
  return buf.str();
}

MatrixInput parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.push_back(parse_number(line.substr(start, comma - start), rows.size(), row.size()));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return assemble(rows);
}

MatrixInput parse_matrix_json(const std::string& text) {
  const json doc = parse_json(text);
  const json* matrix = &doc;
  if (doc.is_object()) {
    require(doc.contains("matrix"), ErrorCode::io, "JSON input needs a \"matrix\" field");
    matrix = &doc.at("matrix");
  }
  require(matrix->is_array(), ErrorCode::io, "matrix must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < matrix->size(); ++r) rows.push_back(numbers((*matrix)[r], r));
  if (doc.is_object() && doc.contains("weights")) {
    const auto w = numbers(doc.at("weights"), 0);
    require(w.size() == rows.size(), ErrorCode::io, "weights must have one entry per row");
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(w[r]);
  }
  return assemble(rows);
}

MatrixInput ingest_matrix(const std::filesystem::path& path, MatrixFormat format) {
  const std::string text = read_file(path);
  if (format == MatrixFormat::automatic) {
    const auto ext = path.extension().string();
    if (ext == ".json") {
      format = MatrixFormat::json;
    } else if (ext == ".csv" || ext == ".txt") {
      format = MatrixFormat::csv;
    } else {
      const auto first = text.find_first_not_of(" \t\r\n");
      format = (first != std::string::npos && (text[first] == '[' || text[first] == '{')) ? MatrixFormat::json
                                                                                           : MatrixFormat::csv;
    }
  }
  return format == MatrixFormat::json ? parse_matrix_json(text) : parse_matrix_csv(text);
}

HypercubeInput parse_hypercube_json(const std::string& text) {
  const json doc = parse_json(text);
  require(doc.is_object(), ErrorCode::io, "hypercube input must be a JSON object");
  for (const char* key : {"alphabet", "n", "subset"}) {
    require(doc.contains(key), ErrorCode::io, std::string("hypercube input needs a \"") + key + "\" field");
  }
  HypercubeInput out;
  require(doc["alphabet"].is_array(), ErrorCode::io, "alphabet must be an array of strings");
  for (const auto& letter : doc["alphabet"]) {
    require(letter.is_string(), ErrorCode::io, "alphabet must be an array of strings");
    out.spec.alphabet.push_back(letter.get<std::string>());
  }
  require(doc["n"].is_number_integer() && doc["n"].get<long long>() >= 1, ErrorCode::io,
          "n must be a positive integer");
  out.spec.n = doc["n"].get<std::size_t>();
  if (doc.contains("pairs")) {
    for (const auto& pair : doc["pairs"]) {
      require(pair.is_array() && pair.size() == 2 && pair[0].is_number_integer() && pair[1].is_number_integer(),
              ErrorCode::io, "pairs must be [a, b] index pairs");
      out.spec.pairs.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
    }
  } else {
    out.spec = HypercubeSpec::all_pairs(out.spec.alphabet, out.spec.n);
  }
  out.spec.validate();

  auto letter_index = [&](const std::string& letter, const std::string& word) {
    const auto it = std::find(out.spec.alphabet.begin(), out.spec.alphabet.end(), letter);
    require(it != out.spec.alphabet.end(), ErrorCode::io,
            "word '" + word + "' uses letter '" + letter + "' outside the alphabet");
    return static_cast<std::size_t>(it - out.spec.alphabet.begin());
  };
  out.subset = Subset(out.spec.point_count());
  require(doc["subset"].is_array(), ErrorCode::io, "subset must be an array of words");
  std::set<std::size_t> seen;
  for (const auto& entry : doc["subset"]) {
    std::vector<std::size_t> letters;
    std::string shown;
    if (entry.is_string()) {
      shown = entry.get<std::string>();
      for (char c : shown) letters.push_back(letter_index(std::string(1, c), shown));
    } else if (entry.is_array()) {
      for (const auto& l : entry) {
        require(l.is_string(), ErrorCode::io, "letters must be strings");
        shown += l.get<std::string>();
      }
      for (const auto& l : entry) letters.push_back(letter_index(l.get<std::string>(), shown));
    } else {
      fail(ErrorCode::io, "subset entries must be words");
    }
    require(letters.size() == out.spec.n, ErrorCode::io,
            "word '" + shown + "' has length " + std::to_string(letters.size()) + ", expected " +
                std::to_string(out.spec.n));
    const std::size_t point = out.spec.index_of(letters);
    if (!seen.insert(point).second) {
      out.warnings.push_back("duplicate word '" + shown + "' ignored");
      continue;
    }
    out.subset.insert(point);
  }
  return out;
}

HypercubeInput ingest_hypercube(const std::filesystem::path& path) { return parse_hypercube_json(read_file(path)); }

}  // namespace regdec::cli
