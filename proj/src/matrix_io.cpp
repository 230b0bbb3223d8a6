#include "psdbw/matrix_io.hpp"

#include "psdbw/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace psdbw {

namespace {

// Files are rejected, not silently symmetrized, when the stored matrix is
// visibly asymmetric.
void check_symmetric(int dim, const std::vector<double>& values) {
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double a = values[static_cast<std::size_t>(i * dim + j)];
      const double b = values[static_cast<std::size_t>(j * dim + i)];
      if (std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}))
        throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
}

SymMatrix parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed matrix JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("values"))
    throw InvalidArgument("matrix JSON must be an object with \"dim\" and \"values\"");
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() <= 0)
    throw InvalidArgument("matrix \"dim\" must be a positive integer");
  if (!doc["values"].is_array()) throw InvalidArgument("matrix \"values\" must be an array");
  const int dim = doc["dim"].get<int>();
  std::vector<double> values;
  values.reserve(doc["values"].size());
  for (const auto& v : doc["values"]) {
    if (!v.is_number()) throw InvalidArgument("matrix \"values\" must contain numbers only");
    values.push_back(v.get<double>());
  }
  if (values.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
    throw InvalidArgument("matrix JSON has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(dim * dim));
  check_symmetric(dim, values);
  return SymMatrix::from_row_major(dim, values);
}

double parse_number(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw InvalidArgument("malformed CSV number '" + std::string(field) + "'");
  return x;
}

SymMatrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_number(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("empty matrix CSV");
  const int dim = static_cast<int>(rows.size());
  std::vector<double> values;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim)
      throw InvalidArgument("matrix CSV must be square: row has " + std::to_string(row.size()) + " columns, expected " +
                            std::to_string(dim));
    values.insert(values.end(), row.begin(), row.end());
  }
  check_symmetric(dim, values);
  return SymMatrix::from_row_major(dim, values);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

SymMatrix parse_matrix(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw InvalidArgument("empty matrix input");
  return text[first] == '{' ? parse_json(text) : parse_csv(text);
}

SymMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open matrix file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix(buf.str());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

std::string matrix_to_json(const SymMatrix& a) {
  std::string out = "{\"dim\": " + std::to_string(a.dim()) + ", \"values\": [";
  const std::vector<double> values = a.row_major();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  out += "]}\n";
  return out;
}

std::string matrix_to_csv(const SymMatrix& a) {
  std::string out;
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) {
      if (j) out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix(const std::filesystem::path& path, const SymMatrix& a, bool csv) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << (csv ? matrix_to_csv(a) : matrix_to_json(a));
}

}  // namespace psdbw
