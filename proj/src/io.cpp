#include "hetsize/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hetsize {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix parse_design(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t col = 0;
    for (std::string_view cell : split(line, ',')) {
      ++col;
      double value = 0.0;
      if (!parse_double(cell, value))
        throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ", column " +
                                               std::to_string(col) + ": '" + std::string(trim(cell)) +
                                               "' is not a number");
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::RaggedRows, "row " + std::to_string(line_no) + " has " +
                                             std::to_string(row.size()) + " columns, expected " +
                                             std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "design file is empty");

  Matrix X(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return X;
}

Matrix load_design(const std::string& path) { return parse_design(read_file(path)); }

RowVector parse_number_list(std::string_view text) {
  std::vector<double> values;
  std::size_t pos = 0;
  for (std::string_view line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    for (std::string_view cell : split(line, ',')) {
      ++pos;
      double value = 0.0;
      if (!parse_double(cell, value))
        throw Error(ErrorCode::ParseError,
                    "entry " + std::to_string(pos) + ": '" + std::string(trim(cell)) + "' is not a number");
      values.push_back(value);
    }
  }
  if (values.empty()) throw Error(ErrorCode::ParseError, "empty number list");
  return Eigen::Map<const RowVector>(values.data(), static_cast<Index>(values.size()));
}

std::vector<Index> parse_partition(std::string_view text) {
  const RowVector raw = parse_number_list(text);
  std::vector<Index> sizes;
  for (Index j = 0; j < raw.size(); ++j) {
    const double s = raw(j);
    if (s != static_cast<double>(static_cast<Index>(s)))
      throw Error(ErrorCode::ParseError, "partition entries must be integers");
    sizes.push_back(static_cast<Index>(s));
  }
  return sizes;
}

WeightScheme parse_weight_scheme(std::string_view spec) {
  using Kind = WeightScheme::Kind;
  std::string lower;
  for (char c : spec) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "hc0") return WeightScheme::hc(Kind::HC0);
  if (lower == "hc1") return WeightScheme::hc(Kind::HC1);
  if (lower == "hc2") return WeightScheme::hc(Kind::HC2);
  if (lower == "hc3") return WeightScheme::hc(Kind::HC3);
  if (lower == "hc4") return WeightScheme::hc(Kind::HC4);
  constexpr std::string_view prefix = "custom:";
  if (spec.substr(0, prefix.size()) == prefix || lower.rfind(prefix, 0) == 0) {
    const std::string path(spec.substr(prefix.size()));
    const RowVector d = parse_number_list(read_file(path));
    return WeightScheme::custom(d.transpose());
  }
  throw Error(ErrorCode::ParseError, "unknown weight scheme '" + std::string(spec) + "'");
}

}  // namespace hetsize
