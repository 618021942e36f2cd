#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hetsize/problem.hpp"

namespace hetsize {

/// Plain numeric CSV, no header, one observation per line. Blank lines are
/// skipped. Throws ParseError (with 1-based row/column) or RaggedRows.
Matrix parse_design(std::string_view text);
Matrix load_design(const std::string& path);

/// "1, -1, 0.5" -> row vector. Throws ParseError.
RowVector parse_number_list(std::string_view text);

/// "2,2,1" -> block sizes. Throws ParseError on non-integers.
std::vector<Index> parse_partition(std::string_view text);

/// hc0 | hc1 | hc2 | hc3 | hc4 | custom:<path>. Custom weight files hold
/// numbers separated by commas or newlines.
WeightScheme parse_weight_scheme(std::string_view spec);

std::string read_file(const std::string& path);

}  // namespace hetsize
