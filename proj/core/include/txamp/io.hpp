#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "txamp/errors.hpp"

namespace txamp::io {

// Splits one comma separated line; fields are trimmed of surrounding space.
std::vector<std::string> split_csv(std::string_view line);

// Calls `fn(line_no, fields)` for every non-empty line of `path` that is not
// a '#' comment. Parse errors thrown by `fn` propagate with path/line intact.
void for_each_csv_row(const std::string& path,
                      const std::function<void(std::size_t, const std::vector<std::string>&)>& fn);

std::int64_t parse_int(const std::string& field, const std::string& path, std::size_t line);
std::uint64_t parse_uint(const std::string& field, const std::string& path, std::size_t line);
double parse_double(const std::string& field, const std::string& path, std::size_t line);

// "YYYY-MM-DD" -> days since the Unix epoch.
std::int64_t parse_date_to_epoch_day(const std::string& field, const std::string& path, std::size_t line);

// Renders with six significant digits, the precision used by all reports.
std::string format_sig(double value, int digits = 6);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace txamp::io
