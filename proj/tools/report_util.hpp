#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace txamp::cli {

using OrderedJson = nlohmann::ordered_json;

std::filesystem::path ensure_out_dir(const std::string& out);

// Double rounded to the report precision (six significant digits) so JSON
// and CSV emissions agree byte for byte across runs.
double sig(double value);
std::string fmt(double value);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_json(const std::filesystem::path& path, const OrderedJson& doc);

}  // namespace txamp::cli
