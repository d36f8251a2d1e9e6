#include "report_util.hpp"

#include <fstream>

#include "txamp/errors.hpp"
#include "txamp/io.hpp"

namespace txamp::cli {

std::filesystem::path ensure_out_dir(const std::string& out) {
  std::filesystem::path dir(out.empty() ? "." : out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw parse_error(dir.string(), 0, "cannot create output directory: " + ec.message());
  return dir;
}

double sig(double value) { return std::stod(io::format_sig(value)); }

std::string fmt(double value) { return io::format_sig(value); }

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw parse_error(path.string(), 0, "cannot open file for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) throw parse_error(path.string(), 0, "write failed");
}

void write_json(const std::filesystem::path& path, const OrderedJson& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw parse_error(path.string(), 0, "cannot open file for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw parse_error(path.string(), 0, "write failed");
}

}  // namespace txamp::cli
