#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "txamp/config.hpp"
#include "txamp/io.hpp"

using namespace txamp;

namespace {

std::string write_temp(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::trunc);
  out << contents;
  return path.string();
}

}  // namespace

TEST_CASE("config parsing") {
  const std::string path = write_temp("txamp_test_config.conf",
                                      "# comment\n"
                                      "model.a_bytes = 560\n"
                                      "model.gamma=0.015\n"
                                      "sim.trace = \n"
                                      "flag = true\n"
                                      "grid = 1, 2.5, 10\n");
  Config cfg = Config::from_file(path);
  CHECK(cfg.get_int("model.a_bytes") == 560);
  CHECK(cfg.get_double("model.gamma") == doctest::Approx(0.015));
  CHECK(cfg.get_string("sim.trace").empty());
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_bool("absent", true));
  const auto grid = cfg.get_double_list("grid");
  REQUIRE(grid.size() == 3);
  CHECK(grid[1] == doctest::Approx(2.5));

  SUBCASE("overrides win") {
    cfg.apply_override("model.a_bytes=1024");
    CHECK(cfg.get_int("model.a_bytes") == 1024);
    CHECK_THROWS_AS(cfg.apply_override("no-equals-sign"), parameter_error);
  }
  SUBCASE("missing keys name themselves") {
    CHECK_THROWS_WITH_AS(cfg.get_string("nope"),
                         doctest::Contains("nope"), parameter_error);
  }
  SUBCASE("type errors") {
    cfg.set("bad", "abc");
    CHECK_THROWS_AS(cfg.get_double("bad"), parameter_error);
    CHECK_THROWS_AS(cfg.get_int("bad"), parameter_error);
    CHECK_THROWS_AS(cfg.get_bool("bad", true), parameter_error);
  }
}

TEST_CASE("config file errors carry path and line") {
  const std::string path = write_temp("txamp_bad_config.conf", "ok = 1\nnot a pair\n");
  try {
    Config::from_file(path);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 2);
    CHECK(e.path() == path);
  }
  CHECK_THROWS_AS(Config::from_file("/nonexistent/definitely_missing.conf"), parse_error);
}

TEST_CASE("csv splitting and row iteration") {
  const auto fields = io::split_csv(" a , b,c ,, d ");
  REQUIRE(fields.size() == 5);
  CHECK(fields[0] == "a");
  CHECK(fields[3].empty());
  CHECK(fields[4] == "d");

  const std::string path = write_temp("txamp_rows.csv",
                                      "# header comment\n"
                                      "1, x\n"
                                      "\n"
                                      "2, y\n");
  std::size_t rows = 0;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& f) {
    ++rows;
    if (rows == 1) CHECK(line == 2);
    CHECK(f.size() == 2);
  });
  CHECK(rows == 2);
}

TEST_CASE("numeric field parsing reports path and line") {
  CHECK(io::parse_int("42", "f", 1) == 42);
  CHECK(io::parse_uint("18446744073709551615", "f", 1) == 18446744073709551615ULL);
  CHECK(io::parse_double("2.5e3", "f", 1) == doctest::Approx(2500.0));
  try {
    io::parse_int("4x", "somefile.csv", 7);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.path() == "somefile.csv");
    CHECK(e.line() == 7);
  }
}

TEST_CASE("date parsing") {
  CHECK(io::parse_date_to_epoch_day("1970-01-01", "f", 1) == 0);
  CHECK(io::parse_date_to_epoch_day("1970-01-02", "f", 1) == 1);
  CHECK(io::parse_date_to_epoch_day("2000-01-01", "f", 1) == 10957);
  CHECK(io::parse_date_to_epoch_day("2023-09-01", "f", 1) == 19601);
  CHECK_THROWS_AS(io::parse_date_to_epoch_day("2023/09/01", "f", 1), parse_error);
}

TEST_CASE("six significant digit rendering is stable") {
  CHECK(io::format_sig(105.92) == "105.92");
  CHECK(io::format_sig(2035404.0) == "2.0354e+06");
  CHECK(io::format_sig(0.0334973) == "0.0334973");
  CHECK(io::format_sig(1.0) == "1");
}
