#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>

#include "doctest.h"
#include "stochcal/errors.hpp"
#include "stochcal/io.hpp"

using namespace stochcal;
using namespace stochcal::io;

namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorCode::InvalidParam, "test", "unreachable");
}

}  // namespace

TEST_CASE("two daily rows") {
  const auto d = parse_csv("2020-01-01,100\n2020-01-02,101", 1.0 / 252.0);
  CHECK(d.series.size() == 2);
  CHECK(d.series.dt() == 1.0 / 252.0);
  CHECK(d.series.values()[0] == 100.0);
  CHECK(d.series.values()[1] == 101.0);
  CHECK(d.dates == std::vector<std::string>{"2020-01-01", "2020-01-02"});
}

TEST_CASE("header, bom, quotes, crlf and blank lines") {
  const std::string text =
      "\xEF\xBB\xBF"
      "date,close\r\n"
      "\r\n"
      "\"2021-03-01\", 1.5e2\r\n"
      "2021-03-02T16:00:00,151.25\r\n"
      "2021-03-03 16:00,-0.5\r\n";
  const auto d = parse_csv(text, 1.0 / 52.0);
  REQUIRE(d.series.size() == 3);
  CHECK(d.series.values()[0] == 150.0);
  CHECK(d.series.values()[2] == -0.5);
  CHECK(d.series.dt() == 1.0 / 52.0);
}

TEST_CASE("malformed input") {
  CHECK(error_of([] { parse_csv("", 1.0); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_csv("\n\n", 1.0); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_csv("date,value\n", 1.0); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_csv("2020-01-01,1\n", 1.0); }).code() == ErrorCode::ParseError);

  const auto bad_value = error_of([] { parse_csv("d,v\n2020-01-01,1\n2020-01-02,abc\n2020-01-03,2\n", 1.0); });
  CHECK(bad_value.code() == ErrorCode::ParseError);
  CHECK(std::string(bad_value.what()).find("line 3") != std::string::npos);

  const auto bad_date = error_of([] { parse_csv("2020-01-01,1\n2020-13-02,2\n", 1.0); });
  CHECK(bad_date.code() == ErrorCode::ParseError);
  CHECK(std::string(bad_date.what()).find("line 2") != std::string::npos);

  CHECK(error_of([] { parse_csv("2020-01-01,1,7\n2020-01-02,2\n", 1.0); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_csv("2020-01-01,nan\n2020-01-02,2\n", 1.0); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_csv("2020-01-01,1\n2020-01-02,2\n", 0.0); }).code() == ErrorCode::InvalidParam);
}

TEST_CASE("dates must increase") {
  CHECK(error_of([] { parse_csv("2020-01-02,1\n2020-01-01,2\n2020-01-03,3\n", 1.0); }).code() ==
        ErrorCode::NonMonotoneDates);
  CHECK(error_of([] { parse_csv("2020-01-01,1\n2020-01-01,2\n", 1.0); }).code() ==
        ErrorCode::NonMonotoneDates);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "stochcal_test_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "series.csv").string();
  write_file(path, "date,value\n2020-01-01,1\n2020-01-02,2\n2020-01-03,4\n");
  const auto d = ingest_csv(path, 1.0 / 252.0);
  CHECK(d.series.size() == 3);
  CHECK(read_file(path).substr(0, 10) == "date,value");
  CHECK(error_of([&] { ingest_csv((dir / "missing.csv").string(), 1.0); }).code() == ErrorCode::IoError);
  CHECK(error_of([&] { write_file((dir / "no" / "such" / "x.csv").string(), "x"); }).code() == ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(100.0) == "100");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  for (double v : {1.0 / 3.0, 6.02214076e23, -2.5e-300, 1.0 / 252.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(csv_table({"a", "b"}, {{1.0, 0.5}, {2.0, -3.0}}) == "a,b\n1,0.5\n2,-3\n");
}
