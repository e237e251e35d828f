#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stochcal/core.hpp"

namespace stochcal::io {

struct DatedSeries {
  std::vector<std::string> dates;
  TimeSeries series;
};

/// Two-column CSV of ISO-8601 date and decimal value, optional header row,
/// UTF-8 (a leading BOM is skipped). dt is supplied by the caller; dates are
/// only checked to increase strictly.
/// Throws ParseError (with the line number) or NonMonotoneDates.
DatedSeries parse_csv(std::string_view text, double dt);
/// As parse_csv on a file; IoError if it cannot be read.
DatedSeries ingest_csv(const std::string& path, double dt);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Writes content to path, throwing IoError on failure.
void write_file(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

/// Plain CSV with a header row.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

}  // namespace stochcal::io
