#include "stochcal/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "stochcal/errors.hpp"

namespace stochcal::io {

namespace {

constexpr const char* kModule = "io";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return !s.empty();
}

// YYYY-MM-DD, optionally followed by 'T' or ' ' and a time of day.
bool is_iso_date(std::string_view s) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
  if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) || !all_digits(s.substr(8, 2))) {
    return false;
  }
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  fail(ErrorCode::ParseError, kModule, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace

DatedSeries parse_csv(std::string_view text, double dt) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::string> dates;
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) parse_error(line_no, "expected two comma-separated columns");
    const std::string_view date = trim(line.substr(0, comma));
    const std::string_view value = trim(line.substr(comma + 1));
    if (value.find(',') != std::string_view::npos) parse_error(line_no, "more than two columns");
    double v = 0.0;
    const bool ok_date = is_iso_date(date);
    const bool ok_value = parse_double(value, v);
    if (!ok_date || !ok_value) {
      if (dates.empty() && values.empty() && !ok_date && !ok_value) continue;  // header row
      parse_error(line_no, ok_date ? "value is not a finite decimal number"
                                   : "date is not ISO-8601 (YYYY-MM-DD)");
    }
    if (!dates.empty() && !(dates.back() < date)) {
      fail(ErrorCode::NonMonotoneDates, kModule,
           "line " + std::to_string(line_no) + ": date " + std::string(date) +
               " does not follow " + dates.back());
    }
    dates.emplace_back(date);
    values.push_back(v);
  }
  if (values.empty()) fail(ErrorCode::ParseError, kModule, "no observations in input");
  if (values.size() < 2) fail(ErrorCode::ParseError, kModule, "need at least two observations");
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  return {std::move(dates), TimeSeries(std::move(values), dt)};
}

DatedSeries ingest_csv(const std::string& path, double dt) { return parse_csv(read_file(path), dt); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, kModule, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, kModule, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::IoError, kModule, "write failed for " + path);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace stochcal::io
