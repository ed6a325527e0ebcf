// SPDX-License-Identifier: Apache-2.0

#include "parpinc/harness.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace parpinc {

namespace {

constexpr const char* kTrajectoryHeader =
    "experiment,trial,iter,antenna,par_db,pinc_db,evm_resid,oob_resid";
constexpr const char* kCcdfHeader = "iter,metric,value_db";
constexpr const char* kSummaryHeader = "iter,par_p99_db,pinc_p99_db";

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing: " +
                             std::strerror(errno));
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "': " + std::strerror(errno));
  }
  return in;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line_no,
                              const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) parse_error(path, line_no, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_error(path, line_no, "not a number: '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) parse_error(path, line_no, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_error(path, line_no, "not an integer: '" + s + "'");
  }
}

std::optional<double> parse_optional(const std::string& s, const std::filesystem::path& path,
                                     std::size_t line_no) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, path, line_no);
}

void expect_header(std::ifstream& in, const char* header, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line) || line != header) parse_error(path, 1, "unexpected header");
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << kTrajectoryHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.trial << ',' << r.iter << ',' << r.antenna << ','
        << optional_field(r.par_db) << ',' << optional_field(r.pinc_db) << ','
        << optional_field(r.evm_resid) << ',' << optional_field(r.oob_resid) << '\n';
  }
  finish(out, path);
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  expect_header(in, kTrajectoryHeader, path);
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) parse_error(path, line_no, "expected 8 fields");
    ResultRow r;
    r.experiment = f[0];
    r.trial = parse_int(f[1], path, line_no);
    r.iter = parse_int(f[2], path, line_no);
    r.antenna = parse_int(f[3], path, line_no);
    r.par_db = parse_optional(f[4], path, line_no);
    r.pinc_db = parse_optional(f[5], path, line_no);
    r.evm_resid = parse_optional(f[6], path, line_no);
    r.oob_resid = parse_optional(f[7], path, line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_ccdf(const std::vector<CcdfSample>& samples, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << kCcdfHeader << '\n';
  for (const auto& s : samples) {
    out << s.iter << ',' << s.metric << ',' << format_number(s.value_db) << '\n';
  }
  finish(out, path);
}

std::vector<CcdfSample> read_ccdf(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  expect_header(in, kCcdfHeader, path);
  std::vector<CcdfSample> out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 3) parse_error(path, line_no, "expected 3 fields");
    out.push_back({parse_int(f[0], path, line_no), f[1], parse_double(f[2], path, line_no)});
  }
  return out;
}

void emit_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.iter << ',' << format_number(r.par_p99_db) << ',' << format_number(r.pinc_p99_db)
        << '\n';
  }
  finish(out, path);
}

void emit_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& [k, v] : manifest.entries()) out << k << '=' << v << '\n';
  finish(out, path);
}

std::vector<std::pair<std::string, std::string>> read_key_values(
    const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(path, line_no, "expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace parpinc
