#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gfzf/errors.hpp"
#include "gfzf/io.hpp"

namespace gfzf {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, long line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("trace line " + std::to_string(line) + ": cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_trace_csv(std::ostream& out, const std::vector<StepReport>& rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.E_orig) << ',' << format_double(r.E_mod)
        << ',' << format_double(r.R) << ',' << format_double(r.F_int) << ',' << format_double(r.p_value) << ','
        << format_double(r.s_value) << ',' << format_double(r.lambda0) << ',' << format_double(r.kappa) << ','
        << format_double(r.dissipation) << ',' << r.branch << '\n';
  }
}

std::vector<StepReport> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("trace is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw IoError("trace header does not match the expected columns");
  std::vector<StepReport> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 12) throw IoError("trace line " + std::to_string(lineno) + " does not have 12 columns");
    StepReport r;
    r.step = static_cast<long>(parse_double(cells[0], lineno));
    r.t = parse_double(cells[1], lineno);
    r.E_orig = parse_double(cells[2], lineno);
    r.E_mod = parse_double(cells[3], lineno);
    r.R = parse_double(cells[4], lineno);
    r.F_int = parse_double(cells[5], lineno);
    r.p_value = parse_double(cells[6], lineno);
    r.s_value = parse_double(cells[7], lineno);
    r.lambda0 = parse_double(cells[8], lineno);
    r.kappa = parse_double(cells[9], lineno);
    r.dissipation = parse_double(cells[10], lineno);
    r.branch = cells[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

void save_trace_csv(const std::filesystem::path& path, const std::vector<StepReport>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace '" + path.string() + "'");
  write_trace_csv(out, rows);
  if (!out) throw IoError("failed writing trace '" + path.string() + "'");
}

std::vector<StepReport> load_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trace '" + path.string() + "'");
  return read_trace_csv(in);
}

}  // namespace gfzf
