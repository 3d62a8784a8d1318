#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gfzf/field.hpp"
#include "gfzf/schemes.hpp"

namespace gfzf {

/// GFZF1 field snapshot: one text header line
///   "GFZF1 <axes> <dims...> <extents...> <time> <model>\n"
/// followed by the values as little-endian float64, row-major.
struct Snapshot {
  std::vector<int> dims;
  std::vector<double> extents;
  double time = 0.0;
  std::string model;
  std::vector<double> values;

  static Snapshot of(const Field& f, double time, std::string model);
  [[nodiscard]] Field field() const;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

std::string write_snapshot(const Snapshot& s);
/// Throws IoError on a bad tag, malformed header or payload length mismatch.
Snapshot read_snapshot(std::string_view bytes);

void save_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot load_snapshot(const std::filesystem::path& path);

/// Exact CSV header of an energy trace.
inline constexpr std::string_view kTraceHeader =
    "step,t,E_orig,E_mod,R,F_int,p_value,s_value,lambda0,kappa,dissipation,branch";

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

void write_trace_csv(std::ostream& out, const std::vector<StepReport>& rows);
/// Reads the columns of kTraceHeader back; other StepReport fields stay default.
std::vector<StepReport> read_trace_csv(std::istream& in);

void save_trace_csv(const std::filesystem::path& path, const std::vector<StepReport>& rows);
std::vector<StepReport> load_trace_csv(const std::filesystem::path& path);

}  // namespace gfzf
