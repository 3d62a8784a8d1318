#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gfzf/errors.hpp"
#include "gfzf/io.hpp"

namespace gfzf {

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0x00000000000000FFULL) << 56) | ((v & 0x000000000000FF00ULL) << 40) |
        ((v & 0x0000000000FF0000ULL) << 24) | ((v & 0x00000000FF000000ULL) << 8) |
        ((v & 0x000000FF00000000ULL) >> 8) | ((v & 0x0000FF0000000000ULL) >> 24) |
        ((v & 0x00FF000000000000ULL) >> 40) | ((v & 0xFF00000000000000ULL) >> 56);
  }
  return v;
}

}  // namespace

Snapshot Snapshot::of(const Field& f, double time, std::string model) {
  return {f.grid.dims, f.grid.extents, time, std::move(model),
          std::vector<double>(f.values.data(), f.values.data() + f.values.size())};
}

Field Snapshot::field() const {
  const GridSpec g = make_grid(dims, extents);
  return Field(g, Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

std::string write_snapshot(const Snapshot& s) {
  if (s.dims.size() != s.extents.size() || s.dims.empty()) throw InvalidArgument("snapshot dims/extents mismatch");
  if (s.model.empty() || s.model.find_first_of(" \n") != std::string::npos) {
    throw InvalidArgument("snapshot model name must be a non-empty word");
  }
  std::size_t n = 1;
  for (int d : s.dims) n *= static_cast<std::size_t>(d);
  if (n != s.values.size()) throw InvalidArgument("snapshot payload does not match dims");

  std::string out = "GFZF1 " + std::to_string(s.dims.size());
  for (int d : s.dims) out += " " + std::to_string(d);
  for (double e : s.extents) out += " " + format_double(e);
  out += " " + format_double(s.time) + " " + s.model + "\n";
  const std::size_t head = out.size();
  out.resize(head + 8 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(s.values[i]));
    std::memcpy(out.data() + head + 8 * i, &bits, 8);
  }
  return out;
}

Snapshot read_snapshot(std::string_view bytes) {
  const auto eol = bytes.find('\n');
  if (eol == std::string_view::npos) throw IoError("snapshot has no header line");
  std::istringstream header{std::string(bytes.substr(0, eol))};
  std::string tag;
  header >> tag;
  if (tag != "GFZF1") throw IoError("snapshot tag '" + tag + "' is not GFZF1");
  std::size_t axes = 0;
  if (!(header >> axes) || axes < 1 || axes > 3) throw IoError("snapshot header has a bad axis count");

  Snapshot s;
  s.dims.resize(axes);
  s.extents.resize(axes);
  std::string token;
  for (auto& d : s.dims) {
    if (!(header >> d) || d <= 0) throw IoError("snapshot header has a bad dim");
  }
  for (auto& e : s.extents) {
    if (!(header >> token)) throw IoError("snapshot header is missing extents");
    e = std::stod(token);
  }
  if (!(header >> token)) throw IoError("snapshot header is missing the time");
  s.time = std::stod(token);
  if (!(header >> s.model)) throw IoError("snapshot header is missing the model name");

  std::size_t n = 1;
  for (int d : s.dims) n *= static_cast<std::size_t>(d);
  const std::string_view payload = bytes.substr(eol + 1);
  if (payload.size() != 8 * n) {
    throw IoError("snapshot payload has " + std::to_string(payload.size()) + " bytes, expected " +
                  std::to_string(8 * n));
  }
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, payload.data() + 8 * i, 8);
    s.values[i] = std::bit_cast<double>(to_little(bits));
  }
  return s;
}

void save_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write snapshot '" + path.string() + "'");
  const std::string bytes = write_snapshot(s);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing snapshot '" + path.string() + "'");
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read snapshot '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_snapshot(ss.str());
}

}  // namespace gfzf
