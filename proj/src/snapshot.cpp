#include "cld/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace cld {

namespace {

constexpr char kMagic[4] = {'C', 'L', 'F', 'D'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw error(std::string("snapshot: truncated while reading ") + what);
  return v;
}

} // namespace

void write_snapshot(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("snapshot: cannot open '" + path + "' for writing");
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(f.grid.spatial_dims));
  put(os, static_cast<std::uint8_t>(f.grid.has_time ? 1 : 0));
  put(os, static_cast<std::uint32_t>(f.n_components));
  for (std::size_t e : f.grid.extents) put(os, static_cast<std::uint64_t>(e));
  for (double h : f.grid.spacings) put(os, h);
  for (std::uint8_t p : f.grid.periodic) put(os, p);
  for (const std::string& name : f.component_names) {
    put(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!os) throw error("snapshot: write failed for '" + path + "'");
}

Field read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw error("snapshot: cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw error("snapshot: '" + path + "' is not a field snapshot (bad magic)");
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kVersion)
    throw error("snapshot: unsupported version " + std::to_string(version));
  const auto k = get<std::uint32_t>(is, "spatial dims");
  const auto has_time = get<std::uint8_t>(is, "time flag");
  const auto n = get<std::uint32_t>(is, "component count");
  const std::size_t axes = k + (has_time ? 1u : 0u);
  std::vector<std::size_t> extents(axes);
  std::vector<double> spacings(axes);
  std::vector<std::uint8_t> periodic(axes);
  for (std::size_t a = 0; a < axes; ++a) extents[a] = get<std::uint64_t>(is, "extent");
  for (std::size_t a = 0; a < axes; ++a) spacings[a] = get<double>(is, "spacing");
  for (std::size_t a = 0; a < axes; ++a) periodic[a] = get<std::uint8_t>(is, "periodic flag");
  Grid grid = make_grid(static_cast<int>(k), std::move(extents), std::move(spacings),
                        std::move(periodic), has_time != 0);
  std::vector<std::string> names;
  for (std::uint32_t c = 0; c < n; ++c) {
    const auto len = get<std::uint32_t>(is, "name length");
    std::string name(len, '\0');
    is.read(name.data(), len);
    if (!is) throw error("snapshot: truncated while reading component name");
    names.push_back(std::move(name));
  }
  Field f = make_field(std::move(grid), static_cast<int>(n), std::move(names));
  is.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(f.data.size() * sizeof(double)))
    throw error("snapshot: truncated payload in '" + path + "'");
  require_finite(f);
  return f;
}

} // namespace cld
