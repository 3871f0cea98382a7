#include "nullcone/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "nullcone/errors.hpp"

namespace nullcone {

namespace {
static_assert(sizeof(double) == 8, "snapshot format assumes 64-bit doubles");

bool machine_is_little_endian() {
  const std::uint16_t probe = 1;
  unsigned char byte0;
  std::memcpy(&byte0, &probe, 1);
  return byte0 == 1;
}

void byteswap_doubles(std::vector<double>& v) {
  for (double& d : v) {
    unsigned char b[8];
    std::memcpy(b, &d, 8);
    std::swap(b[0], b[7]);
    std::swap(b[1], b[6]);
    std::swap(b[2], b[5]);
    std::swap(b[3], b[4]);
    std::memcpy(&d, b, 8);
  }
}
}  // namespace

void write_snapshot(const ScalarField& f, const std::string& path, SnapshotFormat format) {
  const auto& g = f.grid();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_snapshot: cannot open '" + path + "'");
  out << g.nlat() << ' ' << g.nlon() << ' ' << g.lmax() << '\n';
  if (format == SnapshotFormat::Text) {
    out.precision(17);
    const auto& v = f.values();
    for (int i = 0; i < g.nlat(); ++i) {
      for (int j = 0; j < g.nlon(); ++j) {
        out << v[g.node_index(i, j)];
        out << (j + 1 == g.nlon() ? '\n' : ' ');
      }
    }
  } else {
    std::vector<double> v = f.values();
    if (!machine_is_little_endian()) byteswap_doubles(v);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw Error("write_snapshot: write failed for '" + path + "'");
}

ScalarField read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_snapshot: cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw Error("read_snapshot: missing header in '" + path + "'");
  int nlat = 0, nlon = 0, lmax = 0;
  {
    std::istringstream hs(header);
    if (!(hs >> nlat >> nlon >> lmax))
      throw Error("read_snapshot: malformed header in '" + path + "'");
  }
  auto grid = SphericalGrid::create(nlat, nlon, lmax);
  const std::size_t count = static_cast<std::size_t>(nlat) * nlon;

  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<double> values(count);
  if (payload.size() == count * sizeof(double)) {
    std::memcpy(values.data(), payload.data(), payload.size());
    if (!machine_is_little_endian()) byteswap_doubles(values);
  } else {
    std::istringstream ps(payload);
    for (std::size_t k = 0; k < count; ++k)
      if (!(ps >> values[k]))
        throw Error("read_snapshot: truncated text payload in '" + path + "'");
  }
  return ScalarField(grid, std::move(values));
}

}  // namespace nullcone
