#include "dgpe/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "dgpe/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace dgpe {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'P', 'E'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const Field& u, double t) {
  if (u.space() != Space::physical)
    throw ShapeError("checkpoint: physical-space state expected");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("checkpoint: cannot open " + path);
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, std::uint32_t(u.grid().n));
  put(os, u.grid().half_width);
  put(os, t);
  // std::complex<double> is layout-compatible with (re, im) f64 pairs.
  os.write(reinterpret_cast<const char*>(u.data()),
           std::streamsize(u.size()) * 2 * std::streamsize(sizeof(double)));
  if (!os) throw ConfigError("checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("checkpoint: bad magic in " + path);
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion)
    throw ConfigError("checkpoint: unsupported version in " + path);
  const auto n = get<std::uint32_t>(is);
  const auto half_width = get<double>(is);
  const auto t = get<double>(is);
  if (!is) throw ConfigError("checkpoint: truncated header in " + path);

  Checkpoint cp{Field(make_grid(int(n), half_width), Space::physical), t};
  is.read(reinterpret_cast<char*>(cp.u.data()),
          std::streamsize(cp.u.size()) * 2 * std::streamsize(sizeof(double)));
  if (!is) throw ConfigError("checkpoint: truncated payload in " + path);
  return cp;
}

}  // namespace dgpe
