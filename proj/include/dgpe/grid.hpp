#pragma once

#include <cmath>
#include <cstdint>

#include "dgpe/errors.hpp"

namespace dgpe {

// Uniform periodic box [-L, L)^3 with n samples per axis (n even).
// Physical nodes x_j = -L + j*h, h = 2L/n.  Frequency nodes xi_k = pi*k/L with
// k in {-n/2, ..., n/2-1}, stored in DFT order (index m: k = m for m < n/2,
// k = m - n otherwise).  Flat index = (i1*n + i2)*n + i3, i3 fastest.
struct GridSpec {
  int n = 0;
  double half_width = 0.0;

  double spacing() const { return 2.0 * half_width / n; }
  std::int64_t size() const { return std::int64_t(n) * n * n; }
  double cell_volume() const { return spacing() * spacing() * spacing(); }
  // Total box volume (2L)^3; also the Parseval weight 8L^3.
  double box_volume() const {
    return 8.0 * half_width * half_width * half_width;
  }

  double coord(int j) const { return -half_width + j * spacing(); }
  int wavenumber(int m) const { return m < n / 2 ? m : m - n; }
  double freq(int m) const { return M_PI * wavenumber(m) / half_width; }

  bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(int n, double half_width) {
  if (n < 8 || n % 2 != 0)
    throw ConfigError("grid: n must be even and >= 8");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("grid: half_width must be positive and finite");
  return GridSpec{n, half_width};
}

// Decomposes a flat index into axis indices (i1 slowest).
struct GridIndex {
  int i1, i2, i3;
};

inline GridIndex split_index(const GridSpec& g, std::int64_t idx) {
  const int n = g.n;
  const int i3 = int(idx % n);
  const int i2 = int((idx / n) % n);
  const int i1 = int(idx / (std::int64_t(n) * n));
  return {i1, i2, i3};
}

}  // namespace dgpe
