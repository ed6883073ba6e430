#include "dgpe/reference.hpp"

#include <cmath>

#include "dgpe/errors.hpp"
#include "dgpe/fft.hpp"

namespace dgpe::ref {

double sum_serial(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

Field forward_direct(const Field& f) {
  if (f.space() != Space::physical)
    throw ShapeError("forward_direct: physical-space input expected");
  const GridSpec& g = f.grid();
  const int n = g.n;
  const std::int64_t n64 = n;

  // DFT matrix w[k][j] = e^{-i x_j xi_k} (centered phases included directly).
  std::vector<cplx> w(std::size_t(n) * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      w[std::size_t(k) * n + j] = std::polar(1.0, -g.coord(j) * g.freq(k));

  Field cur = f;
  // Contract each axis in turn; axis order does not matter.
  for (int axis = 3; axis >= 1; --axis) {
    Field next(g, Space::physical);
    const std::int64_t stride =
        (axis == 3) ? 1 : (axis == 2) ? n64 : n64 * n64;
    const std::int64_t nlines = n64 * n64;
    for (std::int64_t line = 0; line < nlines; ++line) {
      const std::int64_t a = line / n64;
      const std::int64_t b = line % n64;
      std::int64_t start;
      if (axis == 3) start = line * n64;
      else if (axis == 2) start = a * n64 * n64 + b;
      else start = a * n64 + b;
      for (int k = 0; k < n; ++k) {
        cplx acc = 0.0;
        const cplx* row = &w[std::size_t(k) * n];
        for (int j = 0; j < n; ++j) acc += row[j] * cur[start + j * stride];
        next[start + k * stride] = acc;
      }
    }
    cur = std::move(next);
  }

  const double h3 = g.cell_volume();
  for (std::int64_t i = 0; i < cur.size(); ++i) cur[i] *= h3;
  cur.space_tag() = Space::frequency;
  return cur;
}

Field apply_multiplier_serial(const Field& f, const MultiplierField& m) {
  if (!(f.grid() == m.grid()))
    throw ShapeError("apply_multiplier_serial: grid mismatch");
  Field out = f;
  if (out.space() == Space::physical) forward_serial(out);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= m[i];
  backward_serial(out);
  return out;
}

}  // namespace dgpe::ref
