#pragma once

#include <complex>
#include <vector>

#include "dgpe/grid.hpp"

namespace dgpe {

using cplx = std::complex<double>;

enum class Space { physical, frequency };

// Complex scalar field on a GridSpec, tagged with the space its samples live
// in.  Physical samples are u(x_j); frequency samples are the continuum-
// normalized coefficients u_hat(xi_k) (forward kernel e^{-i x.xi}, factor
// (2pi)^{-3} on inversion).  Value semantics; safe to move across threads.
class Field {
 public:
  Field() = default;
  Field(const GridSpec& g, Space s) : grid_(g), space_(s), v_(g.size()) {}

  const GridSpec& grid() const { return grid_; }
  Space space() const { return space_; }
  Space& space_tag() { return space_; }

  std::int64_t size() const { return std::int64_t(v_.size()); }
  cplx* data() { return v_.data(); }
  const cplx* data() const { return v_.data(); }
  cplx& operator[](std::int64_t i) { return v_[std::size_t(i)]; }
  const cplx& operator[](std::int64_t i) const { return v_[std::size_t(i)]; }

 private:
  GridSpec grid_;
  Space space_ = Space::physical;
  std::vector<cplx> v_;
};

// Builds a physical-space field by sampling fn(x1, x2, x3) at the nodes.
template <class Fn>
Field make_field(const GridSpec& g, Fn&& fn) {
  Field f(g, Space::physical);
  const int n = g.n;
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < g.size(); ++idx) {
    const auto [i1, i2, i3] = split_index(g, idx);
    f[idx] = fn(g.coord(i1), g.coord(i2), g.coord(i3));
    (void)n;
  }
  return f;
}

// Throws NumericalHealthError if any sample is NaN/Inf.
void check_finite(const Field& f, const char* what);

double max_abs(const Field& f);

}  // namespace dgpe
