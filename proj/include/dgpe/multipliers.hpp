#pragma once

#include <vector>

#include "dgpe/field.hpp"

namespace dgpe {

// Real frequency-space symbol sampled on a grid's frequency nodes, stored in
// the same DFT order as Field frequency data.
class MultiplierField {
 public:
  MultiplierField() = default;
  explicit MultiplierField(const GridSpec& g) : grid_(g), v_(g.size()) {}

  const GridSpec& grid() const { return grid_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::int64_t i) { return v_[std::size_t(i)]; }
  const double& operator[](std::int64_t i) const { return v_[std::size_t(i)]; }
  std::int64_t size() const { return std::int64_t(v_.size()); }

  MultiplierField& operator+=(const MultiplierField& o);
  MultiplierField& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<double> v_;
};

MultiplierField operator+(MultiplierField a, const MultiplierField& b);
MultiplierField operator*(double s, MultiplierField a);

// Builds a symbol from fn(xi1, xi2, xi3).  The zero mode is set by zero_value
// (symbols here are 0-homogeneous with no limit at the origin; the convention
// fixed across the project is value 0 at xi = 0).
template <class Fn>
MultiplierField make_multiplier(const GridSpec& g, Fn&& fn,
                                double zero_value = 0.0) {
  MultiplierField m(g);
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < g.size(); ++idx) {
    const auto [m1, m2, m3] = split_index(g, idx);
    m[idx] = (m1 == 0 && m2 == 0 && m3 == 0)
                 ? zero_value
                 : fn(g.freq(m1), g.freq(m2), g.freq(m3));
  }
  return m;
}

// Dipolar symbol (4pi/3)(2 xi3^2 - xi1^2 - xi2^2)/|xi|^2, range [-4pi/3, 8pi/3].
MultiplierField dipolar_multiplier(const GridSpec& g);

// Riesz-quotient symbols, all 0 at the zero mode.  axis arguments are 1-based.
MultiplierField riesz_square(const GridSpec& g, int axis);   // xi_j^2/|xi|^2
MultiplierField riesz_fourth(const GridSpec& g, int axis);   // xi_j^4/|xi|^4
MultiplierField riesz_cross(const GridSpec& g, int a, int b);  // xi_a^2 xi_b^2/|xi|^4

// |xi|^2 (Laplacian magnitude symbol; zero mode genuinely 0).
MultiplierField laplacian_symbol(const GridSpec& g);

// IFFT(m . FFT(f)); accepts f in either space, returns a physical-space field.
Field apply_multiplier(const Field& f, const MultiplierField& m);

// K * rho for a real density rho: checks rho is real to 1e-12 relative, runs
// the dipolar multiplier, verifies the imaginary residue is below 1e-10
// relative, and returns the real part.
Field dipolar_potential(const Field& rho);

}  // namespace dgpe
