#include "dgpe/multipliers.hpp"

#include <cmath>

#include "dgpe/errors.hpp"
#include "dgpe/fft.hpp"
#include "dgpe/reductions.hpp"

namespace dgpe {

MultiplierField& MultiplierField::operator+=(const MultiplierField& o) {
  if (!(grid_ == o.grid())) throw ShapeError("multiplier: grid mismatch");
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < size(); ++i) v_[std::size_t(i)] += o[i];
  return *this;
}

MultiplierField& MultiplierField::operator*=(double s) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < size(); ++i) v_[std::size_t(i)] *= s;
  return *this;
}

MultiplierField operator+(MultiplierField a, const MultiplierField& b) {
  a += b;
  return a;
}

MultiplierField operator*(double s, MultiplierField a) {
  a *= s;
  return a;
}

MultiplierField dipolar_multiplier(const GridSpec& g) {
  return make_multiplier(g, [](double x1, double x2, double x3) {
    const double r2 = x1 * x1 + x2 * x2 + x3 * x3;
    return (4.0 * M_PI / 3.0) * (2.0 * x3 * x3 - x1 * x1 - x2 * x2) / r2;
  });
}

namespace {

void require_axis(int a) {
  if (a < 1 || a > 3) throw ConfigError("riesz multiplier: axis must be 1..3");
}

inline double pick(double x1, double x2, double x3, int axis) {
  return axis == 1 ? x1 : axis == 2 ? x2 : x3;
}

}  // namespace

MultiplierField riesz_square(const GridSpec& g, int axis) {
  require_axis(axis);
  return make_multiplier(g, [axis](double x1, double x2, double x3) {
    const double a = pick(x1, x2, x3, axis);
    return a * a / (x1 * x1 + x2 * x2 + x3 * x3);
  });
}

MultiplierField riesz_fourth(const GridSpec& g, int axis) {
  require_axis(axis);
  return make_multiplier(g, [axis](double x1, double x2, double x3) {
    const double a = pick(x1, x2, x3, axis);
    const double r2 = x1 * x1 + x2 * x2 + x3 * x3;
    return (a * a / r2) * (a * a / r2);
  });
}

MultiplierField riesz_cross(const GridSpec& g, int a, int b) {
  require_axis(a);
  require_axis(b);
  if (a == b) throw ConfigError("riesz_cross: axes must differ");
  return make_multiplier(g, [a, b](double x1, double x2, double x3) {
    const double u = pick(x1, x2, x3, a);
    const double v = pick(x1, x2, x3, b);
    const double r2 = x1 * x1 + x2 * x2 + x3 * x3;
    return (u * u / r2) * (v * v / r2);
  });
}

MultiplierField laplacian_symbol(const GridSpec& g) {
  return make_multiplier(g, [](double x1, double x2, double x3) {
    return x1 * x1 + x2 * x2 + x3 * x3;
  });
}

Field apply_multiplier(const Field& f, const MultiplierField& m) {
  if (!(f.grid() == m.grid()))
    throw ShapeError("apply_multiplier: grid mismatch");
  Field out = (f.space() == Space::physical) ? to_frequency(f) : f;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= m[i];
  to_physical_inplace(out);
  check_finite(out, "apply_multiplier");
  return out;
}

Field dipolar_potential(const Field& rho) {
  if (rho.space() != Space::physical)
    throw ShapeError("dipolar_potential: expects a physical-space density");
  const double scale = max_abs(rho);
  const double max_imag = det_max(std::size_t(rho.size()), [&](std::size_t i) {
    return std::abs(rho[std::int64_t(i)].imag());
  });
  if (max_imag > 1e-12 * scale)
    throw InputError("dipolar_potential: density is not real");

  Field phi = apply_multiplier(rho, dipolar_multiplier(rho.grid()));
  const double phi_scale = max_abs(phi);
  const double residue = det_max(std::size_t(phi.size()), [&](std::size_t i) {
    return std::abs(phi[std::int64_t(i)].imag());
  });
  if (phi_scale > 0.0 && residue > 1e-10 * phi_scale)
    throw NumericalHealthError("dipolar_potential: imaginary residue");
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < phi.size(); ++i) phi[i] = cplx(phi[i].real(), 0.0);
  return phi;
}

}  // namespace dgpe
