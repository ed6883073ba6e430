#include "dgpe/functionals.hpp"

#include <cmath>

#include "dgpe/errors.hpp"
#include "dgpe/fft.hpp"
#include "dgpe/reductions.hpp"

namespace dgpe {

namespace {

double abs2(cplx v) { return v.real() * v.real() + v.imag() * v.imag(); }

}  // namespace

double mass(const Field& u) {
  const double s = det_sum(std::size_t(u.size()), [&](std::size_t i) {
    return abs2(u[std::int64_t(i)]);
  });
  return u.space() == Space::physical ? s * u.grid().cell_volume()
                                      : s / u.grid().box_volume();
}

double kinetic(const Field& u) {
  const Field* hat = &u;
  Field tmp;
  if (u.space() == Space::physical) {
    tmp = to_frequency(u);
    hat = &tmp;
  }
  const GridSpec& g = u.grid();
  const int n = g.n;
  const double s = det_sum(std::size_t(u.size()), [&](std::size_t i) {
    const auto [m1, m2, m3] = split_index(g, std::int64_t(i));
    const double x1 = g.freq(m1), x2 = g.freq(m2), x3 = g.freq(m3);
    (void)n;
    return (x1 * x1 + x2 * x2 + x3 * x3) * abs2((*hat)[std::int64_t(i)]);
  });
  return s / g.box_volume();
}

double norm_l4_pow4(const Field& u) {
  if (u.space() != Space::physical)
    throw ShapeError("norm_l4_pow4: physical-space field expected");
  return u.grid().cell_volume() *
         det_sum(std::size_t(u.size()), [&](std::size_t i) {
           const double a = abs2(u[std::int64_t(i)]);
           return a * a;
         });
}

double h1_norm_sq(const Field& u) {
  const Field* hat = &u;
  Field tmp;
  if (u.space() == Space::physical) {
    tmp = to_frequency(u);
    hat = &tmp;
  }
  const GridSpec& g = u.grid();
  const double s = det_sum(std::size_t(u.size()), [&](std::size_t i) {
    const auto [m1, m2, m3] = split_index(g, std::int64_t(i));
    const double x1 = g.freq(m1), x2 = g.freq(m2), x3 = g.freq(m3);
    return (1.0 + x1 * x1 + x2 * x2 + x3 * x3) * abs2((*hat)[std::int64_t(i)]);
  });
  return s / g.box_volume();
}

double interaction(const Field& u, const PhysParams& p, double* ql,
                   double* qd) {
  if (u.space() != Space::physical)
    throw ShapeError("interaction: physical-space field expected");
  const GridSpec& g = u.grid();

  Field rho(g, Space::physical);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < u.size(); ++i) rho[i] = abs2(u[i]);

  const double local = g.cell_volume() *
                       det_sum(std::size_t(u.size()), [&](std::size_t i) {
                         const double a = rho[std::int64_t(i)].real();
                         return a * a;
                       });

  double dipolar = 0.0;
  if (p.lambda2 != 0.0) {
    const Field phi = dipolar_potential(rho);
    dipolar = g.cell_volume() *
              det_sum(std::size_t(u.size()), [&](std::size_t i) {
                return phi[std::int64_t(i)].real() * rho[std::int64_t(i)].real();
              });
  }
  if (ql) *ql = local;
  if (qd) *qd = dipolar;
  return p.lambda1 * local + p.lambda2 * dipolar;
}

InvariantSet invariants(const Field& u, const PhysParams& p) {
  InvariantSet s;
  s.M = mass(u);
  s.H = kinetic(u);
  s.P = interaction(u, p, &s.quartic_local, &s.quartic_dipolar);
  s.E = 0.5 * (s.H + s.P);
  s.G = s.H + 1.5 * s.P;
  if (!std::isfinite(s.M) || !std::isfinite(s.H) || !std::isfinite(s.P))
    throw NumericalHealthError("invariants: non-finite functional");
  return s;
}

cplx multiplier_pairing(const Field& f, const Field& g,
                        const MultiplierField& m) {
  if (!(f.grid() == g.grid()) || !(f.grid() == m.grid()))
    throw ShapeError("multiplier_pairing: grid mismatch");
  const Field* fh = &f;
  const Field* gh = &g;
  Field tf, tg;
  if (f.space() == Space::physical) {
    tf = to_frequency(f);
    fh = &tf;
  }
  if (g.space() == Space::physical) {
    tg = to_frequency(g);
    gh = &tg;
  }
  const cplx s = det_sum_complex(std::size_t(f.size()), [&](std::size_t i) {
    return m[std::int64_t(i)] * (*fh)[std::int64_t(i)] *
           std::conj((*gh)[std::int64_t(i)]);
  });
  return s / f.grid().box_volume();
}

double ball_profile(double r) {
  if (r <= 1.0) return r * r;
  if (r >= 2.0) return 0.0;
  // C^2 quintic joining r^2 at r=1 (value 1, slope 2, curvature 2) to zero
  // with two flat derivatives at r=2.
  const double s = r - 1.0;
  return 1.0 + s * (2.0 + s * (1.0 + s * (-25.0 + s * (34.0 - 13.0 * s))));
}

double cylinder_profile(double r) {
  if (r <= 1.0) return r * r;
  if (r >= 2.0) return 0.0;
  // (r-2)^2 is the unique continuation with rho'' <= 2 a.e. given the
  // boundary data; the slope jump at r=1 is a negative delta in rho''.
  return (r - 2.0) * (r - 2.0);
}

std::vector<double> weight_samples(const GridSpec& g, const VirialWeight& w) {
  if (w.kind != VirialWeight::Kind::full) {
    if (!(w.radius > 0.0))
      throw ConfigError("virial weight: radius must be positive");
    if (2.0 * w.radius > g.half_width)
      throw ConfigError("virial weight: support 2R exceeds the box");
  }
  std::vector<double> out(std::size_t(g.size()));
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < g.size(); ++idx) {
    const auto [i1, i2, i3] = split_index(g, idx);
    const double x1 = g.coord(i1), x2 = g.coord(i2), x3 = g.coord(i3);
    double v = 0.0;
    switch (w.kind) {
      case VirialWeight::Kind::full:
        v = x1 * x1 + x2 * x2 + x3 * x3;
        break;
      case VirialWeight::Kind::ball: {
        const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
        v = w.radius * w.radius * ball_profile(r / w.radius);
        break;
      }
      case VirialWeight::Kind::cylinder: {
        const double rp = std::sqrt(x1 * x1 + x2 * x2);
        v = w.radius * w.radius * cylinder_profile(rp / w.radius) + x3 * x3;
        break;
      }
    }
    out[std::size_t(idx)] = v;
  }
  return out;
}

double variance(const Field& u, const VirialWeight& w) {
  if (u.space() != Space::physical)
    throw ShapeError("variance: physical-space field expected");
  const auto wv = weight_samples(u.grid(), w);
  const double s = u.grid().cell_volume() *
                   det_sum(std::size_t(u.size()), [&](std::size_t i) {
                     return wv[i] * abs2(u[std::int64_t(i)]);
                   });
  // Localized kinds carry the conventional factor 2 of the virial quantity.
  return w.kind == VirialWeight::Kind::full ? s : 2.0 * s;
}

Field gradient_component(const Field& u_hat, int axis) {
  if (u_hat.space() != Space::frequency)
    throw ShapeError("gradient_component: frequency-space field expected");
  if (axis < 1 || axis > 3)
    throw ConfigError("gradient_component: axis must be 1..3");
  const GridSpec& g = u_hat.grid();
  const int nyq = g.n / 2;
  Field d(g, Space::frequency);
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < u_hat.size(); ++idx) {
    const auto [m1, m2, m3] = split_index(g, idx);
    const std::int64_t m = axis == 1 ? m1 : axis == 2 ? m2 : m3;
    // The mode at -n/2 has no +n/2 partner; an odd symbol must vanish there
    // or real data acquire an imaginary derivative.
    const double xi = m == nyq ? 0.0
                     : axis == 1 ? g.freq(m1)
                     : axis == 2 ? g.freq(m2)
                                 : g.freq(m3);
    d[idx] = cplx(0.0, xi) * u_hat[idx];
  }
  to_physical_inplace(d);
  return d;
}

double virial_rate(const Field& u) {
  if (u.space() != Space::physical)
    throw ShapeError("virial_rate: physical-space field expected");
  const GridSpec& g = u.grid();
  const Field hat = to_frequency(u);
  double acc = 0.0;
  for (int axis = 1; axis <= 3; ++axis) {
    const Field d = gradient_component(hat, axis);
    acc += det_sum(std::size_t(u.size()), [&](std::size_t i) {
      const auto [i1, i2, i3] = split_index(g, std::int64_t(i));
      const double x =
          axis == 1 ? g.coord(i1) : axis == 2 ? g.coord(i2) : g.coord(i3);
      return x * std::imag(std::conj(u[std::int64_t(i)]) * d[std::int64_t(i)]);
    });
  }
  return 2.0 * g.cell_volume() * acc;
}

double spectral_tail_fraction(const Field& u_hat) {
  if (u_hat.space() != Space::frequency)
    throw ShapeError("spectral_tail_fraction: frequency-space field expected");
  const GridSpec& g = u_hat.grid();
  const int cut = g.n / 3;
  const double total = det_sum(std::size_t(u_hat.size()), [&](std::size_t i) {
    return abs2(u_hat[std::int64_t(i)]);
  });
  const double tail = det_sum(std::size_t(u_hat.size()), [&](std::size_t i) {
    const auto [m1, m2, m3] = split_index(g, std::int64_t(i));
    const int k1 = std::abs(g.wavenumber(m1));
    const int k2 = std::abs(g.wavenumber(m2));
    const int k3 = std::abs(g.wavenumber(m3));
    const int kmax = std::max(k1, std::max(k2, k3));
    return kmax >= cut ? abs2(u_hat[std::int64_t(i)]) : 0.0;
  });
  return total > 0.0 ? tail / total : 0.0;
}

double mass_outside(const Field& u, double R) {
  if (u.space() != Space::physical)
    throw ShapeError("mass_outside: physical-space field expected");
  const GridSpec& g = u.grid();
  const double R2 = R * R;
  return g.cell_volume() * det_sum(std::size_t(u.size()), [&](std::size_t i) {
           const auto [i1, i2, i3] = split_index(g, std::int64_t(i));
           const double x1 = g.coord(i1), x2 = g.coord(i2), x3 = g.coord(i3);
           return (x1 * x1 + x2 * x2 + x3 * x3 >= R2)
                      ? abs2(u[std::int64_t(i)])
                      : 0.0;
         });
}

}  // namespace dgpe
