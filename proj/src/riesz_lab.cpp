#include "dgpe/riesz_lab.hpp"

#include <gsl/gsl_interp.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>

#include "dgpe/errors.hpp"
#include "dgpe/fft.hpp"
#include "dgpe/functionals.hpp"
#include "dgpe/quadrature.hpp"
#include "dgpe/reductions.hpp"

#include "json.hpp"

namespace dgpe {
namespace {

// exp(-1/s) partition step: identically 0 for t <= 0 and 1 for t >= 1, so
// cutoff supports are exact sets, not numerical fuzz.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

void require_cutoff_params(double gamma, double R) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InputError("cylinder cutoff: gamma must be positive and finite");
  if (!(R > 0.0) || !std::isfinite(R))
    throw InputError("cylinder cutoff: R must be positive and finite");
}

double l1_norm(const Field& f) {
  return f.grid().cell_volume() *
         det_sum(std::size_t(f.size()),
                 [&](std::size_t i) { return std::abs(f[std::int64_t(i)]); });
}

// C-infinity bump of unit height supported in {|x - center| < rho}.
double ball_bump(double r, double rho) {
  const double q = (r / rho) * (r / rho);
  if (q >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - q));
}

// Outer sweep datum: supported exactly in {|x_bar| >= gamma2 R}, mass
// concentrated in a self-similar annulus just past the ramp so the family
// scales with R and stays clear of the box faces.
Field outer_cylinder_field(const GridSpec& g, double gamma2, double R) {
  const CylinderCutoff cut{gamma2, R, CylinderCutoff::Side::outside};
  const double c_s = 1.25 * gamma2 * R;
  const double w_s = 0.25 * gamma2 * R;
  const double w_3 = 0.75 * gamma2 * R;
  return make_field(g, [&](double x1, double x2, double x3) {
    const double s = std::hypot(x1, x2);
    const double a = (s - c_s) / w_s;
    const double b = x3 / w_3;
    return cut.radial(s) * std::exp(-a * a - b * b);
  });
}

// Inner sweep datum: the ramp sits at [gamma1 R / 1.1, gamma1 R], so the
// support is exactly {|x_bar| <= gamma1 R}.
Field inner_cylinder_field(const GridSpec& g, double gamma1, double R) {
  const CylinderCutoff cut{gamma1 / 1.1, R, CylinderCutoff::Side::inside};
  const double w = 0.45 * gamma1 * R;
  return make_field(g, [&](double x1, double x2, double x3) {
    const double s = std::hypot(x1, x2);
    return cut.radial(s) * std::exp(-(s * s + x3 * x3) / (w * w));
  });
}

Field ball_field(const GridSpec& g, double rho, double center3) {
  return make_field(g, [&](double x1, double x2, double x3) {
    const double r = std::sqrt(x1 * x1 + x2 * x2 +
                               (x3 - center3) * (x3 - center3));
    return ball_bump(r, rho);
  });
}

void normalize_l1(Field& f) {
  const double n1 = l1_norm(f);
  if (!(n1 > 0.0))
    throw NumericalHealthError("decay sweep: datum has zero L1 mass");
  const double inv = 1.0 / n1;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < f.size(); ++i) f[i] *= inv;
}

double fit_slope(const std::vector<double>& R, const std::vector<double>& y,
                 std::size_t from) {
  std::vector<double> lx, ly;
  for (std::size_t i = from; i < R.size(); ++i) {
    if (y[i] > 0.0) {
      lx.push_back(std::log(R[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(lx.size());
  my /= double(lx.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

// Dipolar symbol and its analytic xi3-derivative, written from the quotient
// form so the nodewise identity check exercises a distinct arithmetic path.
double khat(double x1, double x2, double x3) {
  const double s2 = x1 * x1 + x2 * x2 + x3 * x3;
  return (4.0 * M_PI / 3.0) * (2.0 * x3 * x3 - x1 * x1 - x2 * x2) / s2;
}

double khat_d3(double x1, double x2, double x3) {
  const double s2 = x1 * x1 + x2 * x2 + x3 * x3;
  const double num = 2.0 * x3 * x3 - x1 * x1 - x2 * x2;
  return (4.0 * M_PI / 3.0) * (4.0 * x3 / s2 - num * 2.0 * x3 / (s2 * s2));
}

std::array<double, 3> khat_grad(double x1, double x2, double x3) {
  const double s2 = x1 * x1 + x2 * x2 + x3 * x3;
  const double num = 2.0 * x3 * x3 - x1 * x1 - x2 * x2;
  const double c = 4.0 * M_PI / 3.0;
  return {c * (-2.0 * x1 / s2 - num * 2.0 * x1 / (s2 * s2)),
          c * (-2.0 * x2 / s2 - num * 2.0 * x2 / (s2 * s2)),
          c * (4.0 * x3 / s2 - num * 2.0 * x3 / (s2 * s2))};
}

// Derivative tables for f(r) = sin(cr)/r.  (The third and fourth lines are
// what repeated differentiation actually gives; coefficient slips in
// transcribed tables are caught by the finite-difference route.)
struct RadialDerivs {
  double f1, f2, f3, f4;
};

RadialDerivs radial_derivs(double c, double r) {
  const double s = std::sin(c * r), co = std::cos(c * r);
  const double r1 = 1.0 / r, r2 = r1 * r1, r3 = r2 * r1, r4 = r3 * r1,
               r5 = r4 * r1;
  RadialDerivs d;
  d.f1 = c * co * r1 - s * r2;
  d.f2 = -c * c * s * r1 - 2.0 * c * co * r2 + 2.0 * s * r3;
  d.f3 = -c * c * c * co * r1 + 3.0 * c * c * s * r2 + 6.0 * c * co * r3 -
         6.0 * s * r4;
  d.f4 = c * c * c * c * s * r1 + 4.0 * c * c * c * co * r2 -
         12.0 * c * c * s * r3 - 24.0 * c * co * r4 + 24.0 * s * r5;
  return d;
}

double composed_fourth(double c, double x1, double x2, double x3) {
  const double rho2 = x1 * x1 + x2 * x2;
  const double r = std::sqrt(rho2 + x3 * x3);
  const RadialDerivs f = radial_derivs(c, r);
  const double r1 = 1.0 / r, r3 = r1 * r1 * r1, r5 = r3 * r1 * r1,
               r7 = r5 * r1 * r1;
  const double g1 = x3 * r1;
  const double g2 = rho2 * r3;
  const double g3 = -3.0 * rho2 * x3 * r5;
  const double g4 = -3.0 * rho2 * r5 + 15.0 * rho2 * x3 * x3 * r7;
  return f.f4 * g1 * g1 * g1 * g1 + 6.0 * f.f3 * g2 * g1 * g1 +
         3.0 * f.f2 * g2 * g2 + 4.0 * f.f2 * g3 * g1 + f.f1 * g4;
}

// 9-point central stencil for the fourth derivative, order 6, evaluated in
// extended precision with one Richardson step (h and h/2).  The h^-4 scaling
// amplifies rounding in the weighted sum, so double precision alone floors
// near 1e-5 relative; extended precision pushes the floor past the 1e-6
// agreement contract with two orders to spare.
double fd_fourth(double c, double x1, double x2, double x3) {
  static const long double w[9] = {
      7.0L / 240.0L, -2.0L / 5.0L,  169.0L / 60.0L,
      -122.0L / 15.0L, 91.0L / 8.0L, -122.0L / 15.0L,
      169.0L / 60.0L, -2.0L / 5.0L,  7.0L / 240.0L};
  const long double rho2 =
      (long double)(x1) * x1 + (long double)(x2) * x2;
  const long double cl = c;
  const auto stencil = [&](long double h) {
    long double acc = 0.0L;
    for (int k = -4; k <= 4; ++k) {
      const long double z = x3 + k * h;
      const long double r = sqrtl(rho2 + z * z);
      acc += w[k + 4] * sinl(cl * r) / r;
    }
    return acc / (h * h * h * h);
  };
  const long double h = 0.02L / std::max(1.0, std::abs(c));
  return double((64.0L * stencil(0.5L * h) - stencil(h)) / 63.0L);
}

// Magnitude-bound terms coeff * c^p / r^q obtained by bounding each factor of
// the five chain-rule terms (|sin|, |cos|, |g'| <= 1; |g''| <= 1/r;
// |g'''| <= 3/r^2; |g''''| <= 18/r^3).
const std::vector<BoundPair>& bound_pairs() {
  static const std::vector<BoundPair> pairs = {
      {1.0, 4, 1},  {4.0, 3, 2},  {12.0, 2, 3}, {24.0, 1, 4}, {24.0, 0, 5},
      {6.0, 3, 2},  {18.0, 2, 3}, {36.0, 1, 4}, {36.0, 0, 5}, {3.0, 2, 3},
      {6.0, 1, 4},  {6.0, 0, 5},  {12.0, 2, 3}, {24.0, 1, 4}, {24.0, 0, 5},
      {18.0, 1, 4}, {18.0, 0, 5}};
  return pairs;
}

double bound_value(double c, double r) {
  const double cm = std::abs(c);
  double acc = 0.0;
  for (const BoundPair& p : bound_pairs())
    acc += p.coeff * std::pow(cm, p.c_pow) / std::pow(r, p.r_pow);
  return acc;
}

// Shared Gauss-Legendre nodes over geometric panels of [0, t_max]; resolves
// exponentials with rates from b_scale down to ~1/t_max.
struct TimeNodes {
  std::vector<double> t, w;
};

TimeNodes make_time_nodes(double t_max, int order, double b_scale) {
  TimeNodes nodes;
  double lo = 0.0;
  double hi = b_scale > 0.0 ? std::min(t_max, 1.0 / b_scale) : t_max;
  while (true) {
    for (const auto& [x, wgt] : gauss_legendre_nodes(order, lo, hi)) {
      nodes.t.push_back(x);
      nodes.w.push_back(wgt);
    }
    if (hi >= t_max) break;
    lo = hi;
    hi = std::min(t_max, 2.0 * hi);
  }
  return nodes;
}

double quad_t_integral(const TimeNodes& nodes, double b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.t.size(); ++i)
    acc += nodes.w[i] * nodes.t[i] * std::exp(-b * nodes.t[i]);
  return acc;
}

std::int64_t flat_zero_mode() { return 0; }  // m = (0,0,0) sits first in DFT order

}  // namespace

double CylinderCutoff::radial(double s) const {
  const double r0 = gamma * R;
  const double inside_val = 1.0 - smooth_step((s - r0) / (0.1 * r0));
  return side == Side::inside ? inside_val : 1.0 - inside_val;
}

double CylinderCutoff::operator()(double x1, double x2) const {
  return radial(std::hypot(x1, x2));
}

Field sample_cutoff(const GridSpec& g, const CylinderCutoff& c) {
  require_cutoff_params(c.gamma, c.R);
  return make_field(g, [&](double x1, double x2, double) { return c(x1, x2); });
}

DecaySweepReport decay_sweep_pairing(const GridSpec& g, SweepKind kind,
                                     double gamma1, double gamma2,
                                     const std::vector<double>& radii_units) {
  if (radii_units.empty())
    throw InputError("decay sweep: at least one radius is required");
  for (std::size_t i = 0; i < radii_units.size(); ++i) {
    if (!(radii_units[i] > 0.0) || !std::isfinite(radii_units[i]))
      throw InputError("decay sweep: radii must be positive and finite");
    if (i > 0 && !(radii_units[i] > radii_units[i - 1]))
      throw InputError("decay sweep: radii must be strictly increasing");
  }
  const bool cylinder = kind != SweepKind::zero_degree;
  if (cylinder) {
    require_cutoff_params(gamma1, 1.0);
    require_cutoff_params(gamma2, 1.0);
    if (!(gamma2 - gamma1 > 0.0))
      throw InputError("decay sweep: separation gamma2 - gamma1 must be positive");
  }
  const double h = g.spacing();
  const double L = g.half_width;
  const double R_max = radii_units.back() * h;
  if (cylinder) {
    if (!(1.1 * gamma2 * R_max < L / 2.0))
      throw ConfigError("decay sweep: outer cutoff exceeds the half-box");
  } else {
    if (!(7.0 / 6.0 * R_max < L / 2.0))
      throw ConfigError("decay sweep: ball construction exceeds the half-box");
  }

  DecaySweepReport rep;
  rep.kind = kind;
  rep.exponent = cylinder ? 1.0 : 3.0;

  MultiplierField m;
  switch (kind) {
    case SweepKind::r4:
      m = riesz_fourth(g, 3);
      break;
    case SweepKind::r2r2:
      m = riesz_cross(g, 1, 3);
      break;
    case SweepKind::zero_degree:
      m = dipolar_multiplier(g);
      break;
  }

  rep.first_resolved = radii_units.size();
  for (std::size_t i = 0; i < radii_units.size(); ++i) {
    const double R = radii_units[i] * h;
    const bool resolved = cylinder
                              ? gamma1 * R >= 2.0 * h &&
                                    (gamma2 - gamma1) * R >= 2.0 * h
                              : R / 3.0 >= 2.0 * h;
    if (resolved && rep.first_resolved == radii_units.size())
      rep.first_resolved = i;

    // Each radius owns its fields; results are appended in radius order.
    Field f, gg;
    if (cylinder) {
      f = outer_cylinder_field(g, gamma2, R);
      gg = inner_cylinder_field(g, gamma1, R);
    } else {
      const double rho = R / 3.0;
      const double sep = R / 2.0 + rho;
      f = ball_field(g, rho, -sep);
      gg = ball_field(g, rho, +sep);
    }
    normalize_l1(f);
    normalize_l1(gg);
    const double nf = l1_norm(f);
    const double ng = l1_norm(gg);
    const double pairing = std::abs(multiplier_pairing(f, gg, m));
    if (!std::isfinite(pairing))
      throw NumericalHealthError("decay sweep: non-finite pairing");

    rep.radii.push_back(R);
    rep.pairing_abs.push_back(pairing);
    rep.norm_f1.push_back(nf);
    rep.norm_g1.push_back(ng);
    rep.bound_ratio.push_back(pairing * std::pow(R, rep.exponent) / (nf * ng));
  }
  if (rep.first_resolved == radii_units.size()) rep.first_resolved = 0;
  rep.fitted_slope = fit_slope(rep.radii, rep.pairing_abs, rep.first_resolved);
  return rep;
}

std::string sweep_csv(const DecaySweepReport& r) {
  std::string out = "R,pairing_abs,norm_f1,norm_g1,bound_ratio\n";
  char line[256];
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.radii[i], r.pairing_abs[i], r.norm_f1[i], r.norm_g1[i],
                  r.bound_ratio[i]);
    out += line;
  }
  return out;
}

PointwiseCutoffReport pointwise_cutoff_check(const Field& f, double gamma1,
                                             double gamma2, double R_units,
                                             CutoffDirection dir) {
  if (f.space() != Space::physical)
    throw ShapeError("pointwise cutoff check: physical-space field expected");
  check_finite(f, "pointwise cutoff check");
  require_cutoff_params(gamma1, 1.0);
  require_cutoff_params(gamma2, 1.0);
  if (!(R_units > 0.0) || !std::isfinite(R_units))
    throw InputError("pointwise cutoff check: R must be positive and finite");
  const double d =
      dir == CutoffDirection::in_out ? gamma2 - gamma1 : gamma1 - gamma2;
  if (!(d > 0.0))
    throw InputError("pointwise cutoff check: separation must be positive");

  const GridSpec& g = f.grid();
  const double h = g.spacing();
  const double R = R_units * h;
  if (!(1.1 * std::max(gamma1, gamma2) * R < g.half_width / 2.0))
    throw ConfigError("pointwise cutoff check: cutoff exceeds the half-box");

  // Source mask and near-side weight chosen so both support contracts are
  // exact: the masked source lives in the region whose L1 norm normalizes
  // the bound, and the weight vanishes outside its nominal cylinder.
  CylinderCutoff source_cut, weight_cut;
  if (dir == CutoffDirection::in_out) {
    source_cut = {gamma2, R, CylinderCutoff::Side::outside};
    weight_cut = {gamma1 / 1.1, R, CylinderCutoff::Side::inside};
  } else {
    source_cut = {gamma2 / 1.1, R, CylinderCutoff::Side::inside};
    weight_cut = {gamma1, R, CylinderCutoff::Side::outside};
  }

  Field masked(g, Space::physical);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const auto [i1, i2, i3] = split_index(g, i);
    masked[i] = source_cut(g.coord(i1), g.coord(i2)) * f[i];
  }
  const Field riesz = apply_multiplier(masked, riesz_square(g, 3));

  const double sup =
      det_max(std::size_t(f.size()), [&](std::size_t iu) {
        const std::int64_t i = std::int64_t(iu);
        const auto [i1, i2, i3] = split_index(g, i);
        return weight_cut(g.coord(i1), g.coord(i2)) * std::abs(riesz[i]);
      });

  const double region_l1 =
      g.cell_volume() *
      det_sum(std::size_t(f.size()), [&](std::size_t iu) {
        const std::int64_t i = std::int64_t(iu);
        const auto [i1, i2, i3] = split_index(g, i);
        const double s = std::hypot(g.coord(i1), g.coord(i2));
        const bool in_region = dir == CutoffDirection::in_out
                                   ? s >= gamma2 * R
                                   : s <= gamma2 * R;
        return in_region ? std::abs(f[i]) : 0.0;
      });
  if (!(region_l1 > 0.0))
    throw InputError("pointwise cutoff check: field vanishes on the source region");

  PointwiseCutoffReport rep;
  rep.R = R;
  rep.sup_composite = sup;
  rep.region_l1 = region_l1;
  rep.bound_ratio = sup * R * R * R / region_l1;
  return rep;
}

double biharmonic_kernel(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw InputError("biharmonic kernel: mu must be nonnegative and finite");
  // k(mu) = sqrt(2/pi) int_0^inf e^{-s^4} s^2 sinc(mu s) ds; the sinc form is
  // exact for all mu and continuous at 0.  e^{-s^4} is below 1e-110 past
  // s = 4, so the truncated interval carries the full value.
  const double k =
      integrate(
          [mu](double s) {
            const double z = mu * s;
            const double sinc =
                std::abs(z) < 1e-6 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
            return std::exp(-s * s * s * s) * s * s * sinc;
          },
          0.0, 4.0, 1e-14, 1e-12) *
      std::sqrt(2.0 / M_PI);
  return k;
}

double biharmonic_alpha() {
  static std::once_flag flag;
  static double alpha = 0.0;
  std::call_once(flag, [] {
    // The radial profile decays like exp(-c s^{4/3}); past s = 30 the weight
    // s^2 k(s) is far below the 1e-13 absolute target.
    const double second_moment = integrate(
        [](double s) { return s * s * biharmonic_kernel(s); }, 0.0, 30.0,
        1e-13, 1e-11);
    alpha = 1.0 / (4.0 * M_PI * second_moment);
  });
  return alpha;
}

Field sample_heat_kernel(const GridSpec& g, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw ConfigError("heat kernel sampling: t must be positive and finite");
  const double t4 = std::pow(t, 0.25);
  const double mu_max =
      std::sqrt(3.0) * g.half_width / t4 * (1.0 + 1e-12) + 1e-9;
  const int table_n = 4096;
  std::vector<double> mu(table_n), kv(table_n);
  for (int i = 0; i < table_n; ++i) {
    mu[i] = mu_max * double(i) / double(table_n - 1);
    kv[i] = biharmonic_kernel(mu[i]);
  }
  gsl_spline* spline = gsl_spline_alloc(gsl_interp_cspline, table_n);
  gsl_interp_accel* acc = gsl_interp_accel_alloc();
  gsl_spline_init(spline, mu.data(), kv.data(), table_n);

  const double alpha = biharmonic_alpha();
  const double scale = alpha / std::pow(t, 0.75);
  Field p(g, Space::physical);
  // Serial fill: the spline accelerator is stateful, and n^3 evaluations of a
  // cubic table are cheap next to building the table itself.
  for (std::int64_t i = 0; i < p.size(); ++i) {
    const auto [i1, i2, i3] = split_index(g, i);
    const double r = std::sqrt(g.coord(i1) * g.coord(i1) +
                               g.coord(i2) * g.coord(i2) +
                               g.coord(i3) * g.coord(i3));
    p[i] = scale * gsl_spline_eval(spline, r / t4, acc);
  }
  gsl_interp_accel_free(acc);
  gsl_spline_free(spline);
  return p;
}

RepresentationReport r4_representation_check(const Field& f, const Field& g,
                                             double t_max, int n_quad,
                                             int axis) {
  if (!(f.grid() == g.grid()))
    throw ShapeError("representation check: grid mismatch");
  if (f.space() != Space::physical || g.space() != Space::physical)
    throw ShapeError("representation check: physical-space fields expected");
  if (axis < 1 || axis > 3)
    throw ConfigError("representation check: axis must be 1..3");
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw ConfigError("representation check: t_max must be positive");
  if (n_quad < 2 || n_quad > 64)
    throw ConfigError("representation check: n_quad must be in [2, 64]");
  check_finite(f, "representation check");
  check_finite(g, "representation check");

  const GridSpec& gr = f.grid();
  const Field fh = to_frequency(f);
  const Field gh = to_frequency(g);

  const double f_l1 = l1_norm(f);
  const double zero_mass = std::abs(fh[flat_zero_mode()]);
  if (zero_mass > 1e-12 * std::max(f_l1, 1e-300))
    throw InputError("representation check: zero-mode mass in f");

  // Per-mode decay rate b = |xi|^4 and weight xi_axis^4 b fhat ghat*.
  const std::int64_t n = gr.size();
  std::vector<double> b(static_cast<std::size_t>(n));
  std::vector<cplx> w(static_cast<std::size_t>(n));
  double b_max = 0.0;
#pragma omp parallel for schedule(static) reduction(max : b_max)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto [m1, m2, m3] = split_index(gr, i);
    const double x1 = gr.freq(m1), x2 = gr.freq(m2), x3 = gr.freq(m3);
    const double s2 = x1 * x1 + x2 * x2 + x3 * x3;
    const double xa = axis == 1 ? x1 : axis == 2 ? x2 : x3;
    const double xa4 = xa * xa * xa * xa;
    b[std::size_t(i)] = s2 * s2;
    w[std::size_t(i)] = (m1 == 0 && m2 == 0 && m3 == 0)
                            ? cplx(0.0, 0.0)
                            : xa4 * s2 * s2 * fh[i] * std::conj(gh[i]);
    b_max = std::max(b_max, s2 * s2);
  }

  const TimeNodes nodes = make_time_nodes(t_max, n_quad, b_max);

  const double vol = gr.box_volume();
  const cplx quad =
      det_sum_complex(std::size_t(n), [&](std::size_t i) {
        if (w[i] == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
        return w[i] * quad_t_integral(nodes, b[i]);
      }) /
      vol;
  const cplx tail =
      det_sum_complex(std::size_t(n), [&](std::size_t i) {
        if (w[i] == cplx(0.0, 0.0) || b[i] <= 0.0) return cplx(0.0, 0.0);
        const double bt = b[i] * t_max;
        return w[i] * std::exp(-bt) * (1.0 + bt) / (b[i] * b[i]);
      }) /
      vol;

  const cplx direct = multiplier_pairing(f, g, riesz_fourth(gr, axis));
  const double denom = std::abs(direct) > 0.0 ? std::abs(direct) : 1.0;

  RepresentationReport rep;
  rep.axis = axis;
  rep.t_max = t_max;
  rep.n_quad = n_quad;
  rep.pairing_direct = direct;
  rep.pairing_quadrature = quad;
  rep.tail_correction = tail;
  rep.rel_dev_corrected = std::abs(quad + tail - direct) / denom;
  rep.rel_dev_raw = std::abs(quad - direct) / denom;
  rep.tail_bound_rel = std::abs(tail) / denom;

  // Scalar route on sampled grid modes: the same node family against the
  // closed form b^2 int_0^T e^{-bt} t dt = 1 - e^{-bT}(1 + bT).
  const int half = gr.n / 2;
  const int probes[][3] = {{1, 0, 0},          {0, 1, 0},
                           {0, 0, 1},          {1, 1, 1},
                           {2, 3, 5 % half},   {0, 0, half / 2},
                           {half / 2, half / 2, half / 2},
                           {0, 0, half - 1},   {half - 1, half - 1, half - 1},
                           {1, 0, half - 1}};
  double worst = 0.0;
  for (const auto& pr : probes) {
    const double x1 = M_PI * pr[0] / gr.half_width;
    const double x2 = M_PI * pr[1] / gr.half_width;
    const double x3 = M_PI * pr[2] / gr.half_width;
    const double s2 = x1 * x1 + x2 * x2 + x3 * x3;
    if (s2 == 0.0) continue;
    const double bb = s2 * s2;
    const double bt = bb * t_max;
    const double closed = 1.0 - std::exp(-bt) * (1.0 + bt);
    const double viaq = bb * bb * quad_t_integral(nodes, bb);
    worst = std::max(worst, std::abs(viaq - closed) / closed);
  }
  rep.scalar_worst_rel = worst;
  return rep;
}

FaaDiBrunoReport faa_di_bruno_check(
    double c, const std::vector<std::array<double, 3>>& pts) {
  if (!std::isfinite(c)) throw InputError("composed derivative check: c must be finite");
  FaaDiBrunoReport rep;
  rep.c = c;
  rep.pairs = bound_pairs();
  for (const auto& x : pts) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (!(r >= 0.5))
      throw InputError("composed derivative check: point too close to the origin");
    FdbPoint p;
    p.x = x;
    p.composed = composed_fourth(c, x[0], x[1], x[2]);
    p.finite_diff = fd_fourth(c, x[0], x[1], x[2]);
    p.bound = bound_value(c, r);
    p.rel_dev = std::abs(p.composed - p.finite_diff) /
                std::max(std::abs(p.composed), 1e-8 * p.bound);
    if (std::abs(p.composed) > p.bound) rep.bound_satisfied = false;
    rep.max_rel_dev = std::max(rep.max_rel_dev, p.rel_dev);
    rep.points.push_back(p);
  }
  return rep;
}

SymbolIdentityReport dipolar_symbol_identities(const GridSpec& g) {
  SymbolIdentityReport rep;

  // (a) ray samples: lattice directions plus a few incommensurate ones, at
  // radii spanning two decades.
  std::vector<std::array<double, 3>> dirs;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        if (a || b || c) dirs.push_back({double(a), double(b), double(c)});
  dirs.push_back({0.3, 1.7, -0.9});
  dirs.push_back({1.1, -0.2, 0.5});
  dirs.push_back({-0.8, 0.6, 1.3});
  dirs.push_back({2.2, 0.4, -1.6});
  const double radii[] = {0.5, 1.0, 2.0, 5.0, 17.0};
  for (const auto& d : dirs) {
    const double nrm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    for (double r : radii) {
      const double x1 = r * d[0] / nrm, x2 = r * d[1] / nrm,
                   x3 = r * d[2] / nrm;
      const auto grad = khat_grad(x1, x2, x3);
      rep.ray_derivative_max =
          std::max(rep.ray_derivative_max,
                   std::abs(x1 * grad[0] + x2 * grad[1] + x3 * grad[2]));
      rep.homogeneity_max =
          std::max(rep.homogeneity_max,
                   std::abs(khat(2 * x1, 2 * x2, 2 * x3) - khat(x1, x2, x3)));
    }
  }

  // (b) nodewise axial identity over the grid frequencies.
  rep.axial_identity_max =
      det_max(std::size_t(g.size()), [&](std::size_t iu) {
        const auto [m1, m2, m3] = split_index(g, std::int64_t(iu));
        if (m1 == 0 && m2 == 0 && m3 == 0) return 0.0;
        const double x1 = g.freq(m1), x2 = g.freq(m2), x3 = g.freq(m3);
        const double s2 = x1 * x1 + x2 * x2 + x3 * x3;
        const double q = x3 * x3 / s2;
        const double lhs = x3 * khat_d3(x1, x2, x3);
        const double rhs = 8.0 * M_PI * (q - q * q);
        return std::abs(lhs - rhs);
      });

  // (c) scaling identity on an anisotropic Gaussian sized to the box.  The
  // identity holds on free space while the convolution here is periodic; the
  // leading image term cancels by lattice symmetry and the surviving
  // quadrupole correction scales like (sigma/L)^5, so the widths sit at L/16
  // to keep that contamination well under the 1e-4 contract.  The grid must
  // resolve the narrowest width (n >= 96 at these proportions).
  const double L = g.half_width;
  const double s1 = 0.9 * L / 16.0, sy = 1.2 * L / 16.0, s3 = 0.7 * L / 16.0;
  const Field f = make_field(g, [&](double x1, double x2, double x3) {
    return std::exp(-0.5 * (x1 * x1 / (s1 * s1) + x2 * x2 / (sy * sy) +
                            x3 * x3 / (s3 * s3)));
  });
  const Field kf = dipolar_potential(f);
  const Field kfh = to_frequency(kf);
  double lhs = 0.0;
  for (int axis = 1; axis <= 3; ++axis) {
    const Field d = gradient_component(kfh, axis);
    lhs += det_sum(std::size_t(g.size()), [&](std::size_t iu) {
      const std::int64_t i = std::int64_t(iu);
      const auto [i1, i2, i3] = split_index(g, i);
      const double x =
          axis == 1 ? g.coord(i1) : axis == 2 ? g.coord(i2) : g.coord(i3);
      return x * std::real(d[i]) * std::real(f[i]);
    });
  }
  lhs *= 2.0 * g.cell_volume();
  const double kff = g.cell_volume() *
                     det_sum(std::size_t(g.size()), [&](std::size_t iu) {
                       const std::int64_t i = std::int64_t(iu);
                       return std::real(kf[i]) * std::real(f[i]);
                     });
  rep.pairing_lhs = lhs;
  rep.pairing_rhs = -3.0 * kff;
  rep.pairing_residual = std::abs(lhs - rep.pairing_rhs) /
                         std::max(std::abs(rep.pairing_rhs), 1e-300);
  return rep;
}

std::string identity_json(const SymbolIdentityReport& sym,
                          const RepresentationReport* rep,
                          const FaaDiBrunoReport* fdb) {
  nlohmann::json j;
  j["symbol_identities"] = {{"ray_derivative_max", sym.ray_derivative_max},
                            {"homogeneity_max", sym.homogeneity_max},
                            {"axial_identity_max", sym.axial_identity_max},
                            {"pairing_lhs", sym.pairing_lhs},
                            {"pairing_rhs", sym.pairing_rhs},
                            {"pairing_residual", sym.pairing_residual}};
  if (rep) {
    j["r4_representation"] = {
        {"axis", rep->axis},
        {"t_max", rep->t_max},
        {"n_quad", rep->n_quad},
        {"pairing_direct_re", rep->pairing_direct.real()},
        {"pairing_direct_im", rep->pairing_direct.imag()},
        {"rel_dev_corrected", rep->rel_dev_corrected},
        {"rel_dev_raw", rep->rel_dev_raw},
        {"tail_bound_rel", rep->tail_bound_rel},
        {"scalar_worst_rel", rep->scalar_worst_rel}};
  }
  if (fdb) {
    j["composed_derivative"] = {{"c", fdb->c},
                                {"n_points", fdb->points.size()},
                                {"max_rel_dev", fdb->max_rel_dev},
                                {"bound_satisfied", fdb->bound_satisfied},
                                {"n_bound_terms", fdb->pairs.size()}};
  }
  return j.dump(2);
}

}  // namespace dgpe
