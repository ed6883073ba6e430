#include <omp.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "dgpe/errors.hpp"
#include "dgpe/fft.hpp"
#include "dgpe/field.hpp"
#include "dgpe/functionals.hpp"
#include "dgpe/multipliers.hpp"
#include "dgpe/reductions.hpp"
#include "dgpe/regimes.hpp"

using namespace dgpe;

namespace {

constexpr double kPi = std::numbers::pi;

Field gaussian(const GridSpec& g, double amp, double sigma) {
  return make_field(g, [amp, sigma](double x, double y, double z) {
    return cplx(amp * std::exp(-0.5 * (x * x + y * y + z * z) /
                               (sigma * sigma)),
                0.0);
  });
}

Field random_field(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field u(g, Space::physical);
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] = {dist(rng), dist(rng)};
  return u;
}

}  // namespace

TEST_CASE("invariants of a Gaussian match the closed forms") {
  const GridSpec g = make_grid(48, 10.0);
  const double A = 0.7, sigma = 1.4;
  const Field u = gaussian(g, A, sigma);
  const PhysParams p{-1.0, 0.25};
  const InvariantSet s = invariants(u, p);

  const double m_exact = A * A * std::pow(kPi, 1.5) * std::pow(sigma, 3.0);
  const double h_exact = 1.5 * A * A * std::pow(kPi, 1.5) * sigma;
  const double q_exact =
      std::pow(A, 4.0) * std::pow(kPi, 1.5) * std::pow(sigma, 3.0) /
      (2.0 * std::sqrt(2.0));
  CHECK(s.M == doctest::Approx(m_exact).epsilon(1e-8));
  CHECK(s.H == doctest::Approx(h_exact).epsilon(1e-6));
  CHECK(s.quartic_local == doctest::Approx(q_exact).epsilon(1e-6));

  // isotropic density: the traceless kernel pairs to zero by the coordinate
  // permutation symmetry of both the data and the lattice
  CHECK(std::abs(s.quartic_dipolar) < 1e-12 * s.quartic_local);

  CHECK(s.E == doctest::Approx(0.5 * (s.H + s.P)).epsilon(1e-13));
  CHECK(s.G == doctest::Approx(s.H + 1.5 * s.P).epsilon(1e-13));
  CHECK(s.P ==
        doctest::Approx(p.lambda1 * s.quartic_local +
                        p.lambda2 * s.quartic_dipolar).epsilon(1e-13));

  // every entry is recomputable through the standalone functionals
  CHECK(s.M == mass(u));
  CHECK(s.H == kinetic(u));
  CHECK(s.quartic_local == norm_l4_pow4(u));
  CHECK(s.P == interaction(u, p));
}

TEST_CASE("invariants flag non-finite data") {
  const GridSpec g = make_grid(8, 1.0);
  Field u = random_field(g, 17);
  u[100] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(invariants(u, {1.0, 0.0}), NumericalHealthError);
}

TEST_CASE("interaction matches the brute-force double-sum oracle") {
  // Free-space pairing of the mean-free density with the physical dipole
  // kernel, singular diagonal cell skipped (principal value, zero angular
  // average). Localized data keep the periodic images negligible.
  const GridSpec g = make_grid(32, 8.0);
  const double A = 0.9, sigma = 1.4;
  const Field u = gaussian(g, A, sigma);
  const PhysParams p{1.0, 0.5};

  const std::size_t N = std::size_t(g.size());
  std::vector<double> x1(N), x2(N), x3(N), rho(N);
  double mean = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto [a, b, c] = split_index(g, std::int64_t(i));
    x1[i] = g.coord(a);
    x2[i] = g.coord(b);
    x3[i] = g.coord(c);
    rho[i] = std::norm(u[std::int64_t(i)]);
    mean += rho[i];
  }
  mean /= double(N);
  double local = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    local += rho[i] * rho[i];
    rho[i] -= mean;
  }
  local *= g.cell_volume();

  double dd = 0.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : dd)
  for (std::int64_t j = 0; j < std::int64_t(N); ++j) {
    const double xj = x1[j], yj = x2[j], zj = x3[j], rj = rho[j];
    double acc = 0.0;
    for (std::size_t k = std::size_t(j) + 1; k < N; ++k) {
      const double d1 = xj - x1[k];
      const double d2 = yj - x2[k];
      const double d3 = zj - x3[k];
      const double r2 = d1 * d1 + d2 * d2 + d3 * d3;
      const double kern = (1.0 - 3.0 * d3 * d3 / r2) / (r2 * std::sqrt(r2));
      acc += kern * rho[k];
    }
    dd += 2.0 * acc * rj;
  }
  dd *= g.cell_volume() * g.cell_volume();

  const double oracle = p.lambda1 * local + p.lambda2 * dd;
  const double direct = interaction(u, p);
  CHECK(direct == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("dipolar interaction piece equals the Fourier pairing") {
  // Two independent code paths: physical pairing with the convolved
  // potential vs the multiplier pairing of rho with itself.
  const GridSpec g = make_grid(32, 12.0);
  const Field u = make_field(g, [](double x, double y, double z) {
    return cplx(std::exp(-(x * x + y * y) / 8.0 - z * z / 3.92), 0.0);
  });
  InvariantSet s = invariants(u, {0.0, 1.0});

  Field rho(g, Space::physical);
  for (std::int64_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u[i]);
  const cplx pair = multiplier_pairing(rho, rho, dipolar_multiplier(g));
  CHECK(std::abs(pair.imag()) < 1e-12 * std::abs(pair.real()));
  CHECK(s.quartic_dipolar ==
        doctest::Approx(pair.real()).epsilon(1e-12));
  CHECK(s.P == doctest::Approx(pair.real()).epsilon(1e-12));

  // oblate cloud: repulsive pairing; the prolate transpose attracts
  CHECK(s.quartic_dipolar > 0.0);
}

TEST_CASE("multiplier pairing equals the physical-space inner product") {
  const GridSpec g = make_grid(16, 3.0);
  const Field f = random_field(g, 5);
  const Field w = random_field(g, 6);
  const MultiplierField K = dipolar_multiplier(g);

  const Field Tf = apply_multiplier(f, K);
  const cplx direct =
      g.cell_volume() *
      det_sum_complex(std::size_t(f.size()), [&](std::size_t i) {
        return Tf[std::int64_t(i)] * std::conj(w[std::int64_t(i)]);
      });
  const cplx paired = multiplier_pairing(f, w, K);
  CHECK(std::abs(paired - direct) < 1e-12 * std::abs(direct));

  // real symbol: <T f, w> = conj(<T w, f>)
  const cplx flipped = multiplier_pairing(w, f, K);
  CHECK(std::abs(paired - std::conj(flipped)) < 1e-12 * std::abs(paired));

  const GridSpec g2 = make_grid(16, 4.0);
  CHECK_THROWS_AS(multiplier_pairing(f, random_field(g2, 7), K), ShapeError);
}

TEST_CASE("variance of the unit Gaussian and weight validation") {
  const GridSpec g = make_grid(48, 10.0);
  const Field u = gaussian(g, 1.0, 1.0);
  const double V = variance(u, full_variance_weight());
  CHECK(V / mass(u) == doctest::Approx(1.5).epsilon(1e-9));

  CHECK_THROWS_AS(variance(u, ball_cutoff(6.0)), ConfigError);   // 2R > L
  CHECK_THROWS_AS(variance(u, ball_cutoff(0.0)), ConfigError);
  CHECK_THROWS_AS(variance(u, cylinder_plus_x3sq(-1.0)), ConfigError);
}

TEST_CASE("localized weights reduce to the exact variance on the support") {
  const GridSpec g = make_grid(40, 10.0);
  const double R0 = 3.0;
  const Field u = make_field(g, [R0](double x, double y, double z) {
    const double r2 = (x * x + y * y + z * z) / (R0 * R0);
    return r2 < 1.0 ? cplx(std::exp(-1.0 / (1.0 - r2)), 0.0) : cplx(0.0, 0.0);
  });

  const double V = variance(u, full_variance_weight());
  // chi_R = |x|^2 and rho_R(|xbar|) + x3^2 = |x|^2 wherever u is nonzero
  CHECK(variance(u, ball_cutoff(3.5)) == doctest::Approx(2.0 * V).epsilon(1e-10));
  CHECK(variance(u, cylinder_plus_x3sq(3.5)) ==
        doctest::Approx(2.0 * V).epsilon(1e-10));
}

TEST_CASE("weight profiles: values, support, curvature bound") {
  CHECK(ball_profile(0.0) == 0.0);
  CHECK(ball_profile(0.5) == 0.25);
  CHECK(ball_profile(1.0) == 1.0);
  CHECK(ball_profile(2.0) == 0.0);
  CHECK(ball_profile(2.7) == 0.0);

  // C^2 joins at r = 1 and r = 2: value, slope, curvature continuous
  const double eps = 1e-6;
  for (double r0 : {1.0, 2.0}) {
    const double fm = ball_profile(r0 - eps), fp = ball_profile(r0 + eps);
    const double fmm = ball_profile(r0 - 2 * eps),
                 fpp = ball_profile(r0 + 2 * eps);
    CHECK(std::abs(fp - fm) < 10 * eps);
    const double dm = (ball_profile(r0) - fmm) / (2 * eps);
    const double dp = (fpp - ball_profile(r0)) / (2 * eps);
    CHECK(std::abs(dp - dm) < 1e-3);
  }

  CHECK(cylinder_profile(0.5) == 0.25);
  CHECK(cylinder_profile(1.0) == 1.0);
  CHECK(cylinder_profile(1.5) == 0.25);
  CHECK(cylinder_profile(2.0) == 0.0);
  CHECK(cylinder_profile(3.0) == 0.0);

  // rho'' <= 2 a.e. (central second difference away from the r = 1 kink,
  // where the distributional part is a negative delta)
  for (double r = 0.05; r < 2.6; r += 0.013) {
    const double h = 1e-4;
    const double dd = (cylinder_profile(r + h) - 2.0 * cylinder_profile(r) +
                       cylinder_profile(r - h)) /
                      (h * h);
    CHECK(dd <= 2.0 + 1e-6);
  }
}

TEST_CASE("virial rate vanishes for real data") {
  const GridSpec g = make_grid(24, 5.0);
  Field u = random_field(g, 9);
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] = cplx(u[i].real(), 0.0);
  const double scale = kinetic(u) * g.half_width;
  CHECK(std::abs(virial_rate(u)) < 1e-12 * scale);
}

TEST_CASE("virial rate of a chirped Gaussian pumps the variance") {
  const GridSpec g = make_grid(48, 10.0);
  const double b = 0.3;
  const Field u = make_field(g, [b](double x, double y, double z) {
    const double r2 = x * x + y * y + z * z;
    return std::exp(cplx(-0.5 * r2, 0.5 * b * r2));
  });
  const double V = variance(u, full_variance_weight());
  const double rate = virial_rate(u);
  CHECK(rate == doctest::Approx(2.0 * b * V).epsilon(1e-9));

  // independent check: central difference of V(t) along the free evolution
  Field hat = to_frequency(u);
  const double dt = 1e-3;
  double Vs[2];
  int at = 0;
  for (double t : {-dt, dt}) {
    Field evolved(g, Space::frequency);
    for (std::int64_t i = 0; i < hat.size(); ++i) {
      const auto [m1, m2, m3] = split_index(g, i);
      const double q1 = g.freq(m1), q2 = g.freq(m2), q3 = g.freq(m3);
      const double xi2 = q1 * q1 + q2 * q2 + q3 * q3;
      evolved[i] = hat[i] * std::exp(cplx(0.0, -0.5 * xi2 * t));
    }
    to_physical_inplace(evolved);
    Vs[at++] = variance(evolved, full_variance_weight());
  }
  const double fd = (Vs[1] - Vs[0]) / (2.0 * dt);
  CHECK(rate == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("virial rate is invariant under plane-wave modulation") {
  const GridSpec g = make_grid(48, 10.0);
  const double b = 0.2;
  auto base = [b](double r2) { return std::exp(cplx(-0.5 * r2, 0.5 * b * r2)); };
  const Field u = make_field(g, [&](double x, double y, double z) {
    return base(x * x + y * y + z * z);
  });
  const double k1 = g.freq(3), k3 = g.freq(5);
  const Field v = make_field(g, [&](double x, double y, double z) {
    return base(x * x + y * y + z * z) * std::exp(cplx(0.0, k1 * x + k3 * z));
  });
  // the x . grad phase term pairs an odd integrand against an even density
  CHECK(virial_rate(v) ==
        doctest::Approx(virial_rate(u)).epsilon(1e-10));
}

TEST_CASE("stable regime makes the interaction nonnegative") {
  const GridSpec g = make_grid(16, 4.0);
  const PhysParams sr[] = {{1.0, 0.0}, {1.0, 0.1}, {1.0, -0.1}, {0.5, 0.05}};
  const PhysParams fa{-1.0, -0.05};
  for (const auto& p : sr) CHECK(stable_regime(p));
  CHECK(fully_attractive_regime(fa));

  for (unsigned seed = 0; seed < 12; ++seed) {
    const Field u = random_field(g, 100 + seed);
    double ql = 0.0;
    interaction(u, {0.0, 0.0}, &ql);
    for (const auto& p : sr) {
      const double bound =
          1e-10 * (std::abs(p.lambda1) + std::abs(p.lambda2)) * 9.0 * ql;
      CHECK(interaction(u, p) >= -bound);
    }
    CHECK(interaction(u, fa) < 0.0);
  }
}

TEST_CASE("regime predicates at the boundary couplings") {
  CHECK(unstable_regime({-1.0, 0.0}));
  CHECK(unstable_regime({0.0, 1.0}));    // both signs of the symbol attained
  CHECK(unstable_regime({0.0, -1.0}));
  CHECK(stable_regime({8.0 * kPi / 3.0, -1.0}));   // coupling min exactly 0
  CHECK(unstable_regime({8.0 * kPi / 3.0 - 1e-9, -1.0}));
  CHECK(stable_regime({4.0 * kPi / 3.0, 1.0}));
  CHECK(!fully_attractive_regime({0.0, -1.0}));
  CHECK(fully_attractive_regime({-1.0, 0.0}));
}

TEST_CASE("functionals obey the mu u(mu x) scaling law") {
  // Each dilate is resampled on a grid sized for its own support and
  // bandwidth; the dipolar piece carries weight comparable to the local one.
  const PhysParams p{1.0, 0.5};
  auto profile = [](double x, double y, double z) {
    return std::exp(-(x * x + y * y) / (2.0 * 1.5 * 1.5) -
                    z * z / (2.0 * 1.1 * 1.1));
  };
  auto inv_of = [&](double mu, int n, double L) {
    const GridSpec g = make_grid(n, L);
    const Field v = make_field(g, [&](double x, double y, double z) {
      return cplx(mu * profile(mu * x, mu * y, mu * z), 0.0);
    });
    return invariants(v, p);
  };
  const InvariantSet s0 = inv_of(1.0, 48, 12.0);
  CHECK(s0.quartic_dipolar > 0.5 * s0.quartic_local);

  struct Cfg { double mu; int n; double L; };
  for (Cfg c : {Cfg{0.5, 64, 16.0}, Cfg{2.0, 48, 8.0}}) {
    const InvariantSet s = inv_of(c.mu, c.n, c.L);
    CHECK(s.M == doctest::Approx(s0.M / c.mu).epsilon(1e-3));
    CHECK(s.H == doctest::Approx(s0.H * c.mu).epsilon(1e-3));
    CHECK(s.P == doctest::Approx(s0.P * c.mu).epsilon(1e-3));
  }
}

TEST_CASE("H^1 norm splits into mass plus kinetic") {
  const GridSpec g = make_grid(24, 6.0);
  const Field u = random_field(g, 21);
  CHECK(h1_norm_sq(u) ==
        doctest::Approx(mass(u) + kinetic(u)).epsilon(1e-12));
  const Field uh = to_frequency(u);
  CHECK(h1_norm_sq(uh) == doctest::Approx(h1_norm_sq(u)).epsilon(1e-12));
}

TEST_CASE("spectral tail fraction splits modes at n/3") {
  const GridSpec g = make_grid(24, 6.0);  // cut at |k| >= 8
  Field low(g, Space::physical), mix(g, Space::physical);
  const double a = 2.0, b = 0.5;
  for (std::int64_t i = 0; i < low.size(); ++i) {
    const auto [i1, i2, i3] = split_index(g, i);
    const double x = g.coord(i1), z = g.coord(i3);
    low[i] = a * std::exp(cplx(0.0, g.freq(2) * x));
    mix[i] = low[i] + b * std::exp(cplx(0.0, 9.0 * kPi / 6.0 * z));  // k3 = 9
  }
  CHECK(spectral_tail_fraction(to_frequency(low)) < 1e-26);
  const double frac = spectral_tail_fraction(to_frequency(mix));
  CHECK(frac == doctest::Approx(b * b / (a * a + b * b)).epsilon(1e-12));

  Field zero(g, Space::frequency);
  CHECK(spectral_tail_fraction(zero) == 0.0);
  CHECK_THROWS_AS(spectral_tail_fraction(low), ShapeError);
}

TEST_CASE("mass outside a radius tracks the Gaussian tail") {
  const GridSpec g = make_grid(64, 8.0);
  const Field u = gaussian(g, 1.0, 1.0);
  const double M = mass(u);

  CHECK(mass_outside(u, 0.0) == doctest::Approx(M).epsilon(1e-13));
  CHECK(mass_outside(u, 2.0 * g.half_width) == 0.0);
  CHECK(mass_outside(u, 1.0) > mass_outside(u, 2.0));
  CHECK(mass_outside(u, 2.0) > mass_outside(u, 3.0));

  // |u|^2 = exp(-r^2): closed-form complement of the radial integral; the
  // sharp lattice cutoff limits agreement to O(h^2) of the shell mass
  for (double R : {1.5, 2.0}) {
    const double exact =
        4.0 * kPi * (0.5 * R * std::exp(-R * R) +
                     0.25 * std::sqrt(kPi) * std::erfc(R));
    CHECK(mass_outside(u, R) == doctest::Approx(exact).epsilon(2e-2));
  }
}

TEST_CASE("gradient components differentiate plane waves exactly") {
  const GridSpec g = make_grid(16, 3.0);
  const double k1 = g.freq(2), k3 = g.freq(11);
  const Field u = make_field(g, [&](double x, double, double z) {
    return std::exp(cplx(0.0, k1 * x + k3 * z));
  });
  const Field uh = to_frequency(u);
  const Field d1 = gradient_component(uh, 1);
  const Field d2 = gradient_component(uh, 2);
  const Field d3 = gradient_component(uh, 3);
  for (std::int64_t i : {0L, 511L, 2047L}) {
    CHECK(std::abs(d1[i] - cplx(0.0, k1) * u[i]) < 1e-12);
    CHECK(std::abs(d2[i]) < 1e-12);
    CHECK(std::abs(d3[i] - cplx(0.0, k3) * u[i]) < 1e-12);
  }

  // Parseval on band-limited data: component energies sum to the kinetic
  // functional (white data would differ through the dropped unpaired mode)
  const GridSpec gs = make_grid(24, 6.0);
  const Field r = gaussian(gs, 1.0, 1.0);
  const Field rh = to_frequency(r);
  double acc = 0.0;
  for (int axis = 1; axis <= 3; ++axis) acc += mass(gradient_component(rh, axis));
  CHECK(acc == doctest::Approx(kinetic(r)).epsilon(1e-12));

  // the unpaired mode differentiates to zero
  Field nyq(g, Space::physical);
  for (std::int64_t i = 0; i < nyq.size(); ++i) {
    const auto [i1, i2, i3] = split_index(g, i);
    (void)i2;
    (void)i3;
    nyq[i] = (i1 % 2 == 0) ? 1.0 : -1.0;
  }
  const Field dn = gradient_component(to_frequency(nyq), 1);
  for (std::int64_t i : {0L, 99L}) CHECK(std::abs(dn[i]) < 1e-12);

  CHECK_THROWS_AS(gradient_component(uh, 0), ConfigError);
  CHECK_THROWS_AS(gradient_component(uh, 4), ConfigError);
  CHECK_THROWS_AS(gradient_component(u, 1), ShapeError);
}

TEST_CASE("functional values are identical across thread counts") {
  const int saved = omp_get_max_threads();
  const GridSpec g = make_grid(16, 4.0);
  const Field u = random_field(g, 77);
  const PhysParams p{-1.0, 0.3};

  omp_set_num_threads(1);
  const InvariantSet a = invariants(u, p);
  const double v1 = variance(u, ball_cutoff(1.5));
  const double w1 = virial_rate(u);
  omp_set_num_threads(4);
  const InvariantSet b = invariants(u, p);
  CHECK(a.M == b.M);
  CHECK(a.H == b.H);
  CHECK(a.P == b.P);
  CHECK(a.quartic_dipolar == b.quartic_dipolar);
  CHECK(v1 == variance(u, ball_cutoff(1.5)));
  CHECK(w1 == virial_rate(u));
  omp_set_num_threads(saved);
}
