#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dgpe/checkpoint.hpp"
#include "dgpe/dynamics.hpp"
#include "dgpe/errors.hpp"
#include "dgpe/fft.hpp"
#include "dgpe/field.hpp"
#include "dgpe/functionals.hpp"
#include "dgpe/ground_state.hpp"

using namespace dgpe;

namespace {

Field gaussian(const GridSpec& g, double A, double sig) {
  return make_field(g, [=](double x, double y, double z) {
    return cplx(A * std::exp(-(x * x + y * y + z * z) / (2 * sig * sig)), 0.0);
  });
}

// Shared focusing-cubic ground state.  n = 32 at L = 12 balances the box
// truncation against the spectral one; the discrete profile still carries an
// outer-third spectral fraction of ~2e-3, so runs built on it set the tail
// cap to 1e-2 instead of the strict default.
const GroundState& soliton() {
  static const GroundState q =
      solve_ground_state({-1.0, 0.0}, 20.0, make_grid(32, 12.0), 1e-7, 2000);
  return q;
}

struct Run {
  TrajectoryRecord rec;
  Field final_state;
};

// Half-amplitude soliton dispersing; sampled every step for the virial
// difference quotients.
const Run& dispersal_run() {
  static const Run r = [] {
    Run out;
    out.final_state = soliton().Q;
    for (std::int64_t i = 0; i < out.final_state.size(); ++i)
      out.final_state[i] *= 0.5;
    EvolveControls c;
    c.dt_init = 1e-2;
    c.t_end = 2.0;
    c.sample_every = 1;
    c.spectral_tail_cap = 1e-2;
    out.rec = evolve(out.final_state, soliton().params, c);
    return out;
  }();
  return r;
}

const Run& standing_run() {
  static const Run r = [] {
    Run out;
    out.final_state = soliton().Q;
    EvolveControls c;
    c.dt_init = 5e-4;
    c.t_end = 1.0;
    c.sample_every = 250;
    c.spectral_tail_cap = 1e-2;
    out.rec = evolve(out.final_state, soliton().params, c);
    return out;
  }();
  return r;
}

double max_mass_drift(const TrajectoryRecord& r) {
  double d = 0.0;
  for (const auto& s : r.samples)
    d = std::max(d, std::abs(s.M - r.samples[0].M) / r.samples[0].M);
  return d;
}

double max_energy_drift(const TrajectoryRecord& r) {
  double d = 0.0;
  for (const auto& s : r.samples)
    d = std::max(d, std::abs(s.E - r.samples[0].E) / std::abs(r.samples[0].E));
  return d;
}

double l2_distance(const Field& a, const Field& b) {
  double s2 = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) s2 += std::norm(a[i] - b[i]);
  return std::sqrt(s2 * a.grid().cell_volume());
}

}  // namespace

TEST_CASE("free propagation matches the dispersing gaussian closed form") {
  const GridSpec g = make_grid(48, 10.0);
  Field u = gaussian(g, 1.0, 1.0);
  const PhysParams p{0.0, 0.0};
  const double m0 = mass(u);
  for (int s = 0; s < 10; ++s) {
    u = strang_step(u, p, 0.1);
    CHECK(std::abs(mass(u) - m0) <= 1e-13 * m0);
  }
  // u(t,x) = (1+it)^{-3/2} exp(-|x|^2 / (2(1+it))), so at t = 1 the density
  // is 2^{-3/2} exp(-|x|^2/2).
  const double t = 1.0;
  for (std::int64_t idx : {std::int64_t(0), std::int64_t(5), std::int64_t(11)}) {
    const int c = g.n / 2;
    const std::int64_t flat =
        (std::int64_t(c) * g.n + c) * g.n + (c + idx);
    const double x = g.coord(int(c + idx));
    const double want =
        std::pow(1.0 + t * t, -1.5) * std::exp(-x * x / (1.0 + t * t));
    CHECK(std::norm(u[flat]) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("phase rotation substep conserves mass to roundoff") {
  const GridSpec g = make_grid(32, 8.0);
  for (const PhysParams p : {PhysParams{-1.0, 0.0}, PhysParams{-1.0, -0.4}}) {
    Field u = gaussian(g, 1.2, 1.3);
    const double m0 = mass(u);
    const int steps = p.lambda2 == 0.0 ? 50 : 20;
    for (int s = 0; s < steps; ++s) {
      u = strang_step(u, p, 1e-2);
      CHECK(std::abs(mass(u) - m0) <= 1e-13 * m0);
    }
  }
}

TEST_CASE("strang composition is second order in dt") {
  const GridSpec g = make_grid(32, 8.0);
  const PhysParams p{-1.0, 0.0};
  auto run = [&](double dt) {
    Field u = gaussian(g, 1.2, 1.3);
    const int ns = int(std::lround(0.5 / dt));
    for (int s = 0; s < ns; ++s) u = strang_step(u, p, dt);
    return u;
  };
  const Field ref = run(3.125e-4);
  double err[3];
  const double dts[3] = {1e-2, 5e-3, 2.5e-3};
  for (int i = 0; i < 3; ++i) err[i] = l2_distance(run(dts[i]), ref);
  const double s1 = std::log2(err[0] / err[1]);
  const double s2 = std::log2(err[1] / err[2]);
  CHECK(s1 > 1.8);
  CHECK(s1 < 2.2);
  CHECK(s2 > 1.8);
  CHECK(s2 < 2.2);
}

TEST_CASE("standing wave modulus is stationary over a long run") {
  const GroundState& q = soliton();
  const Run& r = standing_run();
  REQUIRE(r.rec.verdict == Verdict::completed);
  const double supq = max_abs(q.Q);
  double dev = 0.0;
  for (std::int64_t i = 0; i < r.final_state.size(); ++i)
    dev = std::max(dev,
                   std::abs(std::abs(r.final_state[i]) - q.Q[i].real()));
  CHECK(dev <= 1e-6 * supq);
  for (const auto& s : r.rec.samples)
    CHECK(std::abs(s.supu - supq) <= 1e-6 * supq);
  CHECK(max_mass_drift(r.rec) <= 1e-10);
  CHECK(max_energy_drift(r.rec) <= 1e-6);
}

TEST_CASE("energy drift is second order and mass is conserved along evolve") {
  const GridSpec g = make_grid(32, 8.0);
  const PhysParams p{-1.0, 0.0};
  double drift[2];
  int i = 0;
  for (double dt : {2e-3, 1e-3}) {
    Field u = gaussian(g, 0.8, 1.2);
    EvolveControls c;
    c.dt_init = dt;
    c.t_end = 0.5;
    c.sample_every = 25;
    c.spectral_tail_cap = 1e-3;
    const TrajectoryRecord r = evolve(u, p, c);
    REQUIRE(r.verdict == Verdict::completed);
    CHECK(max_mass_drift(r) <= 1e-10);
    drift[i++] = max_energy_drift(r);
  }
  CHECK(drift[1] <= 1e-6);   // measured 2.3e-9 at dt = 1e-3
  const double ratio = drift[0] / drift[1];
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.5);
}

TEST_CASE("conjugation reversal returns the datum") {
  const GridSpec g = make_grid(32, 8.0);
  const Field u0 = gaussian(g, 0.9, 1.2);
  Field u = u0;
  const PhysParams p{-1.0, -0.3};
  EvolveControls c;
  c.dt_init = 1e-3;
  c.t_end = 1.0;
  c.sample_every = 100;
  c.spectral_tail_cap = 1e-2;
  evolve(u, p, c);
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] = std::conj(u[i]);
  evolve(u, p, c);
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] = std::conj(u[i]);
  CHECK(l2_distance(u, u0) <= 1e-6);
}

TEST_CASE("free runs satisfy the virial identity and carry zero drift") {
  const GridSpec g = make_grid(32, 8.0);
  Field u = gaussian(g, 1.0, 1.2);
  const PhysParams p{0.0, 0.0};
  EvolveControls c;
  c.dt_init = 1e-2;
  c.t_end = 1.0;
  c.sample_every = 10;
  TrajectoryRecord r = evolve(u, p, c);
  REQUIRE(r.verdict == Verdict::completed);

  const VirialReport vr = virial_consistency(r);
  CHECK(vr.max_rel_dev <= 1e-6);
  CHECK(vr.localized_dev[2] < vr.localized_dev[0]);

  // Doubled variance series: W(t) = W(0) + W'(0) t + 2 H0 t^2 exactly on a
  // free flow.
  const auto& s0 = r.samples[0];
  for (const auto& s : r.samples) {
    const double pred =
        2.0 * s0.V + 2.0 * s0.Vdot * s.t + 2.0 * s0.H * s.t * s.t;
    CHECK(std::abs(2.0 * s.V - pred) <= 1e-6 * pred);
  }

  const ScatteringReport sr = scattering_diagnostic(r, u);
  CHECK(sr.final_drift <= 1e-10);
  for (double d : r.profile_drift) CHECK(d <= 1e-10);
  CHECK(sr.l8l4 > 0.0);
}

TEST_CASE("dispersing interacting run keeps the virial identity") {
  const Run& r = dispersal_run();
  REQUIRE(r.rec.verdict == Verdict::completed);
  for (const auto& s : r.rec.samples) CHECK(s.G > 0.0);

  const VirialReport vr = virial_consistency(r.rec);
  CHECK(vr.max_rel_dev <= 2e-2);  // measured 3.7e-3 at sample spacing 1e-2
  // Localized residual shrinks as the weight covers more of the solution.
  CHECK(vr.localized_dev[2] < vr.localized_dev[0]);
  CHECK(vr.localized_dev[2] < vr.localized_dev[1]);
  CHECK(vr.localized_dev[2] <= 0.2);
}

TEST_CASE("dispersing run saturates the accumulator with decaying drift") {
  const Run& r = dispersal_run();
  const ScatteringReport sr = scattering_diagnostic(r.rec, r.final_state);
  CHECK(sr.saturation >= 0.9);
  CHECK(sr.drift_decreasing);
  CHECK(sr.final_drift ==
        doctest::Approx(r.rec.profile_drift.back()).epsilon(1e-13));

  // The accumulator is the trapezoid of ||u||_4^8 over the samples.
  double acc = 0.0;
  for (std::size_t k = 1; k < r.rec.samples.size(); ++k) {
    const auto& a = r.rec.samples[k - 1];
    const auto& b = r.rec.samples[k];
    acc += 0.5 * (a.L4norm4 * a.L4norm4 + b.L4norm4 * b.L4norm4) *
           (b.t - a.t);
  }
  CHECK(r.rec.l8l4 == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("weak datum disperses with saturated accumulator") {
  const GridSpec g = make_grid(32, 12.0);
  // ||u0||_{H^1} = 0.05 Gaussian in the focusing-cubic regime.
  Field u = gaussian(g, 1.0, 2.0);
  const double scale = 0.05 / std::sqrt(h1_norm_sq(u));
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] *= scale;
  CHECK(std::sqrt(h1_norm_sq(u)) == doctest::Approx(0.05).epsilon(1e-12));

  const PhysParams p{-1.0, 0.0};
  EvolveControls c;
  c.dt_init = 5e-3;
  c.t_end = 8.0;
  c.sample_every = 40;
  TrajectoryRecord r = evolve(u, p, c);
  REQUIRE(r.verdict == Verdict::completed);
  CHECK(max_mass_drift(r) <= 1e-10);

  const ScatteringReport sr = scattering_diagnostic(r, u);
  CHECK(sr.saturation >= 0.9);  // measured 0.986
  CHECK(sr.drift_decreasing);
  CHECK(r.profile_drift.back() > 0.0);
}

TEST_CASE("standing wave reports non-scattering") {
  const Run& r = standing_run();
  const ScatteringReport sr = scattering_diagnostic(r.rec, r.final_state);
  CHECK_FALSE(sr.drift_decreasing);
  // The drift holds at the soliton's own backward-profile motion instead of
  // decaying toward zero.
  CHECK(r.rec.profile_drift.back() > 0.5);
  // Constant ||u||_4^4 makes the last quarter carry a quarter of the total.
  CHECK(sr.saturation == doctest::Approx(0.75).epsilon(2e-2));
}

TEST_CASE("scaled soliton above the ground state blows up") {
  GroundState q1 = rescale_ground_state(soliton(), 1.0);
  Field u = q1.Q;
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] *= 1.2;
  EvolveControls c;
  c.dt_init = 1e-3;
  c.t_end = 4.0;
  c.sample_every = 2;
  c.spectral_tail_cap = 0.15;
  c.blowup_kinetic_factor = 4.0;
  const TrajectoryRecord r = evolve(u, q1.params, c);
  CHECK(r.verdict == Verdict::blowup_detected);
  const std::size_t K = r.samples.size();
  REQUIRE(K >= 21);
  CHECK(r.samples.back().t < c.t_end);
  CHECK(r.samples.back().H > c.blowup_kinetic_factor * r.h0);
  for (std::size_t k = K - 20; k + 1 < K; ++k)
    CHECK(r.samples[k + 1].H > r.samples[k].H);
  CHECK(max_mass_drift(r) <= 1e-10);
}

TEST_CASE("overflow-scale collapse flips the verdict to resolution lost") {
  // Amplitude scaling u -> C u with lambda1 -> lambda1 / C^2 reproduces the
  // same collapse trajectory, but parks ||u||_4^4 near the top of the double
  // range: the concentration overflows the quartic sum mid-run.
  GroundState q1 = rescale_ground_state(soliton(), 1.0);
  const double C = 1.0e76;
  Field u = q1.Q;
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] *= 1.2 * C;
  const PhysParams p{-1.0 / (C * C), 0.0};
  EvolveControls c;
  c.dt_init = 1e-3;
  c.t_end = 4.0;
  c.sample_every = 5;
  c.spectral_tail_cap = 1.0;
  c.blowup_kinetic_factor = 1e30;
  const TrajectoryRecord r = evolve(u, p, c);
  CHECK(r.verdict == Verdict::resolution_lost);
  REQUIRE(r.samples.size() >= 5);
  CHECK(r.samples.back().t < c.t_end);
  for (const auto& s : r.samples) {
    CHECK(std::isfinite(s.M + s.E + s.H + s.P + s.G));
    CHECK(std::isfinite(s.V + s.Vdot + s.L4norm4 + s.supu + s.outmass));
  }
}

TEST_CASE("fully attractive coupling keeps the interaction negative") {
  const GridSpec g = make_grid(32, 12.0);
  Field u = make_field(g, [](double x, double y, double z) {
    const double r2 = 0.8 * x * x + y * y + 1.3 * z * z;
    return std::exp(cplx(0.0, 0.3 * x)) * std::exp(-r2 / 4.0);
  });
  const PhysParams p{-1.0, -0.05};
  EvolveControls c;
  c.dt_init = 2e-3;
  c.t_end = 0.3;
  c.sample_every = 15;
  c.spectral_tail_cap = 1e-2;
  const TrajectoryRecord r = evolve(u, p, c);
  REQUIRE(r.verdict == Verdict::completed);
  for (const auto& s : r.samples) CHECK(s.P < 0.0);
}

TEST_CASE("recentering subtracts the density centroid") {
  const GroundState& q = soliton();
  const GridSpec& g = q.Q.grid();
  const int n = g.n;
  // Lattice translation by 4 cells = 3.0 along x1.
  Field u0(g, Space::physical);
  for (std::int64_t i = 0; i < u0.size(); ++i) {
    const auto [i1, i2, i3] = split_index(g, i);
    const int j1 = (i1 + n - 4) % n;
    u0[i] = q.Q[(std::int64_t(j1) * n + i2) * n + i3];
  }
  EvolveControls c;
  c.dt_init = 1e-3;
  c.t_end = 0.1;
  c.sample_every = 20;
  c.spectral_tail_cap = 1e-2;

  Field ua = u0, ub = u0;
  c.recenters = true;
  const TrajectoryRecord rc = evolve(ua, q.params, c);
  c.recenters = false;
  const TrajectoryRecord rr = evolve(ub, q.params, c);

  CHECK(rc.samples[0].M == doctest::Approx(rr.samples[0].M).epsilon(1e-13));
  // Parallel-axis: the raw variance exceeds the recentered one by M |c|^2.
  const double shift2 = 3.0 * 3.0;
  CHECK(rr.samples[0].V ==
        doctest::Approx(rc.samples[0].V + rc.samples[0].M * shift2)
            .epsilon(1e-3));
  // Recentered variance agrees with the centered profile's own.
  CHECK(rc.samples[0].V ==
        doctest::Approx(variance(q.Q, full_variance_weight())).epsilon(1e-6));
}

TEST_CASE("checkpoints are written at the configured sample cadence") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dgpe_dyn_ck_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string prefix = (dir / "run").string();

  const GridSpec g = make_grid(32, 12.0);
  Field u = gaussian(g, 0.3, 2.0);
  const double m0 = mass(u);
  const PhysParams p{-1.0, 0.0};
  EvolveControls c;
  c.dt_init = 1e-2;
  c.t_end = 0.4;
  c.sample_every = 10;
  c.checkpoint_every = 2;
  c.checkpoint_prefix = prefix;
  const TrajectoryRecord r = evolve(u, p, c);
  REQUIRE(r.verdict == Verdict::completed);

  CHECK_FALSE(fs::exists(prefix + "_000001.ckpt"));
  CHECK_FALSE(fs::exists(prefix + "_000003.ckpt"));
  REQUIRE(fs::exists(prefix + "_000002.ckpt"));
  REQUIRE(fs::exists(prefix + "_000004.ckpt"));

  const Checkpoint ck = read_checkpoint(prefix + "_000002.ckpt");
  CHECK(ck.t == r.samples[2].t);
  CHECK(ck.u.grid() == g);
  CHECK(mass(ck.u) == doctest::Approx(m0).epsilon(1e-12));
  fs::remove_all(dir);
}

TEST_CASE("trajectory csv round trips every sampled column") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "dgpe_dyn_traj.csv";
  const Run& r = dispersal_run();
  write_trajectory_csv(path.string(), r.rec);

  std::ifstream in(path);
  REQUIRE(bool(in));
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,M,E,H,P,G,V,Vdot,L4norm4,supu,outmass");

  std::vector<std::array<double, 11>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::array<double, 11> v{};
    REQUIRE(std::sscanf(line.c_str(),
                        "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &v[0],
                        &v[1], &v[2], &v[3], &v[4], &v[5], &v[6], &v[7],
                        &v[8], &v[9], &v[10]) == 11);
    rows.push_back(v);
  }
  REQUIRE(rows.size() == r.rec.samples.size());
  for (std::size_t k : {std::size_t(0), rows.size() - 1}) {
    const auto& s = r.rec.samples[k];
    const double want[11] = {s.t, s.M, s.E,        s.H,    s.P,      s.G,
                             s.V, s.Vdot, s.L4norm4, s.supu, s.outmass};
    for (int j = 0; j < 11; ++j) CHECK(rows[k][std::size_t(j)] == want[j]);
  }
  fs::remove(path);
}

TEST_CASE("evolve output is independent of the thread count") {
  const GridSpec g = make_grid(16, 8.0);
  const PhysParams p{-1.0, -0.3};
  auto run = [&](int threads) {
    omp_set_num_threads(threads);
    Run out;
    out.final_state = gaussian(g, 0.9, 1.4);
    EvolveControls c;
    c.dt_init = 2e-3;
    c.t_end = 0.2;
    c.sample_every = 20;
    c.spectral_tail_cap = 0.2;
    out.rec = evolve(out.final_state, p, c);
    return out;
  };
  const Run a = run(1);
  const Run b = run(4);
  omp_set_num_threads(1);

  REQUIRE(a.rec.samples.size() == b.rec.samples.size());
  CHECK(std::memcmp(a.final_state.data(), b.final_state.data(),
                    sizeof(cplx) * std::size_t(g.size())) == 0);
  for (std::size_t k = 0; k < a.rec.samples.size(); ++k) {
    const auto& sa = a.rec.samples[k];
    const auto& sb = b.rec.samples[k];
    CHECK(sa.M == sb.M);
    CHECK(sa.E == sb.E);
    CHECK(sa.H == sb.H);
    CHECK(sa.P == sb.P);
    CHECK(sa.G == sb.G);
    CHECK(sa.V == sb.V);
    CHECK(sa.Vdot == sb.Vdot);
    CHECK(sa.L4norm4 == sb.L4norm4);
    CHECK(sa.supu == sb.supu);
    CHECK(sa.outmass == sb.outmass);
  }
  CHECK(a.rec.l8l4 == b.rec.l8l4);
  for (std::size_t k = 0; k < a.rec.profile_drift.size(); ++k)
    CHECK(a.rec.profile_drift[k] == b.rec.profile_drift[k]);
}

TEST_CASE("dealias filter confines the spectrum") {
  const GridSpec g = make_grid(32, 8.0);
  Field u = gaussian(g, 0.8, 1.2);
  const PhysParams p{-1.0, 0.0};
  EvolveControls c;
  c.dt_init = 2e-3;
  c.t_end = 0.3;
  c.sample_every = 30;
  c.spectral_tail_cap = 1e-3;
  c.filter_two_thirds = true;
  const TrajectoryRecord r = evolve(u, p, c);
  REQUIRE(r.verdict == Verdict::completed);
  CHECK(spectral_tail_fraction(to_frequency(u)) <= 1e-25);
  // The filter discards the aliased outer-third content the cubic phase
  // regenerates, so mass is conserved only up to the discarded tail.
  CHECK(max_mass_drift(r) <= 1e-6);
}

TEST_CASE("outside mass obeys the kinetic flux bound") {
  const GridSpec g = make_grid(32, 8.0);
  const PhysParams p{0.0, 0.0};
  double cfit[2];
  int i = 0;
  for (double R : {2.0, 4.0}) {
    Field u = gaussian(g, 1.0, 1.0);
    EvolveControls c;
    c.dt_init = 5e-3;
    c.t_end = 1.0;
    c.sample_every = 20;
    c.outside_radius = R;
    const TrajectoryRecord r = evolve(u, p, c);
    REQUIRE(r.verdict == Verdict::completed);
    const double bound = 2.0 * std::sqrt(r.samples[0].M * r.samples[0].H);
    double cr = 0.0;
    for (std::size_t k = 1; k < r.samples.size(); ++k)
      cr = std::max(cr, (r.samples[k].outmass - r.samples[0].outmass) * R /
                            r.samples[k].t);
    CHECK(cr <= bound);
    cfit[i++] = cr;
  }
  // Doubling the radius must not worsen the fitted flux constant.
  CHECK(cfit[1] <= cfit[0]);
}

TEST_CASE("controls and data are validated") {
  const GridSpec g = make_grid(16, 8.0);
  Field u = gaussian(g, 0.5, 1.5);
  const PhysParams p{-1.0, 0.0};

  const EvolveControls d;
  CHECK(d.dt_init == 1e-3);
  CHECK(d.t_end == 1.0);
  CHECK(d.blowup_kinetic_factor == 100.0);
  CHECK(d.spectral_tail_cap == 1e-6);
  CHECK(d.sample_every == 10);
  CHECK_FALSE(d.recenters);
  CHECK_FALSE(d.filter_two_thirds);

  auto bad = [&](auto mod) {
    EvolveControls c;
    c.spectral_tail_cap = 1e-2;
    mod(c);
    Field v = u;
    CHECK_THROWS_AS(evolve(v, p, c), InputError);
  };
  bad([](EvolveControls& c) { c.dt_init = 0.0; });
  bad([](EvolveControls& c) { c.dt_init = -1e-3; });
  bad([](EvolveControls& c) { c.dt_init = NAN; });
  bad([](EvolveControls& c) { c.t_end = 0.0; });
  bad([](EvolveControls& c) { c.sample_every = 0; });
  bad([](EvolveControls& c) { c.spectral_tail_cap = 0.0; });
  bad([](EvolveControls& c) { c.spectral_tail_cap = 1.5; });
  bad([](EvolveControls& c) { c.blowup_kinetic_factor = 0.0; });
  bad([](EvolveControls& c) { c.checkpoint_every = -1; });
  bad([](EvolveControls& c) { c.checkpoint_every = 2; });  // no prefix
  bad([](EvolveControls& c) { c.outside_radius = -1.0; });
  bad([](EvolveControls& c) { c.outside_radius = 100.0; });
  bad([](EvolveControls& c) { c.dt_init = 1e-12; c.t_end = 1e6; });

  // Frequency-space input is a shape error.
  {
    Field v = to_frequency(u);
    EvolveControls c;
    CHECK_THROWS_AS(evolve(v, p, c), ShapeError);
    CHECK_THROWS_AS(strang_step(v, p, 1e-2), ShapeError);
  }
  // Non-finite datum: rejected as input by evolve, as a health error by the
  // bare step.
  {
    Field v = u;
    v[3] = cplx(NAN, 0.0);
    EvolveControls c;
    CHECK_THROWS_AS(evolve(v, p, c), InputError);
    CHECK_THROWS_AS(strang_step(v, p, 1e-2), NumericalHealthError);
  }
  // Under-resolved datum: tail above the cap.
  {
    Field v(g, Space::frequency);
    for (std::int64_t i = 0; i < v.size(); ++i)
      v[i] = cplx(std::cos(double(i)), std::sin(0.7 * double(i)));
    Field w = to_physical(v);
    EvolveControls c;
    CHECK_THROWS_AS(evolve(w, p, c), InputError);
  }
  CHECK_THROWS_AS(strang_step(u, p, 0.0), InputError);

  // Diagnostics on unusable records.
  {
    TrajectoryRecord empty;
    CHECK_THROWS_AS(virial_consistency(empty), InputError);
    CHECK_THROWS_AS(scattering_diagnostic(empty, u), InputError);
  }
}

TEST_CASE("virial consistency requires a uniform time grid") {
  TrajectoryRecord rec = dispersal_run().rec;
  rec.samples.resize(4);
  CHECK_THROWS_AS(virial_consistency(rec), InputError);

  rec = dispersal_run().rec;
  rec.samples[2].t += 1e-4;
  CHECK_THROWS_AS(virial_consistency(rec), InputError);

  // Grid mismatch between the record and the supplied final state.
  const Field other = gaussian(make_grid(16, 8.0), 0.5, 1.5);
  CHECK_THROWS_AS(scattering_diagnostic(dispersal_run().rec, other),
                  ShapeError);
}
