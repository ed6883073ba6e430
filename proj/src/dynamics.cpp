#include "dgpe/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "dgpe/checkpoint.hpp"
#include "dgpe/errors.hpp"
#include "dgpe/fft.hpp"
#include "dgpe/reductions.hpp"

namespace dgpe {

namespace {

// u <- e^{-i (tau/2) |xi|^2} u, the exact free propagator over time tau.
// Optional keep mask implements the 2/3-rule dealias cut during the same
// frequency pass.
void kinetic_phase(Field& u, double tau, const MultiplierField& lap,
                   const std::vector<unsigned char>* keep) {
  to_frequency_inplace(u);
  const std::int64_t sz = u.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < sz; ++i) {
    const double th = 0.5 * tau * lap[i];
    cplx v = u[i] * cplx(std::cos(th), -std::sin(th));
    if (keep && !(*keep)[std::size_t(i)]) v = 0.0;
    u[i] = v;
  }
  to_physical_inplace(u);
}

// u <- e^{-i dt (lambda1 |u|^2 + lambda2 K*|u|^2)} u.  |u| is pointwise
// invariant, so the substep is exact in time and conserves mass to roundoff.
void nonlinear_phase(Field& u, const PhysParams& p, double dt) {
  const std::int64_t sz = u.size();
  Field rho(u.grid(), Space::physical);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < sz; ++i) rho[i] = std::norm(u[i]);

  if (p.lambda2 != 0.0) {
    const Field phi = dipolar_potential(rho);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) {
      const double th =
          dt * (p.lambda1 * rho[i].real() + p.lambda2 * phi[i].real());
      u[i] *= cplx(std::cos(th), -std::sin(th));
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) {
      const double th = dt * p.lambda1 * rho[i].real();
      u[i] *= cplx(std::cos(th), -std::sin(th));
    }
  }
}

// Backward-free-propagated profile e^{-i t Delta/2} u(t) in frequency space:
// undoes the free flow, so it is t-independent exactly when lambda1 =
// lambda2 = 0.
Field backward_profile_hat(const Field& u, double t,
                           const MultiplierField& lap) {
  Field v = u.space() == Space::frequency ? u : to_frequency(u);
  const std::int64_t sz = v.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < sz; ++i) {
    const double th = 0.5 * t * lap[i];
    v[i] *= cplx(std::cos(th), std::sin(th));
  }
  return v;
}

double drift_between(const Field& a_hat, const Field& b_hat) {
  Field diff(a_hat.grid(), Space::frequency);
  const std::int64_t sz = diff.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < sz; ++i) diff[i] = a_hat[i] - b_hat[i];
  return std::sqrt(h1_norm_sq(diff));
}

// Density centroid in box coordinates; meaningful for data concentrated away
// from the boundary (the coordinate is discontinuous at x = +-L).
std::array<double, 3> centroid(const Field& u) {
  const GridSpec& g = u.grid();
  const double m = mass(u);
  std::array<double, 3> c{};
  if (!(m > 0.0)) return c;
  for (int axis = 0; axis < 3; ++axis) {
    const double s = det_sum(std::size_t(u.size()), [&](std::size_t i) {
      const auto [i1, i2, i3] = split_index(g, std::int64_t(i));
      const int j = axis == 0 ? i1 : axis == 1 ? i2 : i3;
      return g.coord(j) * std::norm(u[std::int64_t(i)]);
    });
    c[std::size_t(axis)] = s * g.cell_volume() / m;
  }
  return c;
}

// u(x + c) via the frequency-space phase e^{+i xi.c}.
Field shift_by(const Field& u, const std::array<double, 3>& c,
               const Field& u_hat) {
  const GridSpec& g = u.grid();
  Field v(g, Space::frequency);
  const std::int64_t sz = v.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < sz; ++i) {
    const auto [m1, m2, m3] = split_index(g, i);
    const double th =
        g.freq(m1) * c[0] + g.freq(m2) * c[1] + g.freq(m3) * c[2];
    v[i] = u_hat[i] * cplx(std::cos(th), std::sin(th));
  }
  to_physical_inplace(v);
  return v;
}

struct SampleScratch {
  MultiplierField lap;
  std::array<VirialWeight, 3> balls;
  double out_radius = 0.0;
  bool recenters = false;
};

TrajectorySample take_sample(const Field& u, const Field& u_hat,
                             const PhysParams& p, double t,
                             const SampleScratch& sc) {
  const InvariantSet q = invariants(u, p);
  TrajectorySample s;
  s.t = t;
  s.M = q.M;
  s.E = q.E;
  s.H = q.H;
  s.P = q.P;
  s.G = q.G;
  s.L4norm4 = q.quartic_local;
  s.supu = max_abs(u);

  const Field* loc = &u;
  Field shifted;
  if (sc.recenters) {
    shifted = shift_by(u, centroid(u), u_hat);
    loc = &shifted;
  }
  s.V = variance(*loc, full_variance_weight());
  s.Vdot = virial_rate(*loc);
  s.outmass = mass_outside(*loc, sc.out_radius);
  for (int i = 0; i < 3; ++i)
    s.w_localized[std::size_t(i)] = variance(*loc, sc.balls[std::size_t(i)]);
  return s;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::completed:
      return "completed";
    case Verdict::blowup_detected:
      return "blowup_detected";
    case Verdict::resolution_lost:
      return "resolution_lost";
  }
  return "unknown";
}

Field strang_step(const Field& u, const PhysParams& p, double dt) {
  if (u.space() != Space::physical)
    throw ShapeError("strang_step: expected a physical-space state");
  if (!std::isfinite(dt) || dt == 0.0)
    throw InputError("strang_step: dt must be finite and nonzero");
  check_finite(u, "strang_step input");
  const MultiplierField lap = laplacian_symbol(u.grid());
  Field v = u;
  kinetic_phase(v, 0.5 * dt, lap, nullptr);
  nonlinear_phase(v, p, dt);
  kinetic_phase(v, 0.5 * dt, lap, nullptr);
  check_finite(v, "strang_step output");
  return v;
}

TrajectoryRecord evolve(Field& u, const PhysParams& p,
                        const EvolveControls& c) {
  if (u.space() != Space::physical)
    throw ShapeError("evolve: expected a physical-space state");
  if (!(c.dt_init > 0.0) || !std::isfinite(c.dt_init))
    throw InputError("evolve: dt_init must be positive");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end))
    throw InputError("evolve: t_end must be positive");
  if (!(c.blowup_kinetic_factor > 0.0))
    throw InputError("evolve: blowup_kinetic_factor must be positive");
  if (!(c.spectral_tail_cap > 0.0) || c.spectral_tail_cap > 1.0)
    throw InputError("evolve: spectral_tail_cap must lie in (0, 1]");
  if (c.sample_every < 1) throw InputError("evolve: sample_every must be >= 1");
  if (c.checkpoint_every < 0)
    throw InputError("evolve: checkpoint_every must be >= 0");
  if (c.checkpoint_every > 0 && c.checkpoint_prefix.empty())
    throw InputError("evolve: checkpoints requested without a prefix");

  const GridSpec g = u.grid();
  if (!(c.outside_radius >= 0.0) ||
      c.outside_radius > 2.0 * g.half_width)
    throw InputError("evolve: outside_radius out of range");

  // Uniform grid in time: round the step count up to a whole number of
  // sampling blocks so samples land exactly on k * sample_every * dt.
  const std::int64_t se = c.sample_every;
  std::int64_t steps = std::int64_t(std::ceil(c.t_end / c.dt_init - 1e-12));
  if (steps < 1) steps = 1;
  steps = ((steps + se - 1) / se) * se;
  if (steps > std::int64_t(1) << 26)
    throw InputError("evolve: step count exceeds 2^26; raise dt_init");
  const double dt = c.t_end / double(steps);

  SampleScratch sc;
  sc.lap = laplacian_symbol(g);
  sc.balls = {ball_cutoff(g.half_width / 8.0), ball_cutoff(g.half_width / 4.0),
              ball_cutoff(g.half_width / 2.0)};
  sc.out_radius = c.outside_radius > 0.0 ? c.outside_radius : g.half_width / 2.0;
  sc.recenters = c.recenters;

  std::vector<unsigned char> keep;
  if (c.filter_two_thirds) {
    keep.assign(std::size_t(g.size()), 0);
    const int cut = g.n / 3;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < g.size(); ++i) {
      const auto [m1, m2, m3] = split_index(g, i);
      const int a1 = std::abs(g.wavenumber(m1));
      const int a2 = std::abs(g.wavenumber(m2));
      const int a3 = std::abs(g.wavenumber(m3));
      keep[std::size_t(i)] = (a1 < cut && a2 < cut && a3 < cut) ? 1 : 0;
    }
  }
  const std::vector<unsigned char>* mask =
      c.filter_two_thirds ? &keep : nullptr;

  TrajectoryRecord rec;
  rec.dt = dt;
  rec.outside_radius = sc.out_radius;
  rec.localized_radii = {g.half_width / 8.0, g.half_width / 4.0,
                         g.half_width / 2.0};

  // Datum health gate: finite invariants and a resolved spectrum.
  Field u_hat = to_frequency(u);
  TrajectorySample s0;
  try {
    check_finite(u, "evolve datum");
    s0 = take_sample(u, u_hat, p, 0.0, sc);
  } catch (const NumericalHealthError& e) {
    throw InputError(std::string("evolve: datum fails health checks: ") +
                     e.what());
  }
  const double tail0 = spectral_tail_fraction(u_hat);
  if (tail0 >= c.spectral_tail_cap)
    throw InputError("evolve: datum spectral tail already above the cap");
  rec.h0 = s0.H;
  rec.samples.push_back(s0);

  Field prev_hat = backward_profile_hat(u_hat, 0.0, sc.lap);
  double prev_t = 0.0;
  double prev_l8 = s0.L4norm4 * s0.L4norm4;

  const std::int64_t blocks = steps / se;
  for (std::int64_t b = 0; b < blocks; ++b) {
    try {
      // One sampling block, with the interior half-kinetic pairs fused.
      kinetic_phase(u, 0.5 * dt, sc.lap, mask);
      for (std::int64_t s = 0; s < se; ++s) {
        if (!std::isfinite(max_abs(u)))
          throw NumericalHealthError("evolve: state is no longer finite");
        nonlinear_phase(u, p, dt);
        if (s + 1 < se) kinetic_phase(u, dt, sc.lap, mask);
      }
      kinetic_phase(u, 0.5 * dt, sc.lap, mask);

      const double t = double((b + 1) * se) * dt;
      u_hat = to_frequency(u);
      const TrajectorySample s = take_sample(u, u_hat, p, t, sc);
      rec.samples.push_back(s);

      const double cur_l8 = s.L4norm4 * s.L4norm4;
      rec.l8l4 += 0.5 * (prev_l8 + cur_l8) * (t - prev_t);
      prev_l8 = cur_l8;

      Field cur_hat = backward_profile_hat(u_hat, t, sc.lap);
      rec.profile_drift.push_back(drift_between(cur_hat, prev_hat));
      rec.scatter_prev_hat = std::move(prev_hat);
      rec.scatter_prev_t = prev_t;
      prev_hat = std::move(cur_hat);
      prev_t = t;

      if (c.checkpoint_every > 0 &&
          (b + 1) % c.checkpoint_every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "_%06lld.ckpt",
                      static_cast<long long>(b + 1));
        write_checkpoint(c.checkpoint_prefix + name, u, t);
      }

      if (s.H > c.blowup_kinetic_factor * rec.h0 ||
          spectral_tail_fraction(u_hat) >= c.spectral_tail_cap) {
        rec.verdict = Verdict::blowup_detected;
        return rec;
      }
    } catch (const NumericalHealthError&) {
      rec.verdict = Verdict::resolution_lost;
      return rec;
    }
  }
  rec.verdict = Verdict::completed;
  return rec;
}

VirialReport virial_consistency(const TrajectoryRecord& rec) {
  const std::size_t K = rec.samples.size();
  if (K < 5)
    throw InputError("virial_consistency: need at least 5 samples");
  const double dt = rec.samples[1].t - rec.samples[0].t;
  if (!(dt > 0.0))
    throw InputError("virial_consistency: samples are not increasing");
  for (std::size_t k = 1; k < K; ++k) {
    const double d = rec.samples[k].t - rec.samples[k - 1].t;
    if (std::abs(d - dt) > 1e-9 * dt)
      throw InputError("virial_consistency: samples are not uniformly spaced");
  }

  VirialReport rep;
  rep.radii = rec.localized_radii;
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const TrajectorySample& a = rec.samples[k - 1];
    const TrajectorySample& s = rec.samples[k];
    const TrajectorySample& b = rec.samples[k + 1];
    const double scale =
        std::max(std::abs(s.G), 1e-6 * (s.H + std::abs(s.P)));
    if (!(scale > 0.0)) continue;
    // The doubled series W = 2V satisfies W'' = 4G along the flow.
    const double wpp = 2.0 * (b.V - 2.0 * s.V + a.V) / (dt * dt);
    rep.max_rel_dev =
        std::max(rep.max_rel_dev, std::abs(0.25 * wpp - s.G) / scale);
    for (std::size_t r = 0; r < 3; ++r) {
      const double lpp = (b.w_localized[r] - 2.0 * s.w_localized[r] +
                          a.w_localized[r]) /
                         (dt * dt);
      rep.localized_dev[r] = std::max(
          rep.localized_dev[r], std::abs(0.25 * lpp - s.G) / scale);
    }
  }
  return rep;
}

ScatteringReport scattering_diagnostic(const TrajectoryRecord& rec,
                                       const Field& u_final) {
  const std::size_t K = rec.samples.size();
  if (K < 2 || rec.profile_drift.empty() ||
      rec.scatter_prev_hat.size() == 0)
    throw InputError("scattering_diagnostic: record has fewer than 2 samples");
  if (u_final.grid() != rec.scatter_prev_hat.grid())
    throw ShapeError("scattering_diagnostic: final state grid mismatch");

  ScatteringReport rep;
  rep.l8l4 = rec.l8l4;

  // Saturation: fraction of the accumulator gathered before the last quarter
  // of the time window; ~1 means the integral has flattened.
  const double t_end = rec.samples.back().t;
  const double t_cut = 0.75 * t_end;
  double tail = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    const double ta = rec.samples[k - 1].t, tb = rec.samples[k].t;
    if (tb <= t_cut) continue;
    const double aa = rec.samples[k - 1].L4norm4 * rec.samples[k - 1].L4norm4;
    const double ab = rec.samples[k].L4norm4 * rec.samples[k].L4norm4;
    if (ta >= t_cut) {
      tail += 0.5 * (aa + ab) * (tb - ta);
    } else {
      const double f = (t_cut - ta) / (tb - ta);
      const double ac = aa + f * (ab - aa);
      tail += 0.5 * (ac + ab) * (tb - t_cut);
    }
  }
  rep.saturation = rec.l8l4 > 0.0 ? 1.0 - tail / rec.l8l4 : 0.0;

  const MultiplierField lap = laplacian_symbol(u_final.grid());
  const Field vf = backward_profile_hat(u_final, t_end, lap);
  rep.final_drift = drift_between(vf, rec.scatter_prev_hat);

  // Decreasing means by more than 0.1% per pair: dispersing tails shed a few
  // percent between samples, while a stationary profile drifts in the seventh
  // digit and must not count.
  const std::size_t D = rec.profile_drift.size();
  auto less = [](double a, double b) { return a < b * (1.0 - 1e-3); };
  rep.drift_decreasing =
      D >= 3 && less(rec.profile_drift[D - 2], rec.profile_drift[D - 3]) &&
      less(rec.profile_drift[D - 1], rec.profile_drift[D - 2]);
  return rep;
}

void write_trajectory_csv(const std::string& path,
                          const TrajectoryRecord& rec) {
  std::ofstream out(path);
  if (!out)
    throw ConfigError("write_trajectory_csv: cannot open " + path);
  out << "t,M,E,H,P,G,V,Vdot,L4norm4,supu,outmass\n";
  char line[512];
  for (const TrajectorySample& s : rec.samples) {
    std::snprintf(line, sizeof line,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g\n",
                  s.t, s.M, s.E, s.H, s.P, s.G, s.V, s.Vdot, s.L4norm4, s.supu,
                  s.outmass);
    out << line;
  }
  if (!out) throw ConfigError("write_trajectory_csv: write failed: " + path);
}

}  // namespace dgpe
