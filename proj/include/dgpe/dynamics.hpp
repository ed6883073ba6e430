#pragma once

#include <array>
#include <string>
#include <vector>

#include "dgpe/field.hpp"
#include "dgpe/functionals.hpp"

namespace dgpe {

struct EvolveControls {
  double dt_init = 1e-3;
  double t_end = 1.0;
  double blowup_kinetic_factor = 100.0;  // verdict when H > factor * H(u0)
  double spectral_tail_cap = 1e-6;       // verdict when tail fraction >= cap
  int sample_every = 10;                 // steps between samples
  bool recenters = false;        // shift by the density centroid for x-weighted samples
  bool filter_two_thirds = false;  // dealias: zero modes with |k|_inf >= n/3
  double outside_radius = 0.0;   // for the outmass column; 0 means L/2
  int checkpoint_every = 0;      // write a checkpoint every k-th sample; 0 off
  std::string checkpoint_prefix;
};

enum class Verdict { completed, blowup_detected, resolution_lost };
const char* to_string(Verdict v);

struct TrajectorySample {
  double t = 0.0;
  double M = 0.0, E = 0.0, H = 0.0, P = 0.0, G = 0.0;
  double V = 0.0;        // int |x|^2 |u|^2 (recentered when requested)
  double Vdot = 0.0;     // 2 Im int conj(u) x.grad u
  double L4norm4 = 0.0;  // int |u|^4
  double supu = 0.0;
  double outmass = 0.0;  // mass outside |x| >= outside radius
  std::array<double, 3> w_localized{};  // 2 int chi_R |u|^2, R in localized_radii
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;  // first at t = 0, uniformly spaced
  Verdict verdict = Verdict::completed;
  double dt = 0.0;      // actual uniform step (t_end / steps)
  double h0 = 0.0;      // H(u0), reference for the blow-up factor
  double outside_radius = 0.0;
  std::array<double, 3> localized_radii{};  // L/8, L/4, L/2

  // Running sample-resolution trapezoid of int ||u(t)||_4^8 dt.
  double l8l4 = 0.0;

  // H^1 distance between consecutive backward-free-propagated profiles
  // e^{-i t Delta/2} u(t); entry k pairs samples k and k+1. A vanishing
  // tail is the scattering proxy.
  std::vector<double> profile_drift;
  Field scatter_prev_hat;  // backward profile at the second-to-last sample
  double scatter_prev_t = 0.0;
};

// One Strang step: half kinetic phase, exact nonlinear phase rotation
// u <- u e^{-i dt (lambda1|u|^2 + lambda2 K*|u|^2)}, half kinetic phase.
// The rotation leaves |u| pointwise invariant, which is what makes the
// nonlocal term splittable without error in the substep itself.
Field strang_step(const Field& u, const PhysParams& p, double dt);

// Integrates u in place to t_end (or a verdict) with fixed dt; the step is
// t_end/steps where steps rounds t_end/dt_init up to a sample multiple, so
// samples are exactly uniform. Monitors run at sample times only.
// Throws InputError when the datum fails health checks (non-finite
// invariants, spectral tail already above the cap) or controls are invalid.
TrajectoryRecord evolve(Field& u, const PhysParams& p,
                        const EvolveControls& c);

// Central-difference check of the virial identity on the doubled series
// W = 2V: reports max_k |W''(t_k)/4 - G(t_k)| / scale over interior samples
// (scale floors |G| at 1e-6 (H + |P|)), and the same deviation for the three
// localized weight series, which should shrink as R grows for localized
// solutions. Requires >= 5 uniformly spaced samples, else InputError.
struct VirialReport {
  double max_rel_dev = 0.0;
  std::array<double, 3> localized_dev{};
  std::array<double, 3> radii{};
};
VirialReport virial_consistency(const TrajectoryRecord& rec);

// Scattering proxies for a completed run: the L8L4 accumulator with its
// saturation (1 - last-quarter contribution), the drift series tail, and an
// independent recomputation of the final drift from u_final against the
// record's stored previous profile.
struct ScatteringReport {
  double l8l4 = 0.0;
  double saturation = 0.0;
  double final_drift = 0.0;
  // True when the last three drift entries each fall by more than 0.1%,
  // which separates dispersing tails from stationary profiles.
  bool drift_decreasing = false;
};
ScatteringReport scattering_diagnostic(const TrajectoryRecord& rec,
                                       const Field& u_final);

// Time series as CSV: header t,M,E,H,P,G,V,Vdot,L4norm4,supu,outmass.
void write_trajectory_csv(const std::string& path,
                          const TrajectoryRecord& rec);

}  // namespace dgpe
