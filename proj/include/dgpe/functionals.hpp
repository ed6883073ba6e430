#pragma once

#include "dgpe/field.hpp"
#include "dgpe/multipliers.hpp"

namespace dgpe {

struct PhysParams {
  double lambda1 = 0.0;  // cubic coupling
  double lambda2 = 0.0;  // dipolar coupling
};

// Conserved/derived functionals of a state:
//   M = int |u|^2
//   H = int |grad u|^2
//   P = lambda1 int |u|^4 + lambda2 int (K*|u|^2) |u|^2
//   E = (H + P)/2
//   G = H + (3/2) P
struct InvariantSet {
  double M = 0, H = 0, P = 0, E = 0, G = 0;
  double quartic_local = 0;    // int |u|^4
  double quartic_dipolar = 0;  // int (K*|u|^2)|u|^2
};

InvariantSet invariants(const Field& u, const PhysParams& p);

// L^2 mass; uses Parseval when handed frequency data.
double mass(const Field& u);
double kinetic(const Field& u);        // int |grad u|^2, spectral
double norm_l4_pow4(const Field& u);   // int |u|^4
double h1_norm_sq(const Field& u);     // int (1+|xi|^2)|u_hat|^2 / (2pi)^3
// lambda1 int |u|^4 + lambda2 int (K*|u|^2)|u|^2 (and the two pieces).
double interaction(const Field& u, const PhysParams& p,
                   double* quartic_local = nullptr,
                   double* quartic_dipolar = nullptr);

// (8L^3)^{-1} sum m(xi) f_hat(xi) conj(g_hat(xi)); equals the physical-space
// inner product <T_m f, g> by Parseval.
cplx multiplier_pairing(const Field& f, const Field& g,
                        const MultiplierField& m);

// Localization weights for variance-type quantities.
//   full:     |x|^2                     -> returns int |x|^2 |u|^2
//   ball:     chi_R(x) = R^2 chi(x/R)   -> returns 2 int chi_R |u|^2
//             chi radial, = |x|^2 on |x| <= R, C^2, supported in |x| <= 2R
//   cylinder: rho_R(|x_perp|) + x3^2    -> returns 2 int (...) |u|^2
//             rho(r) = r^2 (r<=1), (r-2)^2 (1<r<2), 0 (r>=2); rho'' <= 2 a.e.
struct VirialWeight {
  enum class Kind { full, ball, cylinder };
  Kind kind = Kind::full;
  double radius = 0.0;  // unused for full
};

inline VirialWeight full_variance_weight() { return {}; }
inline VirialWeight ball_cutoff(double R) {
  return {VirialWeight::Kind::ball, R};
}
inline VirialWeight cylinder_plus_x3sq(double R) {
  return {VirialWeight::Kind::cylinder, R};
}

// Scalar weight profiles (exposed for tests).
double ball_profile(double r);      // chi at unit scale
double cylinder_profile(double r);  // rho

// Samples the weight at the grid nodes (box-centered coordinates).
std::vector<double> weight_samples(const GridSpec& g, const VirialWeight& w);

double variance(const Field& u, const VirialWeight& w);

// dV/dt along the flow: 2 Im int conj(u) (x . grad u) dx.
double virial_rate(const Field& u);

// Partial derivative along axis (1-based) computed spectrally from u_hat.
Field gradient_component(const Field& u_hat, int axis);

// L^2 mass fraction carried by modes with |k|_inf >= n/3.
double spectral_tail_fraction(const Field& u_hat);

// h^3 sum over |x| >= R of |u|^2.
double mass_outside(const Field& u, double R);

}  // namespace dgpe
