#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "dgpe/field.hpp"
#include "dgpe/multipliers.hpp"

namespace dgpe {

// Harmonic-analysis verification lab: localized pairings of Riesz-transform
// powers, decay-rate sweeps over separated supports, the fourth-order heat
// kernel behind the integral representation of the Riesz fourth power, and
// the composed-derivative machinery those estimates rest on.

// C-infinity radial cutoff in |x_bar| = (x1^2 + x2^2)^{1/2}, ramping over
// [gamma R, 1.1 gamma R] with the exp(-1/s) partition step (identically 0/1
// outside the ramp, so support statements hold exactly, not just to rounding).
//   inside:  1 on |x_bar| <= gamma R, 0 on |x_bar| >= 1.1 gamma R.
//   outside: the pointwise complement; support is exactly {|x_bar| >= gamma R}.
struct CylinderCutoff {
  enum class Side { inside, outside };
  double gamma = 1.0;
  double R = 1.0;
  Side side = Side::inside;

  double radial(double s) const;  // value as a function of s = |x_bar|
  double operator()(double x1, double x2) const;
};

// Samples the cutoff on the grid (constant along x3).  gamma and R must be
// positive and finite or this throws InputError.
Field sample_cutoff(const GridSpec& g, const CylinderCutoff& c);

// Which localized pairing a sweep exercises.
//   r4:          xi_3^4/|xi|^4 against cylinder-separated supports, decay R^-1.
//   r2r2:        xi_1^2 xi_3^2/|xi|^4, same geometry and claimed decay.
//   zero_degree: the dipolar symbol against ball-separated supports, decay
//                dist^-3.
enum class SweepKind { r4, r2r2, zero_degree };

struct DecaySweepReport {
  SweepKind kind = SweepKind::r4;
  double exponent = 1.0;           // claimed decay exponent q
  std::vector<double> radii;       // physical separation radii, increasing
  std::vector<double> pairing_abs;
  std::vector<double> norm_f1;     // L1 normalizers (fields are built unit-L1,
  std::vector<double> norm_g1;     //   so these record the residual rounding)
  std::vector<double> bound_ratio; // pairing_abs * R^q / (norm_f1 * norm_g1)
  double fitted_slope = 0.0;       // least-squares slope of log|pairing| vs log R
  // Index of the first radius whose cutoff geometry spans at least two grid
  // spacings; the bounded-ratio contract is judged from this entry on.
  std::size_t first_resolved = 0;
};

// Builds a separated pair (f outside / g inside a cylinder of the given
// gammas for the cylinder kinds; disjoint balls at distance R for
// zero_degree, where the gammas are ignored), evaluates the pairing at each
// radius, and reports the bound-ratio series for the claimed exponent.
// Radii are given in grid spacings, strictly increasing.  Throws InputError
// when the separation is nonpositive or the radii list is not admissible, and
// ConfigError when the largest construction does not fit inside the box.
DecaySweepReport decay_sweep_pairing(const GridSpec& g, SweepKind kind,
                                     double gamma1, double gamma2,
                                     const std::vector<double>& radii_units);

// CSV rendering, one row per radius: R,pairing_abs,norm_f1,norm_g1,bound_ratio
std::string sweep_csv(const DecaySweepReport& r);

// Pointwise composite of a cylinder cutoff with the Riesz square applied to
// an oppositely localized field.
//   in_out: chi_{<= gamma1 R} . R3^2[(1 - chi_{<= gamma2 R}) f], needs
//           gamma2 > gamma1; the source region is {|x_bar| >= gamma2 R}.
//   out_in: (1 - chi_{<= gamma1 R}) . R3^2[chi_{<= gamma2 R} f], needs
//           gamma1 > gamma2; the source region is {|x_bar| <= gamma2 R}.
enum class CutoffDirection { in_out, out_in };

struct PointwiseCutoffReport {
  double R = 0.0;              // physical radius
  double sup_composite = 0.0;  // sup norm of the localized composite
  double region_l1 = 0.0;      // L1 norm of f over the source region
  double bound_ratio = 0.0;    // sup_composite * R^3 / region_l1
};

// R is given in grid spacings.  Throws InputError when the separation for the
// chosen direction is nonpositive or f is not a physical-space field, and
// ConfigError when the cutoffs do not fit inside the box.
PointwiseCutoffReport pointwise_cutoff_check(const Field& f, double gamma1,
                                             double gamma2, double R_units,
                                             CutoffDirection dir);

// Radial profile of the unit-mass kernel of d/dt w + Lap^2 w = 0:
//   k(mu) = sqrt(2/pi) mu^{-1} int_0^inf e^{-s^4} s sin(mu s) ds,
// continuous at mu = 0 with k(0) = sqrt(2/pi) Gamma(3/4)/4.  Absolute
// accuracy 1e-10; mu < 0 throws InputError.
double biharmonic_kernel(double mu);

// Normalization alpha with p_t(x) = alpha k(|x|/t^{1/4}) t^{-3/4} of unit
// mass, computed as [4 pi int_0^inf s^2 k(s) ds]^{-1} and cached.
double biharmonic_alpha();

// Samples p_t on the grid (real values in a physical-space field) through a
// dense radial table of k.  t must be positive.
Field sample_heat_kernel(const GridSpec& g, double t);

// Two-route evaluation of the Riesz fourth-power pairing: the direct symbol
// sum against the time-quadrature of the fourth-derivative heat-flow pairing
//   -int_0^{t_max} <d^4/dx_axis^4 (d/dt)P_t f, g> t dt,
// with the integral past t_max restored analytically per mode
// (tail_correction).  The same node family is applied to sampled scalar
// modes, where the t-integral has a closed form, to isolate quadrature error.
struct RepresentationReport {
  int axis = 3;
  double t_max = 0.0;
  int n_quad = 0;
  std::complex<double> pairing_direct{};
  std::complex<double> pairing_quadrature{};  // truncated-time route
  std::complex<double> tail_correction{};     // analytic [t_max, inf) remainder
  double rel_dev_corrected = 0.0;  // |quad + tail - direct| / |direct|
  double rel_dev_raw = 0.0;        // |quad - direct| / |direct|
  double tail_bound_rel = 0.0;     // |tail_correction| / |direct|
  double scalar_worst_rel = 0.0;   // worst sampled-mode quadrature deviation
};

// f, g physical-space fields on one grid (ShapeError otherwise); the mean of
// f must vanish to 1e-12 of its L1 norm (InputError otherwise) since the
// time integral diverges on the zero mode.  n_quad is the Gauss-Legendre
// order per geometric panel; t_max the truncation time.
RepresentationReport r4_representation_check(const Field& f, const Field& g,
                                             double t_max, int n_quad,
                                             int axis = 3);

// One magnitude-bound term coeff * c^c_pow / r^r_pow; the full bound is the
// sum over the extracted list, with every r-power at least one.
struct BoundPair {
  double coeff = 0.0;
  int c_pow = 0;
  int r_pow = 1;
};

struct FdbPoint {
  std::array<double, 3> x{};
  double composed = 0.0;     // five-term composed fourth derivative
  double finite_diff = 0.0;  // 9-point order-6 finite-difference value
  double rel_dev = 0.0;
  double bound = 0.0;        // sum of the magnitude-bound terms at this point
};

struct FaaDiBrunoReport {
  double c = 0.0;
  std::vector<FdbPoint> points;
  double max_rel_dev = 0.0;
  bool bound_satisfied = true;   // |composed| <= bound at every point
  std::vector<BoundPair> pairs;  // the extracted magnitude-bound terms
};

// Fourth x3-derivative of sin(c|x|)/|x| evaluated through the chain-rule
// composition f(r) = sin(cr)/r with r(x3) = |x| (five Faa di Bruno terms)
// against high-order finite differences.  Points closer to the origin than
// |x| = 0.5 throw InputError.
FaaDiBrunoReport faa_di_bruno_check(double c,
                                    const std::vector<std::array<double, 3>>& pts);

struct SymbolIdentityReport {
  double ray_derivative_max = 0.0;  // max |xi . grad Khat| over sphere samples
  double homogeneity_max = 0.0;     // max |Khat(2 xi) - Khat(xi)|, same samples
  double axial_identity_max = 0.0;  // max nodewise |xi3 d_xi3 Khat - 8 pi (s - s^2)|,
                                    //   s = xi3^2/|xi|^2, over grid frequencies
  double pairing_lhs = 0.0;         // 2 int x . grad(K*f) f
  double pairing_rhs = 0.0;         // -3 int (K*f) f
  double pairing_residual = 0.0;    // |lhs - rhs| / |rhs|
};

// Analytic-gradient and nodewise checks of the dipolar symbol, plus the
// scaling identity 2 int x.grad(K*f) f = -3 int (K*f) f evaluated on an
// anisotropic Gaussian sized to the box.
SymbolIdentityReport dipolar_symbol_identities(const GridSpec& g);

// Per-assertion residual report; the representation and derivative sections
// are included when the pointers are non-null.
std::string identity_json(const SymbolIdentityReport& sym,
                          const RepresentationReport* rep = nullptr,
                          const FaaDiBrunoReport* fdb = nullptr);

}  // namespace dgpe
