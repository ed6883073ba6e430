#pragma once

#include <string>

#include "dgpe/field.hpp"
#include "dgpe/functionals.hpp"
#include "dgpe/ground_state.hpp"

namespace dgpe {

// Coupling regimes.  unstable: the (lambda1, lambda2) set where standing
// waves exist and blow-up is possible; its complement is globally
// well-behaved (every datum scatters).  restricted: the subset of the
// unstable regime on which the interaction term keeps a negative sign along
// the flow; all above-threshold statements live there.  restricted implies
// unstable.  The lambda2 = 0 edge, which the sign-split definitions leave
// open, is resolved to the common limit of both branches: lambda1 < 0.
struct RegimeLabel {
  bool unstable = false;
  bool restricted = false;
};

RegimeLabel classify_regime(const PhysParams& p);

enum class ThresholdClass {
  SC,            // below threshold, scattering side
  BC,            // below threshold, blow-up side
  SC_prime,      // above threshold, scattering side
  BC_prime,      // above threshold, blow-up side
  AT_i,          // at threshold, kinetic product below
  AT_ii,         // at threshold, kinetic product equal: exact standing wave
  AT_iii,        // at threshold, kinetic product above
  unclassified,
};

std::string to_string(ThresholdClass c);

// Every inequality side that entered a verdict, so the class can be
// re-derived from the record alone.  V0/Vdot0/zeta0 stay NaN unless the
// above-threshold machinery ran.
struct ThresholdWitnesses {
  double em = 0.0, hm = 0.0, pm = 0.0;  // ground-state products
  double EM = 0.0, HM = 0.0, PM = 0.0;  // datum products
  double V0 = 0.0, Vdot0 = 0.0, zeta0 = 0.0;
};

struct ThresholdVerdict {
  ThresholdClass cls = ThresholdClass::unclassified;
  ThresholdWitnesses witnesses;
  RegimeLabel regime;
  double tol = 0.0;  // relative band applied to every product comparison
};

// {class, witnesses, regime, tolerances} as a JSON object; non-finite
// witnesses serialize as null.
std::string verdict_json(const ThresholdVerdict& v);

// Mass-weighted |x|^2 (resp. x3^2) fraction carried outside the half-box
// |x|_inf > L/2 (resp. |x3| > L/2): the operational stand-in for finite
// full (resp. axial) variance on the torus.  Admission requires the
// fraction to stay below kVarianceTailTol.
double variance_tail_fraction(const Field& u);
double variance_tail_fraction_x3(const Field& u);
inline constexpr double kVarianceTailTol = 1e-8;

// Below-threshold dichotomy: with EM strictly below em, the kinetic product
// against hm separates scattering from blow-up data.  Comparisons use a
// relative band of width tol (the ground-state products carry solver
// error); anything landing inside a band is unclassified and belongs to the
// at-threshold classifier.  Throws RegimeError outside the unstable regime.
ThresholdVerdict classify_below(const Field& u0, const PhysParams& p,
                                const ThresholdQuantities& tq,
                                double tol = 1e-6);

// The reduced-energy minimizer feeding the above-threshold conditions:
//   zeta0    = 4 E(u0) - 8 / (27 cgn^2 M(u0)),
//   h(zeta)  = 6E - zeta - (4E - zeta)^{2/3} / (cgn^{2/3} M^{1/3}),
// with h(zeta0) = zeta0/2 checked to 1e-10 and the threshold identity
// (EM/em)(1 - zeta0/4E) = 1 checked to 1e-8 (it ties cgn to em; feeding an
// inconsistent pair is a VerificationError).  z0 = sqrt(V(0)) and
// zprime0 = V'(0)/(2 z0) carry the virial data in square-root coordinates.
// Throws InputError when E(u0) <= 0, when V(0) is degenerate (below
// 1e-12 M L^2), or when the variance tail check fails.
struct Zeta0Data {
  double zeta0 = 0.0;
  double h_at_zeta0 = 0.0;
  double z0 = 0.0;
  double zprime0 = 0.0;
};

Zeta0Data zeta0(const Field& u0, const PhysParams& p,
                const ThresholdQuantities& tq, double cgn);

// Above-threshold conjunctions: with EM >= em, the four scattering-side
// conditions (reduced energy back at or below the threshold, interaction
// product strictly inside the ground-state value, expanding virial flux)
// or their blow-up-side mirrors.  The second condition is cross-checked
// against its square-root form zprime0^2 >= zeta0/2; a disagreement away
// from the boundary is a VerificationError.  Throws RegimeError outside
// the restricted regime.
ThresholdVerdict classify_above(const Field& u0, const PhysParams& p,
                                const ThresholdQuantities& tq,
                                const Zeta0Data& z, double tol = 1e-6);

// At-threshold trichotomy for |EM - em| <= tol_at * em: the kinetic product
// picks the scenario (below / pinned to the standing wave / above).  Data
// outside the band are not at the threshold and throw InputError; callers
// route them to classify_below or classify_above.
ThresholdVerdict classify_at_threshold(const Field& u0, const PhysParams& p,
                                       const ThresholdQuantities& tq,
                                       double tol_at = 1e-6);

}  // namespace dgpe
