#pragma once

#include <numbers>

#include "dgpe/functionals.hpp"

namespace dgpe {

// The effective Fourier-space coupling of the combined nonlinearity is
// lambda1 + lambda2 * Khat(xi), and Khat ranges over [-4pi/3, 8pi/3].
// Everything about stability-vs-instability of the pair (lambda1, lambda2)
// reduces to the sign of that coupling at the two extreme values.

inline constexpr double kDipolarSymbolMin = -4.0 * std::numbers::pi / 3.0;
inline constexpr double kDipolarSymbolMax = 8.0 * std::numbers::pi / 3.0;

inline double coupling_min(const PhysParams& p) {
  const double a = p.lambda1 + p.lambda2 * kDipolarSymbolMin;
  const double b = p.lambda1 + p.lambda2 * kDipolarSymbolMax;
  return a < b ? a : b;
}

inline double coupling_max(const PhysParams& p) {
  const double a = p.lambda1 + p.lambda2 * kDipolarSymbolMin;
  const double b = p.lambda1 + p.lambda2 * kDipolarSymbolMax;
  return a > b ? a : b;
}

// Unstable regime: the coupling is negative somewhere, so the interaction
// energy can be made negative and ground states / blow-up become possible.
inline bool unstable_regime(const PhysParams& p) { return coupling_min(p) < 0.0; }

// Stable regime: coupling nonnegative everywhere; interaction term is then
// pointwise nonnegative in Fourier pairing and P(u) >= 0 for every field.
inline bool stable_regime(const PhysParams& p) { return !unstable_regime(p); }

// Strictly negative everywhere: P(u) < 0 for every nonzero field.
inline bool fully_attractive_regime(const PhysParams& p) {
  return coupling_max(p) < 0.0;
}

}  // namespace dgpe
