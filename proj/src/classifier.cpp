#include "dgpe/classifier.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

#include "dgpe/errors.hpp"
#include "dgpe/reductions.hpp"

namespace dgpe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_datum(const Field& u, const char* who) {
  if (u.space() != Space::physical)
    throw ShapeError(std::string(who) + ": datum must be in physical space");
  try {
    check_finite(u, who);
  } catch (const NumericalHealthError& e) {
    throw InputError(e.what());
  }
}

void require_quantities(const ThresholdQuantities& tq, double tol,
                        const char* who) {
  if (!(tq.em > 0.0) || !(tq.hm > 0.0) || !(tq.pm < 0.0) ||
      !std::isfinite(tq.em + tq.hm + tq.pm))
    throw InputError(std::string(who) + ": threshold products must satisfy "
                                        "em > 0, hm > 0, pm < 0");
  if (!(tol > 0.0) || !(tol <= 0.1))
    throw InputError(std::string(who) + ": tolerance band outside (0, 0.1]");
}

ThresholdWitnesses make_witnesses(const InvariantSet& s,
                                  const ThresholdQuantities& tq) {
  ThresholdWitnesses w;
  w.em = tq.em;
  w.hm = tq.hm;
  w.pm = tq.pm;
  w.EM = s.E * s.M;
  w.HM = s.H * s.M;
  w.PM = s.P * s.M;
  w.V0 = kNaN;
  w.Vdot0 = kNaN;
  w.zeta0 = kNaN;
  return w;
}

double tail_fraction(const Field& u, bool axial) {
  if (u.space() != Space::physical)
    throw ShapeError("variance_tail_fraction: physical-space field expected");
  const GridSpec& g = u.grid();
  const double half = g.half_width / 2.0;
  const double cell = g.cell_volume();
  auto term = [&](std::size_t i, bool outside_only) {
    const auto [i1, i2, i3] = split_index(g, std::int64_t(i));
    const double x = g.coord(i1), y = g.coord(i2), z = g.coord(i3);
    const double w = axial ? z * z : x * x + y * y + z * z;
    const bool out =
        axial ? std::abs(z) > half
              : std::max(std::abs(x), std::max(std::abs(y), std::abs(z))) >
                    half;
    if (outside_only && !out) return 0.0;
    return w * std::norm(u[std::int64_t(i)]);
  };
  const std::size_t n = std::size_t(u.size());
  const double tot = cell * det_sum(n, [&](std::size_t i) {
    return term(i, false);
  });
  if (!(tot > 0.0))
    throw InputError("variance_tail_fraction: zero variance");
  const double tail = cell * det_sum(n, [&](std::size_t i) {
    return term(i, true);
  });
  return tail / tot;
}

}  // namespace

RegimeLabel classify_regime(const PhysParams& p) {
  if (!std::isfinite(p.lambda1) || !std::isfinite(p.lambda2))
    throw InputError("classify_regime: non-finite couplings");
  const double a = 4.0 * M_PI / 3.0;
  RegimeLabel r;
  if (p.lambda2 > 0.0) {
    r.unstable = p.lambda1 - a * p.lambda2 < 0.0;
    r.restricted = p.lambda1 + 2.0 * a * p.lambda2 < 0.0;
  } else if (p.lambda2 < 0.0) {
    r.unstable = p.lambda1 + 2.0 * a * p.lambda2 < 0.0;
    r.restricted = p.lambda1 - a * p.lambda2 < 0.0;
  } else {
    r.unstable = p.lambda1 < 0.0;
    r.restricted = r.unstable;
  }
  return r;
}

std::string to_string(ThresholdClass c) {
  switch (c) {
    case ThresholdClass::SC: return "SC";
    case ThresholdClass::BC: return "BC";
    case ThresholdClass::SC_prime: return "SC_prime";
    case ThresholdClass::BC_prime: return "BC_prime";
    case ThresholdClass::AT_i: return "AT_i";
    case ThresholdClass::AT_ii: return "AT_ii";
    case ThresholdClass::AT_iii: return "AT_iii";
    case ThresholdClass::unclassified: return "unclassified";
  }
  return "unclassified";
}

std::string verdict_json(const ThresholdVerdict& v) {
  nlohmann::json j;
  j["class"] = to_string(v.cls);
  j["witnesses"] = {
      {"em", v.witnesses.em},   {"hm", v.witnesses.hm},
      {"pm", v.witnesses.pm},   {"EM", v.witnesses.EM},
      {"HM", v.witnesses.HM},   {"PM", v.witnesses.PM},
      {"V0", v.witnesses.V0},   {"Vdot0", v.witnesses.Vdot0},
      {"zeta0", v.witnesses.zeta0},
  };
  j["regime"] =
      v.regime.unstable ? (v.regime.restricted ? "RUR" : "UR") : "SR";
  j["tolerances"] = {{"band", v.tol}};
  return j.dump();
}

double variance_tail_fraction(const Field& u) { return tail_fraction(u, false); }

double variance_tail_fraction_x3(const Field& u) {
  return tail_fraction(u, true);
}

ThresholdVerdict classify_below(const Field& u0, const PhysParams& p,
                                const ThresholdQuantities& tq, double tol) {
  require_datum(u0, "classify_below");
  require_quantities(tq, tol, "classify_below");
  const RegimeLabel regime = classify_regime(p);
  if (!regime.unstable)
    throw RegimeError(
        "classify_below: the threshold dichotomy presumes the unstable "
        "regime");

  ThresholdVerdict v;
  v.regime = regime;
  v.tol = tol;
  const InvariantSet s = invariants(u0, p);
  v.witnesses = make_witnesses(s, tq);

  if (v.witnesses.EM < tq.em * (1.0 - tol)) {
    if (v.witnesses.HM < tq.hm * (1.0 - tol))
      v.cls = ThresholdClass::SC;
    else if (v.witnesses.HM > tq.hm * (1.0 + tol))
      v.cls = ThresholdClass::BC;
  }
  return v;
}

Zeta0Data zeta0(const Field& u0, const PhysParams& p,
                const ThresholdQuantities& tq, double cgn) {
  require_datum(u0, "zeta0");
  require_quantities(tq, 1e-6, "zeta0");
  if (!(cgn > 0.0) || !std::isfinite(cgn))
    throw InputError("zeta0: best constant must be positive");

  const InvariantSet s = invariants(u0, p);
  if (!(s.E > 0.0))
    throw InputError(
        "zeta0: the above-threshold machinery presumes positive energy");

  const GridSpec& g = u0.grid();
  const double V0 = variance(u0, full_variance_weight());
  if (V0 < 1e-12 * s.M * g.half_width * g.half_width)
    throw InputError("zeta0: degenerate variance");
  if (variance_tail_fraction(u0) > kVarianceTailTol)
    throw InputError(
        "zeta0: variance tail outside the half-box exceeds the admission "
        "tolerance");

  Zeta0Data z;
  const double c2m = std::cbrt(cgn * cgn * s.M);  // cgn^{2/3} M^{1/3}
  z.zeta0 = 4.0 * s.E - 8.0 / (27.0 * cgn * cgn * s.M);
  z.h_at_zeta0 =
      6.0 * s.E - z.zeta0 - std::cbrt((4.0 * s.E - z.zeta0) *
                                      (4.0 * s.E - z.zeta0)) / c2m;
  z.z0 = std::sqrt(V0);
  z.zprime0 = virial_rate(u0) / (2.0 * z.z0);

  // The defining relation: the minimizing zeta satisfies
  // 2 (4E - zeta0)^{-1/3} = 3 cgn^{2/3} M^{1/3}.
  const double defining =
      2.0 / (std::cbrt(4.0 * s.E - z.zeta0) * 3.0 * c2m);
  if (std::abs(defining - 1.0) > 1e-10)
    throw NumericalHealthError("zeta0: defining relation violated");
  if (std::abs(z.h_at_zeta0 - 0.5 * z.zeta0) >
      1e-10 * std::max(std::abs(z.zeta0), s.E))
    throw NumericalHealthError("zeta0: h(zeta0) = zeta0/2 violated");

  // Threshold identity tying cgn to em; fails when the caller pairs
  // quantities from different ground states.
  const double iden =
      (s.E * s.M / tq.em) * (1.0 - z.zeta0 / (4.0 * s.E));
  if (std::abs(iden - 1.0) > 1e-8)
    throw VerificationError(
        "zeta0: threshold identity residual above 1e-8; best constant and "
        "threshold products are inconsistent");
  return z;
}

ThresholdVerdict classify_above(const Field& u0, const PhysParams& p,
                                const ThresholdQuantities& tq,
                                const Zeta0Data& z, double tol) {
  require_datum(u0, "classify_above");
  require_quantities(tq, tol, "classify_above");
  const RegimeLabel regime = classify_regime(p);
  if (!regime.restricted)
    throw RegimeError(
        "classify_above: above-threshold statements presume the restricted "
        "unstable regime");

  ThresholdVerdict v;
  v.regime = regime;
  v.tol = tol;
  const InvariantSet s = invariants(u0, p);
  v.witnesses = make_witnesses(s, tq);
  if (!(s.E > 0.0))
    throw InputError("classify_above: positive energy required");
  v.witnesses.V0 = z.z0 * z.z0;
  v.witnesses.Vdot0 = 2.0 * z.z0 * z.zprime0;
  v.witnesses.zeta0 = z.zeta0;

  const bool c1 = v.witnesses.EM >= tq.em * (1.0 - tol);
  const double c2_value =
      (v.witnesses.EM / tq.em) *
      (1.0 - v.witnesses.Vdot0 * v.witnesses.Vdot0 /
                 (8.0 * s.E * v.witnesses.V0));
  const bool c2 = c2_value <= 1.0 + tol;
  const bool c3_sc = -v.witnesses.PM < -tq.pm * (1.0 - tol);
  const bool c3_bc = -v.witnesses.PM > -tq.pm * (1.0 + tol);
  const bool c4_sc = v.witnesses.Vdot0 >= 0.0;
  const bool c4_bc = v.witnesses.Vdot0 <= 0.0;

  // Square-root form of the second condition.  The two evaluations may only
  // differ when the witness sits on the boundary.
  if (c1) {
    const bool c2_alt = z.zprime0 * z.zprime0 >= 0.5 * z.zeta0;
    if (c2 != c2_alt && std::abs(c2_value - 1.0) > 1e-6)
      throw VerificationError(
          "classify_above: the two forms of the reduced-energy condition "
          "disagree away from the boundary");
  }

  const bool sc = c1 && c2 && c3_sc && c4_sc;
  const bool bc = c1 && c2 && c3_bc && c4_bc;
  if (sc && bc)
    throw NumericalHealthError(
        "classify_above: mutually exclusive conjunctions both satisfied");
  if (sc)
    v.cls = ThresholdClass::SC_prime;
  else if (bc)
    v.cls = ThresholdClass::BC_prime;
  return v;
}

ThresholdVerdict classify_at_threshold(const Field& u0, const PhysParams& p,
                                       const ThresholdQuantities& tq,
                                       double tol_at) {
  require_datum(u0, "classify_at_threshold");
  require_quantities(tq, tol_at, "classify_at_threshold");
  const RegimeLabel regime = classify_regime(p);
  if (!regime.unstable)
    throw RegimeError(
        "classify_at_threshold: the trichotomy presumes the unstable regime");

  ThresholdVerdict v;
  v.regime = regime;
  v.tol = tol_at;
  const InvariantSet s = invariants(u0, p);
  v.witnesses = make_witnesses(s, tq);
  if (std::abs(v.witnesses.EM - tq.em) > tol_at * tq.em)
    throw InputError(
        "classify_at_threshold: datum is not at the threshold; use the "
        "below/above classifiers");

  if (v.witnesses.HM < tq.hm * (1.0 - tol_at))
    v.cls = ThresholdClass::AT_i;
  else if (v.witnesses.HM <= tq.hm * (1.0 + tol_at))
    v.cls = ThresholdClass::AT_ii;
  else
    v.cls = ThresholdClass::AT_iii;
  return v;
}

}  // namespace dgpe
