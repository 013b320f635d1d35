#pragma once

// The two scalar profiles behind the weight functions.
//
// chi is the box cutoff, fed |u_s|^2 / (a_s tau_s)^2. It climbs a shallow
// linear ramp on [0, 1/2] (slope 1/(2n), so the n cutoffs jointly add a
// uniform Hessian floor inside the half-box), then a C^2 quintic bridge
// takes it to zero at 1 with flat value, slope, and curvature. The bridge
// is not monotone: it inherits slope +1/(2n) at the junction, so it rises
// briefly before falling. What matters downstream is its range and its
// curvature budget M, not monotonicity.
//
// P is the convexifying ramp applied to the composite weight: a cubic hinge
// that vanishes identically below 1/4 and reaches 1 at 1, so composition
// preserves plurisubharmonicity (P', P'' >= 0) and supports cut off exactly.

#include <cmath>
#include <vector>

#include "rcd/errors.hpp"

namespace rcd {

struct CutoffSpec {
  unsigned n = 1;   // number of levels sharing the ramp budget
  double v0 = 0.0;  // value at the bridge start t = 1/2
  double d0 = 0.0;  // slope there (the ramp slope 1/(2n))
  double M = 0.0;   // certified upper bound for sup |chi'| + |chi''|
  double peak = 0.0;  // certified upper bound for sup chi, < 3/4

  // The bridge basis polynomials are kept factored over their triple root
  // at s = 1: A = (1-s)^3 (6s^2 + 3s + 1) and B = s (1-s)^3 (1 + 3s). The
  // expanded forms cancel catastrophically near the root, leaving roundoff
  // dust of either sign where the true value decays like (1-s)^3; factored,
  // nonnegativity and the decay are structural.
  template <typename T = double>
  T value(T t) const {
    if (t >= T(1)) return T(0);
    if (t <= T(0.5)) return t * T(d0) + T(v0) - T(0.5) * T(d0);
    T s = T(2) * (t - T(0.5));
    T om = T(1) - s, om3 = om * om * om;
    T A = om3 * (T(6) * s * s + T(3) * s + T(1));
    T B = s * om3 * (T(1) + T(3) * s);
    return T(v0) * A + T(d0) * T(0.5) * B;
  }

  double deriv(double t) const {
    if (t >= 1.0) return 0.0;
    if (t <= 0.5) return d0;
    double s = 2.0 * (t - 0.5);
    double om = 1.0 - s;
    double dA = -30.0 * s * s * om * om;
    double dB = om * om * (1.0 + 2.0 * s - 15.0 * s * s);
    return 2.0 * (v0 * dA + d0 * 0.5 * dB);
  }

  double second(double t) const {
    if (t >= 1.0 || t <= 0.5) return 0.0;
    double s = 2.0 * (t - 0.5);
    double om = 1.0 - s;
    double ddA = -60.0 * s * om * (1.0 - 2.0 * s);
    double ddB = -12.0 * s * om * (3.0 - 5.0 * s);
    return 4.0 * (v0 * ddA + d0 * 0.5 * ddB);
  }

  // complex Hessian contribution of chi(|u|^2 / A^2) at its own coordinate,
  // before the 1/A^2 factor: chi''(t) t + chi'(t)
  double hessian_profile(double t) const { return second(t) * t + deriv(t); }
};

inline CutoffSpec make_cutoff(unsigned n) {
  if (n == 0) throw InvalidParameterError("make_cutoff: n must be positive");
  CutoffSpec chi;
  chi.n = n;
  chi.d0 = 0.5 / n;
  chi.v0 = 0.75 - 0.25 / n;  // ramp value at t = 1/2

  // Certified sups by dense scan plus a derivative-based pad. The third
  // derivative of the bridge is bounded by 8(|v0| sup|A'''| + |d0/2| sup|B'''|)
  // with sup|A'''| <= 780, sup|B'''| <= 390 on [0,1], so between grid nodes
  // the scanned quantities move by at most step * bound.
  const size_t K = 200000;
  double sup_m = 0.0, sup_v = 0.0;
  for (size_t k = 0; k <= K; ++k) {
    double t = static_cast<double>(k) / K;
    sup_m = std::max(sup_m, std::abs(chi.deriv(t)) + std::abs(chi.second(t)));
    sup_v = std::max(sup_v, chi.value(t));
  }
  double d3 = 8.0 * (chi.v0 * 780.0 + chi.d0 * 0.5 * 390.0);
  double d2 = 4.0 * (chi.v0 * 10.5 + chi.d0 * 0.5 * 6.5);
  chi.M = sup_m + (d2 + d3) / K;
  chi.peak = sup_v + (chi.d0 + d2) / K;
  if (chi.peak >= 0.75)
    throw InternalError("cutoff peak escaped [0, 3/4); support logic broken");
  return chi;
}

// Cubic hinge ramp: P(t) = (64/27) max(t - 1/4, 0)^3.
struct PSpec {
  static constexpr double kappa = 64.0 / 27.0;

  template <typename T = double>
  static T value(T t) {
    T h = t - T(0.25);
    if (h <= T(0)) return T(0);
    return T(kappa) * h * h * h;
  }
  static double deriv(double t) {
    double h = t - 0.25;
    return h <= 0.0 ? 0.0 : 3.0 * kappa * h * h;
  }
  static double second(double t) {
    double h = t - 0.25;
    return h <= 0.0 ? 0.0 : 6.0 * kappa * h;
  }
  // slope floor used by the strip Hessian bound: P'(1/3) = 4/81
  static constexpr double slope_floor = 4.0 / 81.0;
};

}  // namespace rcd
