#pragma once

// Approximate radii. Per level s the recentered component splits into a pure
// part (powers of u_s alone) and a mixed part (everything touching a lower
// variable). On the log-log plot both parts become upper envelopes of lines
// in x = log w:
//
//   F(x) = max_j ( log|b_j| + j x )
//   C(x) = max ( log(delta)/2,  max_alpha ( log(mu |c_alpha|) +
//                sum_{i<s} alpha_i log tau_i + alpha_s x ) )
//
// F has slopes >= 1 and C has slopes >= 0, and F sits below C for small
// radii (its lines all fall to -inf while C is floored by the delta term),
// so the radius tau_s = exp(x*) at the first crossing is well defined
// whenever a crossing exists at all inside (0,1). All crossings of two
// piecewise-linear convex functions happen at pairwise line intersections,
// so the search is exact up to float noise.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rcd/errors.hpp"
#include "rcd/ledger.hpp"
#include "rcd/local_expansion.hpp"
#include "rcd/log_real.hpp"

namespace rcd {

namespace detail {
// Attainment grouping tolerance: two line values within this (absolute, the
// quantities are logs) count as tied and the tie-break rules pick a winner.
inline constexpr double kAttainTol = 1e-12;
// A candidate crossing passes if F clears C up to this fuzz.
inline constexpr double kCrossFuzz = 1e-11;
}  // namespace detail

struct PureEnvelope {
  // (exponent j, log|b_j|), ascending in j, only nonzero coefficients
  std::vector<std::pair<unsigned, double>> lines;

  double value(double x) const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& [j, lb] : lines) v = std::max(v, lb + j * x);
    return v;
  }
  // least exponent among the attaining lines
  unsigned attaining(double x) const {
    double v = value(x);
    for (const auto& [j, lb] : lines)
      if (lb + j * x >= v - detail::kAttainTol) return j;
    throw InternalError("pure envelope attained by no line");
  }
};

inline PureEnvelope envelope_F(const ComponentExpansion& ce) {
  PureEnvelope F;
  for (const auto& [j, b] : ce.pure)
    if (std::abs(b) > 0.0) F.lines.emplace_back(j, std::log(std::abs(b)));
  return F;
}

struct MixedEnvelope {
  struct Line {
    ComplexPoly::Exponents alpha;  // full n-vector, zeros above level s
    double intercept;              // log(mu |c_alpha|) + sum_{i<s} alpha_i log tau_i
    unsigned slope;                // alpha_s
  };
  double delta_floor;  // log(delta) / 2
  std::vector<Line> lines;

  double value(double x) const {
    double v = delta_floor;
    for (const auto& l : lines) v = std::max(v, l.intercept + l.slope * x);
    return v;
  }
  // attaining element; nullptr means the delta floor (which wins ties, then
  // least own exponent, then lexicographic order of the lower exponents)
  const Line* attaining(double x) const {
    double v = value(x);
    if (delta_floor >= v - detail::kAttainTol) return nullptr;
    const Line* best = nullptr;
    for (const auto& l : lines) {
      if (l.intercept + l.slope * x < v - detail::kAttainTol) continue;
      if (!best || l.slope < best->slope ||
          (l.slope == best->slope && l.alpha < best->alpha))
        best = &l;
    }
    if (!best) throw InternalError("mixed envelope attained by no line");
    return best;
  }
};

// log_tau_prefix holds log tau_1 .. log tau_{s-1}
inline MixedEnvelope envelope_C(const ComponentExpansion& ce, unsigned s,
                                double log_mu, double log_delta,
                                const std::vector<double>& log_tau_prefix) {
  MixedEnvelope C;
  C.delta_floor = log_delta / 2.0;
  for (const auto& [alpha, c] : ce.mixed) {
    if (std::abs(c) == 0.0) continue;
    MixedEnvelope::Line l;
    l.alpha = alpha;
    l.intercept = log_mu + std::log(std::abs(c));
    for (unsigned i = 0; i + 1 < s; ++i)
      l.intercept += alpha[i] * log_tau_prefix[i];
    l.slope = alpha[s - 1];
    C.lines.push_back(std::move(l));
  }
  return C;
}

struct Crossing {
  double log_tau;    // first crossing abscissa, < 0
  double log_sigma;  // common envelope value there
};

// First x in (-inf, 0) with F(x) >= C(x). Candidates are every pairwise
// intersection of an F line with a C line (the delta floor included); the
// first candidate, in ascending order, where F clears C is the infimum of
// the crossing set, because F - C is continuous and every sign change lands
// on such an intersection.
inline std::optional<Crossing> first_crossing(const PureEnvelope& F,
                                              const MixedEnvelope& C) {
  if (F.lines.empty())
    throw DegenerateInputError(
        "component has no pure part after recentering; the point is outside "
        "the regular locus");
  std::vector<double> candidates;
  auto cross = [&](double lbF, double jF, double lbC, double jC) {
    if (jF == jC) return;
    double x = (lbC - lbF) / (jF - jC);
    if (x < 0.0 && std::isfinite(x)) candidates.push_back(x);
  };
  for (const auto& [j, lb] : F.lines) {
    cross(lb, j, C.delta_floor, 0.0);
    for (const auto& l : C.lines) cross(lb, j, l.intercept, l.slope);
  }
  std::sort(candidates.begin(), candidates.end());
  for (double x : candidates) {
    double fx = F.value(x), cx = C.value(x);
    if (fx >= cx - detail::kCrossFuzz) {
      if (std::abs(fx - cx) > 1e-10)
        throw InternalError("crossing candidate is not an envelope contact");
      return Crossing{x, fx};
    }
  }
  return std::nullopt;
}

// Reference implementation for the same quantity: scan a fine grid for the
// first sign flip of F - C and bisect. Slow and only float-accurate, which
// is exactly what makes it an independent check on the candidate sweep.
inline std::optional<Crossing> first_crossing_bisect(const PureEnvelope& F,
                                                     const MixedEnvelope& C,
                                                     size_t grid = 200000) {
  if (F.lines.empty())
    throw DegenerateInputError("component has no pure part after recentering");
  // Start far enough left that every F line (slope >= 1) sits below the
  // delta floor, which bounds C from below; C's other lines only raise it.
  double top = 0.0;
  for (const auto& [j, lb] : F.lines) top = std::max(top, lb);
  double lo = C.delta_floor - top - 1.0;
  double hi = 0.0;
  auto diff = [&](double x) { return F.value(x) - C.value(x); };
  if (diff(lo) >= 0.0)
    throw InternalError("bisection bracket start already crossed");
  double prev = lo;
  for (size_t k = 1; k <= grid; ++k) {
    double x = lo + (hi - lo) * static_cast<double>(k) / grid;
    if (diff(x) >= 0.0) {
      double a = prev, b = x;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a));
           ++it) {
        double mid = 0.5 * (a + b);
        (diff(mid) >= 0.0 ? b : a) = mid;
      }
      return Crossing{b, F.value(b)};
    }
    prev = x;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

struct TypeSignature {
  // per level: dominant exponent J_s and the mixed index K_s attaining the
  // control envelope at tau_s (all-zero vector = the delta floor)
  std::vector<unsigned> J;
  std::vector<ComplexPoly::Exponents> K;
  bool operator==(const TypeSignature&) const = default;
  bool operator<(const TypeSignature& o) const {
    return std::tie(J, K) < std::tie(o.J, o.K);
  }
};

inline std::string to_string(const TypeSignature& sig) {
  std::string out;
  for (size_t s = 0; s < sig.J.size(); ++s) {
    if (s) out += " ";
    out += "J" + std::to_string(s + 1) + "=" + std::to_string(sig.J[s]);
    out += ",K" + std::to_string(s + 1) + "=";
    bool pure = true;
    for (unsigned k : sig.K[s])
      if (k) pure = false;
    if (pure) {
      out += "-";
    } else {
      out += "(";
      for (size_t i = 0; i <= s; ++i)
        out += (i ? "," : "") + std::to_string(sig.K[s][i]);
      out += ")";
    }
  }
  return out;
}

enum class ScaleMode { Strict, Relaxed };

struct ApproxSystem {
  std::vector<Complex> p;
  double log_mu = 0.0;
  double log_delta = 0.0;
  ScaleMode mode = ScaleMode::Strict;
  std::vector<double> log_tau;    // approximate radii, log domain
  std::vector<double> log_sigma;  // envelope heights at the radii
  TypeSignature sig;

  LogReal tau(unsigned s) const { return LogReal::from_log(log_tau[s - 1]); }
  LogReal sigma(unsigned s) const {
    return LogReal::from_log(log_sigma[s - 1]);
  }
};

// Sequential radius construction at a base point. Strict mode insists on the
// type-finiteness gate delta <= delta_tilde and enforces the signature
// constraints the theory guarantees there; relaxed mode only needs
// delta <= 1/2 and reports whatever the envelopes produce.
inline ApproxSystem approximate(const TriangularSystem& sys,
                                const ConstantsLedger& L,
                                const LocalExpansion& le, LogReal delta,
                                ScaleMode mode = ScaleMode::Strict) {
  if (delta.is_zero() || delta.log() > std::log(0.5) + 1e-15)
    throw InvalidParameterError("approximate: delta must lie in (0, 1/2]");
  if (mode == ScaleMode::Strict && delta > L.delta_tilde)
    throw InvalidParameterError(
        "approximate: strict mode needs delta <= delta_tilde = " +
        decimal_string(L.delta_tilde) + ", got " + decimal_string(delta));

  ApproxSystem as;
  as.p = le.p;
  as.log_mu = L.mu.log();
  as.log_delta = delta.log();
  as.mode = mode;

  for (unsigned s = 1; s <= sys.n; ++s) {
    PureEnvelope F = envelope_F(le.at(s));
    MixedEnvelope C =
        envelope_C(le.at(s), s, as.log_mu, as.log_delta, as.log_tau);
    auto x = first_crossing(F, C);
    if (!x)
      throw InfeasibleScaleError(
          "no envelope crossing inside (0,1) at level " + std::to_string(s) +
          "; the scale is too coarse for this base point");
    as.log_tau.push_back(x->log_tau);
    as.log_sigma.push_back(x->log_sigma);

    unsigned J = F.attaining(x->log_tau);
    const MixedEnvelope::Line* K = C.attaining(x->log_tau);
    as.sig.J.push_back(J);
    as.sig.K.push_back(K ? K->alpha : ComplexPoly::Exponents(sys.n, 0));

    // height floor: the crossing never dips below the delta term
    if (x->log_sigma < as.log_delta / 2.0 - 1e-9)
      throw InternalError("envelope height fell below the scale floor");

    if (mode == ScaleMode::Strict) {
      if (J < 1 || J > L.m[s - 1])
        throw InternalError(
            "dominant exponent escaped [1, m_s] in strict mode");
      if (K) {
        double wsum = 0.0;
        for (unsigned i = 0; i < s; ++i)
          wsum += static_cast<double>(K->alpha[i]) / L.P[i];
        if (wsum > 1.0 + 1e-12 || K->alpha[s - 1] >= J)
          throw InternalError(
              "mixed type violates admissibility in strict mode");
      }
    }
  }
  return as;
}

inline ApproxSystem approximate(const TriangularSystem& sys,
                                const ConstantsLedger& L,
                                const std::vector<Complex>& p, LogReal delta,
                                ScaleMode mode = ScaleMode::Strict) {
  return approximate(sys, L, local_expansion(sys, p), delta, mode);
}

inline TypeSignature type_signature(const TriangularSystem& sys,
                                    const ConstantsLedger& L,
                                    const std::vector<Complex>& p,
                                    LogReal delta,
                                    ScaleMode mode = ScaleMode::Strict) {
  return approximate(sys, L, p, delta, mode).sig;
}

// ---------------------------------------------------------------------------

struct ScalingReport {
  double log_factor;           // log a, a < 1
  std::vector<double> margin;  // per level, >= -tol means the law holds
  bool pass = false;
};

// Scaling law for the radii: shrinking delta by a factor shrinks tau_s by at
// least a^(1 / (2 m_1...m_s)). Valid below delta_prime; the caller picks the
// scales, this just measures.
inline ScalingReport scaling_check(const TriangularSystem& sys,
                                   const ConstantsLedger& L,
                                   const LocalExpansion& le, LogReal delta,
                                   double factor, ScaleMode mode,
                                   double tol = 1e-9) {
  if (!(factor > 0.0 && factor < 1.0))
    throw InvalidParameterError("scaling_check: factor must lie in (0,1)");
  ApproxSystem base = approximate(sys, L, le, delta, mode);
  ApproxSystem fine =
      approximate(sys, L, le, delta * LogReal::from_value(factor), mode);
  ScalingReport rep;
  rep.log_factor = std::log(factor);
  rep.pass = true;
  for (unsigned s = 1; s <= sys.n; ++s) {
    double allowed =
        base.log_tau[s - 1] + rep.log_factor / (2.0 * L.P[s - 1]);
    double margin = allowed - fine.log_tau[s - 1];
    rep.margin.push_back(margin);
    if (margin < -tol) rep.pass = false;
  }
  return rep;
}

struct StabilityReport {
  bool comparable = false;     // signatures agree
  bool in_box = false;         // p2 inside the shrunk box around p1
  std::vector<double> log_ratio;     // log(tau_s(p1) / tau_s(p2))
  std::vector<double> coeff_drift;   // |b_J(p2) - b_J(p1)| / |b_J(p1)|
  bool ratios_pass = false;    // every ratio within [1/Q_s, Q_s]
  bool coeffs_pass = false;    // every drift <= 1/4 (meaningful when in_box)
};

// Stability of the construction under moving the base point within the
// d-shrunk polydisc of radii tau_s(p1).
inline StabilityReport stability_check(const TriangularSystem& sys,
                                       const ConstantsLedger& L,
                                       const std::vector<Complex>& p1,
                                       const std::vector<Complex>& p2,
                                       LogReal delta,
                                       ScaleMode mode = ScaleMode::Strict) {
  LocalExpansion le1 = local_expansion(sys, p1);
  LocalExpansion le2 = local_expansion(sys, p2);
  ApproxSystem a1 = approximate(sys, L, le1, delta, mode);
  ApproxSystem a2 = approximate(sys, L, le2, delta, mode);

  StabilityReport rep;
  rep.comparable = a1.sig == a2.sig;
  rep.in_box = true;
  for (unsigned s = 1; s <= sys.n; ++s) {
    double lim = L.d_box.log() + a1.log_tau[s - 1];
    if (std::log(std::abs(p2[s - 1] - p1[s - 1])) > lim) rep.in_box = false;
  }

  rep.ratios_pass = true;
  rep.coeffs_pass = true;
  for (unsigned s = 1; s <= sys.n; ++s) {
    double lr = a1.log_tau[s - 1] - a2.log_tau[s - 1];
    rep.log_ratio.push_back(lr);
    if (std::abs(lr) > L.Q[s - 1].log() + 1e-9) rep.ratios_pass = false;

    unsigned J = a1.sig.J[s - 1];
    Complex b1 = 0.0, b2 = 0.0;
    if (auto it = le1.at(s).pure.find(J); it != le1.at(s).pure.end())
      b1 = it->second;
    if (auto it = le2.at(s).pure.find(J); it != le2.at(s).pure.end())
      b2 = it->second;
    double drift = std::abs(b1) == 0.0
                       ? std::numeric_limits<double>::infinity()
                       : std::abs(b2 - b1) / std::abs(b1);
    rep.coeff_drift.push_back(drift);
    if (drift > 0.25 + 1e-12) rep.coeffs_pass = false;
  }
  return rep;
}

}  // namespace rcd
