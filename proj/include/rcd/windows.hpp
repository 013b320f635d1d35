#pragma once

// Derivative windows. Below the crossing radius the pure envelope is a max
// of finitely many lines, and on a short enough log-interval a single line
// dominates; on the corresponding annulus the s-derivative of the component
// is controlled from below by that one term. The descent probes intervals
// [a^(2N+1) w, w] starting at w = d tau_s: if the least attaining exponent
// differs at the two ends it strictly dropped (the envelope is convex, so
// attaining exponents are nondecreasing in the radius), and since only the
// exponents 1..J_s <= N can attain below tau_s, at most N descents happen.
// A line attaining at both ends of an interval attains throughout it, again
// by convexity.

#include <cmath>
#include <string>
#include <vector>

#include "rcd/envelopes.hpp"
#include "rcd/ledger.hpp"

namespace rcd {

struct DerivativeWindow {
  unsigned level = 0;      // which component, 1-based
  unsigned index = 0;      // the dominating exponent on the window
  unsigned stages = 0;     // descents taken, <= N
  double log_w1 = 0.0;     // inner probe radius, log domain
  double log_w2 = 0.0;     // outer probe radius; the chi box edge a_s tau_s
  double log_ratio = 0.0;  // log a_s = log_w2 - log tau_s
};

inline DerivativeWindow derivative_window(const PureEnvelope& F,
                                          double log_tau,
                                          const ConstantsLedger& L,
                                          unsigned level) {
  double la = std::log(L.a);
  double span = (2.0 * L.N + 1.0) * la;  // probe interval length, negative
  double top = L.d_box.log() + log_tau;
  for (unsigned stage = 0; stage <= L.N; ++stage) {
    double hi = top + stage * span;
    double lo = hi + span;
    unsigned jh = F.attaining(hi);
    unsigned jl = F.attaining(lo);
    if (jh == jl) {
      DerivativeWindow w;
      w.level = level;
      w.index = jh;
      w.stages = stage;
      w.log_w2 = L.N * la + hi;
      w.log_w1 = la + w.log_w2;
      w.log_ratio = w.log_w2 - log_tau;
      // a_s stays within [d a^((N+1)(2N+1)), d a^N]
      double lo_ok = L.d_box.log() + (L.N + 1.0) * (2.0 * L.N + 1.0) * la;
      double hi_ok = L.d_box.log() + L.N * la;
      if (w.log_ratio < lo_ok - 1e-9 || w.log_ratio > hi_ok + 1e-9)
        throw InternalError("window ratio escaped its stated range");
      return w;
    }
  }
  throw ConstructionError(
      "window descent failed to stabilize at level " + std::to_string(level) +
      " within N+1 stages; the envelope has more active exponents than the "
      "multiplicity allows");
}

// Windows for every level of an approximate system at its base point.
inline std::vector<DerivativeWindow> derivative_windows(
    const LocalExpansion& le, const ApproxSystem& as,
    const ConstantsLedger& L) {
  std::vector<DerivativeWindow> out;
  for (unsigned s = 1; s <= L.n; ++s)
    out.push_back(derivative_window(envelope_F(le.at(s)), as.log_tau[s - 1],
                                    L, s));
  return out;
}

}  // namespace rcd
