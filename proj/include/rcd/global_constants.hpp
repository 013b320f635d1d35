#pragma once

// Scale-free constants fixed once per system: the derivative floor D on
// window annuli, the exponential weight gain eta, the envelope parameter
// threshold, and the strip depth coefficients. All of it lives in the log
// domain; D is doubly exponentially small in the multiplicities and eta is
// its inverse square.

#include <cmath>

#include "rcd/cutoff.hpp"
#include "rcd/ledger.hpp"
#include "rcd/log_real.hpp"

namespace rcd {

struct GlobalConstants {
  unsigned n = 0, N = 0;
  double a = 0.0;        // window descent ratio
  LogReal d;             // stability box constant
  double M = 0.0;        // cutoff curvature budget sup |chi'| + |chi''|
  LogReal mu_window;     // parameter floor from the window construction
  LogReal D;             // derivative floor coefficient on annuli
  LogReal eta;           // weight gain, 2(M+1)/D^2
  LogReal mu_required;   // full parameter floor including the Hessian budget
  LogReal c_strip;       // support strip depth coefficient, log(4)/(4 eta)
  LogReal d_strip;       // floor strip depth coefficient, log(6/5)/(4 eta)
};

inline GlobalConstants fix_global_constants(const ConstantsLedger& L,
                                            const CutoffSpec& chi) {
  if (!(L.a > 0.0 && L.a < 0.125))
    throw InvalidParameterError("window ratio a must lie in (0, 1/8)");
  GlobalConstants gc;
  gc.n = L.n;
  gc.N = L.N;
  gc.a = L.a;
  gc.d = L.d_box;
  gc.M = chi.M;

  double la = std::log(L.a), ld = L.d_box.log(), l2 = std::log(2.0);
  double Nd = static_cast<double>(gc.N);
  double depth = Nd * (Nd + 1.0) * (2.0 * Nd + 1.0);  // worst descent depth

  gc.mu_window = LogReal::from_log((gc.n + Nd + 3.0) * l2 - Nd * ld -
                                   depth * la);
  gc.D = LogReal::from_log(-(Nd + 2.0) * l2 + Nd * ld + depth * la);
  gc.eta = LogReal::from_value(2.0 * (chi.M + 1.0)) / (gc.D * gc.D);
  LogReal hess_budget = LogReal::from_value(std::pow(gc.n, 3.0)) *
                        LogReal::from_log((2.0 * gc.n + 5.0) * l2) * gc.eta;
  gc.mu_required = max(gc.mu_window, hess_budget.pow(0.5));
  gc.c_strip = LogReal::from_value(std::log(4.0)) /
               (LogReal::from_value(4.0) * gc.eta);
  gc.d_strip = LogReal::from_value(std::log(6.0 / 5.0)) /
               (LogReal::from_value(4.0) * gc.eta);
  return gc;
}

}  // namespace rcd
