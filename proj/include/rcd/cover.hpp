#pragma once

// Coverings of the degenerate set and the gain certificate.
//
// A boundary patch is swept with the window boxes R(p) = {|z_s - p_s| <=
// A_s(p)} of its own points. Points are first stratified by type signature,
// because only within a stratum are the radii of nearby windows comparable;
// the greedy sweep then walks each stratum's points in lexicographic order
// and opens a new box whenever the point is not yet inside the half-box of
// an earlier center of the same stratum. A point outside every half-box is
// in particular outside every quarter-box, so the selected centers are
// automatically (1/4)R-separated; the construction asserts it anyway, and
// the report re-measures it. The packing constant
//
//   M_T = ceil( (24 q^2)^(2n) ),   q = Q_n a^-(2N^2 + 2N + 1),
//
// bounds how many same-stratum boxes can share a point: q caps the radius
// ratio of overlapping windows, and a volume count in each of the 2n real
// dimensions does the rest. Both a and Q_n are exact powers of 2 and 5/3,
// so M_T is also carried as an exact integer next to its log-domain value.
//
// The gain certificate runs the radius construction down a geometric delta
// ladder at a fixed base point and fits the slope of log tau_n against
// log delta. The predicted exponent is 1/(2 m_1...m_n); a domain with a
// single envelope regime across the ladder gives the slope exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rcd/cutoff.hpp"
#include "rcd/envelopes.hpp"
#include "rcd/errors.hpp"
#include "rcd/ledger.hpp"
#include "rcd/local_expansion.hpp"
#include "rcd/log_real.hpp"
#include "rcd/rational.hpp"
#include "rcd/sampling.hpp"
#include "rcd/triangular_system.hpp"
#include "rcd/weights.hpp"
#include "rcd/windows.hpp"

namespace rcd {

// ---------------------------------------------------------------------------
// Overlap bound

struct OverlapBound {
  LogReal log_value;  // (24 q^2)^(2n) before the ceiling
  BigInt value;       // exact ceiling
};

// Q_n is (5/3)^e with e_1 = 1, e_s = max(1, 2 + sum_{i<s} P_i e_i); a is
// exactly 1/16. That makes (24 q^2)^(2n) a rational with numerator
// 24^(2n) 5^(4ne) 2^(16nk) and denominator 3^(4ne), k = 2N^2 + 2N + 1,
// whose ceiling is an exact integer division away.
inline OverlapBound overlap_bound(const ConstantsLedger& L) {
  unsigned n = L.n, N = L.N;
  unsigned long long k = 2ull * N * N + 2ull * N + 1ull;

  BigInt e = 1;
  {
    std::vector<BigInt> es{1};
    BigInt Pi = 1;
    for (unsigned s = 2; s <= n; ++s) {
      BigInt acc = 2;
      Pi = 1;
      for (unsigned i = 1; i < s; ++i) {
        Pi *= L.m[i - 1];
        acc += Pi * es[i - 1];
      }
      es.push_back(std::max(BigInt(1), acc));
    }
    e = es[n - 1];
  }
  BigInt efull = BigInt(4) * n * e;        // exponent of 5/3
  BigInt two_exp = BigInt(16) * n * k;     // exponent of 2
  if (efull > 1000000 || two_exp > 1000000)
    throw InvalidParameterError("covering: overlap bound exponent too large");

  using boost::multiprecision::pow;
  BigInt num = pow(BigInt(24), 2 * n) * pow(BigInt(5), efull.convert_to<unsigned>());
  num <<= two_exp.convert_to<unsigned>();
  BigInt den = pow(BigInt(3), efull.convert_to<unsigned>());

  OverlapBound out;
  out.value = (num + den - 1) / den;
  double log_q = L.Q[n - 1].log() + double(k) * std::log(16.0);
  out.log_value =
      LogReal::from_log(2.0 * n * (std::log(24.0) + 2.0 * log_q));
  return out;
}

// ---------------------------------------------------------------------------
// Grids and boxes

// Row-major lexicographic grid: the real part of each coordinate runs over
// `count` equispaced offsets in [-half_extent, +half_extent] around the
// center, imaginary parts stay fixed. Axis 1 varies slowest.
inline std::vector<std::vector<Complex>> real_grid(
    const std::vector<Complex>& center, const std::vector<double>& half_extent,
    unsigned count) {
  unsigned n = static_cast<unsigned>(center.size());
  if (half_extent.size() != n)
    throw InvalidParameterError("grid: center/extent arity mismatch");
  if (count == 0) throw InvalidParameterError("grid: count must be positive");

  std::vector<std::vector<Complex>> points;
  std::vector<unsigned> idx(n, 0);
  for (;;) {
    std::vector<Complex> p = center;
    for (unsigned i = 0; i < n; ++i) {
      double off = count == 1 ? 0.0
                              : -half_extent[i] +
                                    2.0 * half_extent[i] * idx[i] / (count - 1);
      p[i] += off;
    }
    points.push_back(std::move(p));
    unsigned axis = n;
    while (axis > 0 && ++idx[axis - 1] == count) idx[--axis] = 0;
    if (axis == 0) break;
  }
  return points;
}

struct CoverBox {
  std::vector<Complex> p;     // center
  std::vector<double> radii;  // window edges A_s = a_s tau_s at the center
  TypeSignature sig;
};

inline bool in_scaled_box(const std::vector<Complex>& z, const CoverBox& box,
                          double factor) {
  for (std::size_t s = 0; s < box.p.size(); ++s)
    if (std::abs(z[s] - box.p[s]) > factor * box.radii[s]) return false;
  return true;
}

struct Stratum {
  TypeSignature sig;
  std::size_t points = 0;           // grid points carrying this signature
  std::vector<std::size_t> boxes;   // indices into CoveringReport::boxes
};

struct CoveringReport {
  std::vector<CoverBox> boxes;  // selection order
  std::vector<Stratum> strata;  // first-appearance order
  std::size_t points = 0;
  bool covered = true;          // every point in a same-stratum half-box
  bool separated = true;        // no center in an earlier center's quarter-box
  std::size_t max_overlap = 0;  // same-stratum full boxes through one point
  OverlapBound bound;

  bool overlap_ok() const {
    return max_overlap == 0 ||
           std::log(double(max_overlap)) <= bound.log_value.log() + 1e-12;
  }
  bool pass() const { return covered && separated && overlap_ok(); }
};

inline CoveringReport build_covering(
    const TriangularSystem& sys, const ConstantsLedger& L,
    const std::vector<std::vector<Complex>>& points, LogReal delta,
    ScaleMode mode = ScaleMode::Relaxed) {
  CoveringReport rep;
  rep.points = points.size();
  rep.bound = overlap_bound(L);

  // Selection sweep. One pass in input order doubles as a per-stratum
  // lexicographic sweep: points of each stratum are met in their own order.
  std::vector<std::size_t> stratum_of(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    LocalExpansion le = local_expansion(sys, points[i]);
    ApproxSystem as = approximate(sys, L, le, delta, mode);

    std::size_t si = 0;
    while (si < rep.strata.size() && !(rep.strata[si].sig == as.sig)) ++si;
    if (si == rep.strata.size()) rep.strata.push_back({as.sig, 0, {}});
    rep.strata[si].points++;
    stratum_of[i] = si;

    bool covered = false;
    for (std::size_t b : rep.strata[si].boxes)
      if (in_scaled_box(points[i], rep.boxes[b], 0.5)) {
        covered = true;
        break;
      }
    if (covered) continue;

    for (std::size_t b : rep.strata[si].boxes)
      if (in_scaled_box(points[i], rep.boxes[b], 0.25))
        throw InternalError(
            "covering: fresh center inside an existing quarter-box");

    std::vector<DerivativeWindow> win = derivative_windows(le, as, L);
    CoverBox box{points[i], {}, as.sig};
    for (unsigned s = 0; s < L.n; ++s)
      box.radii.push_back(std::exp(win[s].log_ratio + as.log_tau[s]));
    rep.strata[si].boxes.push_back(rep.boxes.size());
    rep.boxes.push_back(std::move(box));
  }

  // Measurement passes over the finished selection.
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Stratum& st = rep.strata[stratum_of[i]];
    bool covered = false;
    std::size_t overlap = 0;
    for (std::size_t b : st.boxes) {
      if (in_scaled_box(points[i], rep.boxes[b], 0.5)) covered = true;
      if (in_scaled_box(points[i], rep.boxes[b], 1.0)) ++overlap;
    }
    rep.covered = rep.covered && covered;
    rep.max_overlap = std::max(rep.max_overlap, overlap);
  }
  for (const Stratum& st : rep.strata)
    for (std::size_t j = 1; j < st.boxes.size(); ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (in_scaled_box(rep.boxes[st.boxes[j]].p, rep.boxes[st.boxes[i]],
                          0.25))
          rep.separated = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Assembled weight

// lambda = sum over selected centers of the cut weight g attached to that
// center's window. Each summand is plurisubharmonic and supported in its own
// box, so the sum inherits both; its size at a point is at most the number
// of boxes through the point.
class AssembledWeight {
 public:
  AssembledWeight(const TriangularSystem& sys, const CoveringReport& cov,
                  const CutoffSpec& chi, LogReal eta, LogReal delta) {
    shops_.reserve(cov.boxes.size());
    for (const CoverBox& b : cov.boxes)
      shops_.emplace_back(sys, b.p, b.radii, chi, eta, delta);
  }

  std::size_t boxes() const { return shops_.size(); }

  double value(const BoundaryPoint& pt) const {
    double sum = 0.0;
    for (const WeightWorkshop& w : shops_) sum += w.g_value(pt);
    return sum;
  }

  // How many summands are alive at the point.
  std::size_t active(const BoundaryPoint& pt) const {
    std::size_t k = 0;
    for (const WeightWorkshop& w : shops_)
      if (w.g_value(pt) > 0.0) ++k;
    return k;
  }

 private:
  std::vector<WeightWorkshop> shops_;
};

// ---------------------------------------------------------------------------
// Gain certificate

struct CertificateRung {
  double log_delta = 0.0;
  std::vector<double> log_tau;  // empty when the rung was infeasible
  std::string error;            // why, when it was

  bool feasible() const { return error.empty(); }
};

struct GainCertificate {
  BigRational epsilon;  // predicted exponent 1/(2 m_1...m_n)
  std::vector<CertificateRung> rungs;
  std::vector<double> slope;  // fitted d log tau_s / d log delta per level
  double top_slope = 0.0;

  bool pass(double tol = 1e-3) const {
    return top_slope >= epsilon.convert_to<double>() - tol;
  }
};

// Least-squares slope through (log delta_k, log tau_s,k) over the ladder
// delta_k = delta_start / 10^k, k = 0 .. count-1. With skip_infeasible a
// rung too coarse for the base point is recorded with its error and left
// out of the fit instead of aborting the ladder; either way the fit wants
// at least 3 usable rungs.
inline GainCertificate gain_certificate(const TriangularSystem& sys,
                                        const ConstantsLedger& L,
                                        const std::vector<Complex>& p,
                                        LogReal delta_start, unsigned count,
                                        ScaleMode mode = ScaleMode::Relaxed,
                                        bool skip_infeasible = false) {
  GainCertificate cert;
  cert.epsilon = epsilon_prediction(sys).epsilon;

  LocalExpansion le = local_expansion(sys, p);
  unsigned usable = 0;
  for (unsigned k = 0; k < count; ++k) {
    LogReal delta =
        LogReal::from_log(delta_start.log() - k * std::log(10.0));
    try {
      ApproxSystem as = approximate(sys, L, le, delta, mode);
      cert.rungs.push_back({delta.log(), as.log_tau, ""});
      ++usable;
    } catch (const InfeasibleScaleError& e) {
      if (!skip_infeasible) throw;
      cert.rungs.push_back({delta.log(), {}, e.what()});
    }
  }
  if (usable < 3)
    throw InsufficientDataError(
        "certificate: the slope fit needs a ladder of at least 3 usable "
        "rungs, got " + std::to_string(usable));

  double xbar = 0.0;
  for (const CertificateRung& r : cert.rungs)
    if (r.feasible()) xbar += r.log_delta;
  xbar /= usable;
  for (unsigned s = 0; s < L.n; ++s) {
    double num = 0.0, den = 0.0;
    for (const CertificateRung& r : cert.rungs) {
      if (!r.feasible()) continue;
      double dx = r.log_delta - xbar;
      num += dx * r.log_tau[s];
      den += dx * dx;
    }
    cert.slope.push_back(num / den);
  }
  cert.top_slope = cert.slope.back();
  return cert;
}

}  // namespace rcd
