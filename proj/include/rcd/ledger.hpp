#pragma once

// The constants chain. Everything downstream of the coefficient bounds is
// doubly-exponentially small in the multiplicities, so every threshold is a
// LogReal; nothing here ever round-trips through the linear domain.

#include <cmath>
#include <optional>
#include <vector>

#include "rcd/errors.hpp"
#include "rcd/local_expansion.hpp"
#include "rcd/log_real.hpp"
#include "rcd/rational.hpp"
#include "rcd/triangular_system.hpp"

namespace rcd {

struct CoefficientBounds {
  std::vector<double> B;  // sup_{p in U, j >= 1} |b_{s,j}(p)|, clamped >= 1
  std::vector<double> C;  // sup over mixed indices, clamped >= 1
};

// Analytic sup bounds for the recentered coefficient families over the
// polydisc of radius U_radius: each original term c z^alpha contributes
// |c| * prod_i binom(alpha_i, beta_i) R^(|alpha| - |beta|) to the shifted
// coefficient at beta, and the triangle inequality over terms is taken in
// the worst case. Crude but certified, which is all the chain needs.
inline CoefficientBounds coefficient_bounds(const TriangularSystem& sys) {
  validate(sys);
  double R = sys.U_radius;
  CoefficientBounds out;
  for (unsigned s = 1; s <= sys.n; ++s) {
    const ComplexPoly& fs = sys.component(s);
    std::map<ComplexPoly::Exponents, double> bound;
    for (const auto& [alpha, c] : fs.terms()) {
      // enumerate beta <= alpha componentwise
      std::vector<ComplexPoly::Exponents> betas{
          ComplexPoly::Exponents(sys.n, 0)};
      std::vector<double> factors{std::abs(c)};
      for (unsigned i = 0; i < sys.n; ++i) {
        if (alpha[i] == 0) continue;
        std::vector<ComplexPoly::Exponents> nb;
        std::vector<double> nf;
        double binom = 1.0;
        for (unsigned k = 0; k <= alpha[i]; ++k) {
          if (k > 0) binom = binom * (alpha[i] - k + 1) / k;
          double rpow = std::pow(R, static_cast<double>(alpha[i] - k));
          for (size_t t = 0; t < betas.size(); ++t) {
            ComplexPoly::Exponents b2 = betas[t];
            b2[i] = k;
            nb.push_back(std::move(b2));
            nf.push_back(factors[t] * binom * rpow);
          }
        }
        betas = std::move(nb);
        factors = std::move(nf);
      }
      for (size_t t = 0; t < betas.size(); ++t) bound[betas[t]] += factors[t];
    }
    double Bs = 1.0, Cs = 1.0;
    for (const auto& [beta, v] : bound) {
      unsigned lower = 0, total = 0;
      for (unsigned i = 0; i < sys.n; ++i) {
        total += beta[i];
        if (i + 1 < s) lower += beta[i];
      }
      if (total == 0) continue;
      if (lower == 0)
        Bs = std::max(Bs, v);  // pure power of z_s
      else
        Cs = std::max(Cs, v);  // mixed index
    }
    out.B.push_back(Bs);
    out.C.push_back(Cs);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ConstantsLedger {
  unsigned n = 0;
  std::vector<unsigned> m;   // multiplicities
  unsigned N = 0;            // max_s m_s
  LogReal mu;                // envelope weight parameter, > 1
  std::vector<double> B, C;  // coefficient bounds
  std::vector<double> P;     // running products m_1*...*m_s (as doubles)

  std::vector<LogReal> M_mu;         // growth constants, M_mu[0] == 1
  std::vector<LogReal> Delta;        // per-level scale caps
  LogReal delta_mu;                  // min_s Delta_s
  LogReal delta_prime;               // radius-validity cap
  std::vector<std::optional<BigRational>> A;  // mixed-index gap exponents, > 1
  std::vector<LogReal> Delta_prime;  // per-level type-finiteness caps
  LogReal delta_tilde;               // min_s Delta'_s: the strict-mode gate

  LogReal d_box;          // coefficient-stability box shrink factor
  double a = 1.0 / 16.0;  // window descent ratio, must sit in (0, 1/8)
  std::vector<LogReal> Q;  // comparability chain constants
};

// Least weighted sum sum_i alpha_i / (m_1...m_i) strictly above 1 over mixed
// indices for level s, exact as a rational. The search window (1, 2) always
// contains the minimum when mixed indices exist at all: alpha = (1, 0, .., j)
// lands in it for a suitable j. Enumeration cap alpha_i <= 2 m_1...m_i.
inline std::optional<BigRational> mixed_gap_exponent(
    const std::vector<unsigned>& m, unsigned s) {
  if (s < 2) return std::nullopt;  // no mixed indices at the first level
  // weighted sum * P_s = sum_i alpha_i * (m_{i+1}*...*m_s) =: w
  std::vector<unsigned long long> weight(s), cap(s);
  unsigned long long Ps = 1;
  for (unsigned i = 0; i < s; ++i) Ps *= m[i];
  {
    unsigned long long head = 1;
    for (unsigned i = 0; i < s; ++i) {
      head *= m[i];
      weight[i] = Ps / head;  // m_{i+1} * ... * m_s
      cap[i] = 2 * head;      // enumeration bound 2 m_1...m_i
    }
  }
  unsigned long long best = 0;
  std::vector<unsigned long long> alpha(s, 0);
  // odometer over the box prod [0, cap_i]
  for (;;) {
    unsigned long long lower = 0, w = 0;
    for (unsigned i = 0; i < s; ++i) {
      w += alpha[i] * weight[i];
      if (i + 1 < s) lower += alpha[i];
    }
    if (lower >= 1 && w > Ps && w <= 2 * Ps && (best == 0 || w < best))
      best = w;
    unsigned i = 0;
    while (i < s && alpha[i] == cap[i]) alpha[i++] = 0;
    if (i == s) break;
    ++alpha[i];
  }
  if (best == 0)
    throw InternalError("mixed gap enumeration found no index in (1,2)");
  return BigRational(BigInt(best), BigInt(Ps));
}

// Box-shrink constant for coefficient stability: the largest half-size
// (relative to the radii) for which every recentered coefficient moves by
// at most a quarter of its value.
inline LogReal stability_box_constant(const std::vector<unsigned>& m) {
  LogReal d = LogReal::from_log(-std::log(m[0] + 1.0) -
                                (m[0] + 3.0) * std::log(2.0));
  double Ps = m[0];
  for (unsigned s = 2; s <= m.size(); ++s) {
    Ps *= m[s - 1];
    LogReal first = LogReal::from_log(-std::log(m[s - 1] + 1.0) -
                                      (m[s - 1] + s + 3.0) * std::log(2.0));
    LogReal second =
        LogReal::from_log(-std::log(Ps + 1.0) - (Ps + 3.0) * std::log(2.0));
    d = min(d, min(first, second));
  }
  return d;
}

// Comparability constants for same-type radii at overlapping base points,
// assembled from the (3/5, 5/3) coefficient-stability bounds: a pure-type
// level moves by at most (5/3)^(1/J), and a mixed-type level compounds the
// lower levels through the crossing identity.
inline std::vector<LogReal> comparability_chain(
    const std::vector<unsigned>& m) {
  const double l53 = std::log(5.0 / 3.0);
  std::vector<LogReal> Q;
  Q.push_back(LogReal::from_log(l53));
  double Pi = 1.0;
  for (unsigned s = 2; s <= m.size(); ++s) {
    double acc = 2.0 * l53;
    Pi = 1.0;
    for (unsigned i = 1; i < s; ++i) {
      Pi *= m[i - 1];
      acc += Pi * Q[i - 1].log();
    }
    Q.push_back(LogReal::from_log(std::max(l53, acc)));
  }
  return Q;
}

inline ConstantsLedger ledger(const TriangularSystem& sys, LogReal mu) {
  if (!(mu > LogReal::one()))
    throw InvalidParameterError("ledger: mu must exceed 1");
  ConstantsLedger L;
  L.m = multiplicities(sys);
  L.n = sys.n;
  L.N = *std::max_element(L.m.begin(), L.m.end());
  L.mu = mu;
  CoefficientBounds cb = coefficient_bounds(sys);
  L.B = cb.B;
  L.C = cb.C;

  L.P.resize(L.n);
  double run = 1.0;
  for (unsigned s = 0; s < L.n; ++s) {
    run *= L.m[s];
    L.P[s] = run;
  }

  // growth constants
  L.M_mu.push_back(LogReal::one());
  for (unsigned s = 2; s <= L.n; ++s) {
    LogReal prev_max = LogReal::one();
    for (unsigned i = 0; i + 1 < s; ++i) prev_max = max(prev_max, L.M_mu[i]);
    LogReal inner = mu * LogReal::from_value(L.C[s - 1]) * prev_max;
    L.M_mu.push_back(max(LogReal::one(), inner.pow(1.0 / L.m[s - 1])));
  }

  // scale caps
  LogReal half = LogReal::from_value(0.5);
  for (unsigned s = 1; s <= L.n; ++s) {
    LogReal cap = half * L.M_mu[s - 1].pow(-2.0 * L.P[s - 1]);
    LogReal d = s == 1 ? cap : min(L.Delta[s - 2], cap);
    // Delta_1 = 1/2 exactly: M_mu,1 == 1
    L.Delta.push_back(d);
  }
  L.delta_mu = L.Delta.back();

  L.delta_prime = L.delta_mu;
  for (unsigned s = 1; s <= L.n; ++s) {
    LogReal bm = LogReal::from_value(L.B[s - 1]) * L.M_mu[s - 1];
    L.delta_prime = min(L.delta_prime, bm.pow(-2.0 * L.P[s - 1]));
  }

  // type-finiteness caps
  for (unsigned s = 1; s <= L.n; ++s) {
    L.A.push_back(mixed_gap_exponent(L.m, s));
    if (!L.A.back()) {
      L.Delta_prime.push_back(L.delta_prime);
      continue;
    }
    double Aval = static_cast<double>(L.A.back()->convert_to<double>());
    LogReal denom =
        (LogReal::from_value(2.0) * mu * LogReal::from_value(L.C[s - 1]))
            .pow(2.0);
    LogReal base = L.delta_prime / denom;
    L.Delta_prime.push_back(base.pow(1.0 / (Aval - 1.0)) * L.delta_prime);
  }
  L.delta_tilde = L.Delta_prime[0];
  for (const auto& dp : L.Delta_prime) L.delta_tilde = min(L.delta_tilde, dp);

  L.d_box = stability_box_constant(L.m);
  L.Q = comparability_chain(L.m);

  // chain sanity: 0 < delta_tilde <= delta_prime <= delta_mu <= 1/2
  if (L.delta_tilde.is_zero() || L.delta_tilde > L.delta_prime ||
      L.delta_prime > L.delta_mu || L.delta_mu > half)
    throw InternalError("ledger: threshold chain ordering violated");
  for (const auto& Ms : L.M_mu)
    if (Ms < LogReal::one()) throw InternalError("ledger: M_mu below 1");
  return L;
}

// Count of admissible mixed indices at level s (weighted sum <= 1 and own
// exponent < m_s), used by the signature enumeration bound.
inline unsigned long long admissible_mixed_count(
    const std::vector<unsigned>& m, unsigned s) {
  if (s < 2) return 0;
  unsigned long long Ps = 1;
  std::vector<unsigned long long> weight(s), cap(s), head(s);
  for (unsigned i = 0; i < s; ++i) Ps *= m[i];
  {
    unsigned long long h = 1;
    for (unsigned i = 0; i < s; ++i) {
      h *= m[i];
      weight[i] = Ps / h;
      cap[i] = h;  // weighted sum <= 1 forces alpha_i <= m_1...m_i
    }
  }
  cap[s - 1] = m[s - 1] > 0 ? m[s - 1] - 1 : 0;  // own exponent below m_s
  unsigned long long count = 0;
  std::vector<unsigned long long> alpha(s, 0);
  for (;;) {
    unsigned long long lower = 0, w = 0;
    for (unsigned i = 0; i < s; ++i) {
      w += alpha[i] * weight[i];
      if (i + 1 < s) lower += alpha[i];
    }
    if (lower >= 1 && w <= Ps) ++count;
    unsigned i = 0;
    while (i < s && alpha[i] == cap[i]) alpha[i++] = 0;
    if (i == s) break;
    ++alpha[i];
  }
  return count;
}

// Upper bound for the number of distinct type signatures a strict-scale
// sweep can produce: per level, m_s choices of dominant type times the
// admissible mixed indices plus the pure marker.
inline BigInt signature_count_bound(const std::vector<unsigned>& m) {
  BigInt bound = 1;
  for (unsigned s = 1; s <= m.size(); ++s)
    bound *= BigInt(m[s - 1]) * (1 + admissible_mixed_count(m, s));
  return bound;
}

}  // namespace rcd
