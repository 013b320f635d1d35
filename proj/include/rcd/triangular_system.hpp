#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rcd/complex_poly.hpp"
#include "rcd/errors.hpp"
#include "rcd/parse.hpp"
#include "rcd/rational.hpp"

namespace rcd {

// Triangular holomorphic system defining the model domain
//   { Re z_{n+1} + sum_s |f_s(z_1..z_s)|^2 < 0 }.
// f_s may involve z_1..z_s only, vanishes at 0, and carries a pure power
// of its own variable (regularity).
struct TriangularSystem {
  unsigned n = 0;
  std::vector<ComplexPoly> f;      // f[s-1] has nvars == n
  double U_radius = 1.0;           // polydisc radius for coefficient bounds
  double normalization_scale = 1;  // cumulative multiplier applied so far

  const ComplexPoly& component(unsigned s) const { return f[s - 1]; }
};

inline void validate(const TriangularSystem& sys) {
  if (sys.n == 0 || sys.f.size() != sys.n)
    throw InvalidInputError("system: component count does not match n");
  if (!(sys.U_radius > 0))
    throw InvalidParameterError("system: U_radius must be positive");
  for (unsigned s = 1; s <= sys.n; ++s) {
    const ComplexPoly& fs = sys.component(s);
    if (fs.nvars() != sys.n)
      throw InvalidInputError("system: component arity mismatch");
    if (fs.is_zero())
      throw NotRegularError("f_" + std::to_string(s) + " is identically zero");
    for (const auto& [alpha, c] : fs.terms()) {
      unsigned total = 0;
      for (unsigned i = 0; i < sys.n; ++i) {
        if (i >= s && alpha[i] > 0)
          throw InvalidInputError("f_" + std::to_string(s) + " uses z" +
                                  std::to_string(i + 1) +
                                  " beyond its triangular range");
        total += alpha[i];
      }
      if (total == 0)
        throw InvalidInputError("f_" + std::to_string(s) +
                                " has a constant term; components must vanish "
                                "at the origin");
    }
  }
}

// m_s = least j with a nonzero pure z_s^j coefficient in f_s. These are the
// multiplicities of the system at the origin.
inline std::vector<unsigned> multiplicities(const TriangularSystem& sys) {
  validate(sys);
  std::vector<unsigned> m;
  m.reserve(sys.n);
  for (unsigned s = 1; s <= sys.n; ++s) {
    const ComplexPoly& fs = sys.component(s);
    unsigned best = 0;
    for (const auto& [alpha, c] : fs.terms()) {
      bool pure = alpha[s - 1] > 0;
      for (unsigned i = 0; i < sys.n && pure; ++i)
        if (i != s - 1 && alpha[i] > 0) pure = false;
      if (pure && (best == 0 || alpha[s - 1] < best)) best = alpha[s - 1];
    }
    if (best == 0)
      throw NotRegularError("f_" + std::to_string(s) +
                            " has no pure z" + std::to_string(s) +
                            " power; system is not regular");
    m.push_back(best);
  }
  return m;
}

// Predicted subelliptic gain. The multiplicity product is arbitrary-size:
// the denominator 2*m_1*...*m_n overflows fixed-width integers quickly and
// that must never turn into a wrong answer.
struct GainPrediction {
  BigInt m_product;      // m_1 * ... * m_n
  BigRational epsilon;   // 1 / (2 * m_product)
};

inline GainPrediction epsilon_from_multiplicities(
    const std::vector<unsigned>& m) {
  GainPrediction g;
  g.m_product = product(m);
  g.epsilon = BigRational(BigInt(1), 2 * g.m_product);
  return g;
}

inline GainPrediction epsilon_prediction(const TriangularSystem& sys) {
  return epsilon_from_multiplicities(multiplicities(sys));
}

// Pure z_s^j coefficient of f_s (zero if the monomial is absent).
inline Complex pure_coefficient(const TriangularSystem& sys, unsigned s,
                                unsigned j) {
  ComplexPoly::Exponents alpha(sys.n, 0);
  alpha[s - 1] = j;
  return sys.component(s).coefficient(alpha);
}

// Rescales all components by one common positive multiplier so every leading
// pure coefficient satisfies |b_{s,m_s}| >= 2. Idempotent: a second pass
// finds multiplier 1 (a 1e-12 slack absorbs the roundoff of the first pass).
inline TriangularSystem normalize(const TriangularSystem& sys) {
  std::vector<unsigned> m = multiplicities(sys);
  double lambda = 1.0;
  for (unsigned s = 1; s <= sys.n; ++s) {
    double need = 2.0 / std::abs(pure_coefficient(sys, s, m[s - 1]));
    if (need > lambda) lambda = need;
  }
  TriangularSystem out = sys;
  if (lambda > 1.0 + 1e-12) {
    for (auto& fs : out.f) fs = fs.scaled(Complex(lambda));
    out.normalization_scale = sys.normalization_scale * lambda;
  }
  return out;
}

// Reads a system from file text: one component per line, n inferred from the
// line count.
inline TriangularSystem parse_system(const std::string& text) {
  std::vector<std::string> lines = significant_lines(text);
  if (lines.empty()) throw InvalidInputError("system file has no polynomials");
  TriangularSystem sys;
  sys.n = static_cast<unsigned>(lines.size());
  for (const auto& line : lines)
    sys.f.push_back(parse_poly(line, sys.n, VarStyle::Z));
  validate(sys);
  return sys;
}

inline std::string print_system(const TriangularSystem& sys) {
  std::string out;
  for (const auto& fs : sys.f) out += print_poly(fs, VarStyle::Z) + "\n";
  return out;
}

}  // namespace rcd
