#pragma once

#include <map>
#include <vector>

#include "rcd/complex_poly.hpp"
#include "rcd/errors.hpp"
#include "rcd/triangular_system.hpp"

namespace rcd {

// Recentered expansion of one component at a base point p:
//
//   f_s(u + p) - f_s(p) = sum_j b_j u_s^j + sum_alpha c_alpha u^alpha
//
// where the c_alpha sum runs over mixed indices (alpha_i >= 1 for some i < s,
// alpha_i = 0 for i > s). Every nonzero shifted term is one or the other, so
// the two families reconstruct the recentered polynomial exactly.
struct ComponentExpansion {
  Complex value_at_p{0.0};             // f_s(p), the constant that drops out
  std::map<unsigned, Complex> pure;    // j -> b_{s,j}(p), j >= 1
  std::map<ComplexPoly::Exponents, Complex> mixed;  // alpha -> c_{s,alpha}(p)
};

struct LocalExpansion {
  std::vector<Complex> p;
  std::vector<ComponentExpansion> comp;  // comp[s-1]

  const ComponentExpansion& at(unsigned s) const { return comp[s - 1]; }
};

// Expands a single component; s is the index of its own variable (1-based).
inline ComponentExpansion taylor_shift(const ComplexPoly& f, unsigned s,
                                       const std::vector<Complex>& p) {
  if (s < 1 || s > f.nvars())
    throw InvalidParameterError("taylor_shift: component index out of range");
  for (const auto& [alpha, c] : f.terms())
    for (unsigned i = s; i < f.nvars(); ++i)
      if (alpha[i] > 0)
        throw InvalidInputError(
            "taylor_shift: component " + std::to_string(s) +
            " uses a variable beyond its triangular range");
  ComplexPoly g = f.shifted(p);
  ComponentExpansion out;
  for (const auto& [alpha, c] : g.terms()) {
    bool has_lower = false;
    unsigned total = 0;
    for (unsigned i = 0; i < f.nvars(); ++i) {
      total += alpha[i];
      if (i + 1 < s && alpha[i] > 0) has_lower = true;
    }
    if (total == 0) {
      out.value_at_p = c;
    } else if (has_lower) {
      out.mixed.emplace(alpha, c);
    } else {
      out.pure.emplace(alpha[s - 1], c);
    }
  }
  return out;
}

inline LocalExpansion local_expansion(const TriangularSystem& sys,
                                      const std::vector<Complex>& p) {
  if (p.size() != sys.n)
    throw InvalidParameterError("local_expansion: base point arity mismatch");
  LocalExpansion ex;
  ex.p = p;
  ex.comp.reserve(sys.n);
  for (unsigned s = 1; s <= sys.n; ++s)
    ex.comp.push_back(taylor_shift(sys.component(s), s, p));
  return ex;
}

// Rebuilds f_s(u + p) - f_s(p) as a polynomial in u; test hook for the
// reconstruction identity.
inline ComplexPoly reconstruct(const ComponentExpansion& ce, unsigned nvars,
                               unsigned s) {
  ComplexPoly g(nvars);
  for (const auto& [j, b] : ce.pure) {
    ComplexPoly::Exponents alpha(nvars, 0);
    alpha[s - 1] = j;
    g.add_term(alpha, b);
  }
  for (const auto& [alpha, c] : ce.mixed) g.add_term(alpha, c);
  return g;
}

}  // namespace rcd
