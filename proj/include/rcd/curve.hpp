#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcd/errors.hpp"
#include "rcd/parse.hpp"
#include "rcd/triangular_system.hpp"

namespace rcd {

// Holomorphic polynomial curve through the origin, one component per
// ambient coordinate including z_{n+1}. Components are univariate in w.
struct Curve {
  std::vector<ComplexPoly> components;  // length n+1, each with nvars == 1

  unsigned ambient_dim() const {
    return static_cast<unsigned>(components.size());
  }
};

inline void validate(const Curve& curve) {
  if (curve.components.empty())
    throw InvalidInputError("curve: no components");
  for (const auto& g : curve.components) {
    if (g.nvars() != 1)
      throw InvalidInputError("curve: components must be univariate");
    if (g.coefficient({0}) != Complex(0.0))
      throw InvalidInputError("curve: components must vanish at w = 0");
  }
}

// Vanishing order of  r(gamma(w)) = Re gamma_{n+1}(w) + sum_s |f_s(gamma(w))|^2
// as a real-analytic germ in (w, conj w). Returns the least total degree of a
// surviving monomial w^j conj(w)^k, or nullopt when the pullback vanishes
// identically (infinite order of contact).
//
// Products of holomorphic values with conjugates are expanded symbolically
// into the (j, k) bidegree table, so conjugate-degree cancellations (the whole
// point of a sharp curve) are detected exactly rather than sampled.
inline std::optional<unsigned> contact_order(const TriangularSystem& sys,
                                             const Curve& curve) {
  validate(sys);
  validate(curve);
  if (curve.ambient_dim() != sys.n + 1)
    throw InvalidInputError("curve: expected " + std::to_string(sys.n + 1) +
                            " components, got " +
                            std::to_string(curve.ambient_dim()));

  std::map<std::pair<unsigned, unsigned>, Complex> table;
  auto put = [&](unsigned j, unsigned k, Complex c) {
    auto [it, fresh] = table.emplace(std::make_pair(j, k), c);
    if (!fresh) it->second += c;
  };

  // Re gamma_{n+1}: each coefficient splits between (j,0) and (0,j).
  const ComplexPoly& last = curve.components[sys.n];
  for (const auto& [alpha, c] : last.terms()) {
    put(alpha[0], 0, 0.5 * c);
    put(0, alpha[0], 0.5 * std::conj(c));
  }

  // |f_s(gamma)|^2: compose, then convolve against the conjugate.
  std::vector<ComplexPoly> zpart(curve.components.begin(),
                                 curve.components.begin() + sys.n);
  for (unsigned s = 1; s <= sys.n; ++s) {
    ComplexPoly g = sys.component(s).compose(zpart);
    for (const auto& [a, ca] : g.terms())
      for (const auto& [b, cb] : g.terms())
        put(a[0], b[0], ca * std::conj(cb));
  }

  // Composition of exact inputs cancels exactly; the threshold only sweeps
  // up accumulated roundoff relative to the largest surviving entry.
  double scale = 1.0;
  for (const auto& [jk, c] : table) scale = std::max(scale, std::abs(c));
  const double tol = 1e-9 * scale;

  std::optional<unsigned> order;
  for (const auto& [jk, c] : table) {
    if (std::abs(c) <= tol) continue;
    unsigned total = jk.first + jk.second;
    if (total == 0)
      throw InvalidInputError(
          "curve: pullback has a nonzero constant term; the curve must pass "
          "through the boundary point");
    if (!order || total < *order) order = total;
  }
  return order;
}

// Reads a curve from file text: n+1 components in w, one per line.
inline Curve parse_curve(const std::string& text) {
  std::vector<std::string> lines = significant_lines(text);
  if (lines.empty()) throw InvalidInputError("curve file has no components");
  Curve curve;
  for (const auto& line : lines)
    curve.components.push_back(parse_poly(line, 1, VarStyle::W));
  validate(curve);
  return curve;
}

inline std::string print_curve(const Curve& curve) {
  std::string out;
  for (const auto& g : curve.components) out += print_poly(g, VarStyle::W) + "\n";
  return out;
}

}  // namespace rcd
