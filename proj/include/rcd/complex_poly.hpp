#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "rcd/errors.hpp"

namespace rcd {

using Complex = std::complex<double>;

// Sparse polynomial over C in nvars() variables. Terms live in a std::map
// keyed by exponent vectors, so iteration order (and therefore printing and
// any order-dependent arithmetic) is deterministic by construction.
class ComplexPoly {
 public:
  using Exponents = std::vector<unsigned>;
  using TermMap = std::map<Exponents, Complex>;

  ComplexPoly() : nvars_(0) {}
  explicit ComplexPoly(unsigned nvars) : nvars_(nvars) {}

  unsigned nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Adds c * z^alpha, dropping the term if it cancels to zero.
  void add_term(const Exponents& alpha, Complex c) {
    if (alpha.size() != nvars_)
      throw InvalidInputError("ComplexPoly: exponent arity mismatch");
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
      if (c != Complex(0.0)) terms_.emplace(alpha, c);
      return;
    }
    it->second += c;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }

  Complex coefficient(const Exponents& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Complex(0.0) : it->second;
  }

  // Largest exponent of variable v across all terms.
  unsigned degree_in(unsigned v) const {
    unsigned d = 0;
    for (const auto& [a, c] : terms_)
      if (a[v] > d) d = a[v];
    return d;
  }

  ComplexPoly operator+(const ComplexPoly& o) const {
    ComplexPoly r = *this;
    for (const auto& [a, c] : o.terms_) r.add_term(a, c);
    return r;
  }

  ComplexPoly operator-(const ComplexPoly& o) const {
    ComplexPoly r = *this;
    for (const auto& [a, c] : o.terms_) r.add_term(a, -c);
    return r;
  }

  ComplexPoly operator*(const ComplexPoly& o) const {
    ComplexPoly r(nvars_);
    for (const auto& [a, ca] : terms_)
      for (const auto& [b, cb] : o.terms_) {
        Exponents s(nvars_);
        for (unsigned i = 0; i < nvars_; ++i) s[i] = a[i] + b[i];
        r.add_term(s, ca * cb);
      }
    return r;
  }

  ComplexPoly scaled(Complex k) const {
    ComplexPoly r(nvars_);
    if (k == Complex(0.0)) return r;
    for (const auto& [a, c] : terms_) r.terms_.emplace(a, k * c);
    return r;
  }

  // d/dz_v, holomorphic derivative.
  ComplexPoly derivative(unsigned v) const {
    ComplexPoly r(nvars_);
    for (const auto& [a, c] : terms_) {
      if (a[v] == 0) continue;
      Exponents b = a;
      b[v] -= 1;
      r.add_term(b, c * static_cast<double>(a[v]));
    }
    return r;
  }

  // Plain term-by-term evaluation in map order. Complex-scalar templated so
  // finite-difference probes can run at long double precision.
  template <typename C = Complex>
  C evaluate(const std::vector<C>& z) const {
    if (z.size() != nvars_)
      throw InvalidInputError("ComplexPoly: evaluation arity mismatch");
    C acc(0.0);
    for (const auto& [a, c] : terms_) {
      C t(c.real(), c.imag());
      for (unsigned i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < a[i]; ++k) t *= z[i];
      acc += t;
    }
    return acc;
  }

  // z_i := subs[i]; all subs share a variable space.
  ComplexPoly compose(const std::vector<ComplexPoly>& subs) const {
    if (subs.size() != nvars_)
      throw InvalidInputError("ComplexPoly: compose arity mismatch");
    unsigned out_vars = subs.empty() ? 0 : subs[0].nvars();
    ComplexPoly r(out_vars);
    // Memoized powers of each substituted component.
    std::vector<std::vector<ComplexPoly>> pows(subs.size());
    for (unsigned i = 0; i < subs.size(); ++i) {
      ComplexPoly one(out_vars);
      one.add_term(Exponents(out_vars, 0), Complex(1.0));
      pows[i].push_back(one);
    }
    auto power = [&](unsigned i, unsigned k) -> const ComplexPoly& {
      while (pows[i].size() <= k) pows[i].push_back(pows[i].back() * subs[i]);
      return pows[i][k];
    };
    for (const auto& [a, c] : terms_) {
      ComplexPoly t(out_vars);
      t.add_term(Exponents(out_vars, 0), c);
      for (unsigned i = 0; i < nvars_; ++i)
        if (a[i] > 0) t = t * power(i, a[i]);
      r = r + t;
    }
    return r;
  }

  // Recentering: returns g with g(u) = f(u + p), the full shifted polynomial
  // including its constant term g(0) = f(p). Binomial expansion per term.
  ComplexPoly shifted(const std::vector<Complex>& p) const {
    if (p.size() != nvars_)
      throw InvalidInputError("ComplexPoly: shift arity mismatch");
    ComplexPoly r(nvars_);
    for (const auto& [a, c] : terms_) {
      // Expand prod_i (u_i + p_i)^{a_i} one variable at a time.
      std::vector<std::pair<Exponents, Complex>> acc{{Exponents(nvars_, 0), c}};
      for (unsigned i = 0; i < nvars_; ++i) {
        if (a[i] == 0) continue;
        std::vector<std::pair<Exponents, Complex>> next;
        // binom(a_i, k) p_i^{a_i-k} u_i^k, k = 0..a_i
        double binom = 1.0;
        std::vector<Complex> ppow(a[i] + 1);
        ppow[0] = Complex(1.0);
        for (unsigned k = 1; k <= a[i]; ++k) ppow[k] = ppow[k - 1] * p[i];
        for (unsigned k = 0; k <= a[i]; ++k) {
          if (k > 0) binom = binom * (a[i] - k + 1) / k;
          Complex factor = binom * ppow[a[i] - k];
          if (factor == Complex(0.0)) continue;
          for (const auto& [e, cc] : acc) {
            Exponents e2 = e;
            e2[i] = k;
            next.emplace_back(std::move(e2), cc * factor);
          }
        }
        acc = std::move(next);
      }
      for (const auto& [e, cc] : acc) r.add_term(e, cc);
    }
    return r;
  }

 private:
  unsigned nvars_;
  TermMap terms_;
};

}  // namespace rcd
