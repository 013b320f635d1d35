#pragma once

// Text format for polynomial systems and test curves.
//
//   file   :=  one polynomial per non-blank line; '#' starts a comment
//   poly   :=  [sign] term { ('+'|'-') term }
//   term   :=  coeff [ '*' vars ] | vars
//   coeff  :=  real | real 'i' | '(' real ('+'|'-') real 'i' ')'
//   vars   :=  var [ '^' uint ] { [ '*' ] var [ '^' uint ] }
//   var    :=  'z' uint          (systems; z1 .. zn)
//           |  'w'               (curves)
//
// Examples:  z1^2          2*z2^3 - z1          (1+2i)*z1*z2^2 + 0.5i*z3

#include <cctype>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "rcd/complex_poly.hpp"
#include "rcd/errors.hpp"

namespace rcd {

enum class VarStyle { Z, W };

namespace detail {

class Cursor {
 public:
  explicit Cursor(const std::string& s) : s_(s) {}
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  char take() {
    skip_ws();
    return s_[pos_++];
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& why) {
    throw InvalidInputError("parse error at column " + std::to_string(pos_ + 1) +
                            ": " + why + " in \"" + s_ + "\"");
  }

  double number() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
    bool digits = false;
    while (pos_ < s_.size() && (std::isdigit(s_[pos_]) || s_[pos_] == '.')) {
      digits = digits || std::isdigit(s_[pos_]);
      ++pos_;
    }
    if (!digits) fail("expected a number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      size_t mark = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(s_[pos_])) {
        while (pos_ < s_.size() && std::isdigit(s_[pos_])) ++pos_;
      } else {
        pos_ = mark;  // bare 'e' was not an exponent
      }
    }
    return std::stod(s_.substr(start, pos_ - start));
  }

  unsigned uinteger() {
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit(s_[pos_])) fail("expected an integer");
    unsigned v = 0;
    while (pos_ < s_.size() && std::isdigit(s_[pos_]))
      v = v * 10 + static_cast<unsigned>(s_[pos_++] - '0');
    return v;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
};

// coeff := '(' re (+|-) im 'i' ')' | real ['i']
inline Complex parse_coeff(Cursor& c) {
  if (c.accept('(')) {
    double re = c.number();
    char sign = c.take();
    if (sign != '+' && sign != '-') c.fail("expected '+' or '-' in complex literal");
    double im = c.number();
    if (!c.accept('i')) c.fail("expected 'i' in complex literal");
    if (!c.accept(')')) c.fail("expected ')'");
    return {re, sign == '-' ? -im : im};
  }
  double v = c.number();
  if (c.accept('i')) return {0.0, v};
  return {v, 0.0};
}

}  // namespace detail

// Parses one polynomial line. nvars is the declared variable count; for
// VarStyle::W it must be 1 and the only variable is w.
inline ComplexPoly parse_poly(const std::string& line, unsigned nvars,
                              VarStyle style) {
  detail::Cursor c(line);
  ComplexPoly f(nvars);
  bool first = true;
  while (!c.done()) {
    double sign = 1.0;
    char pk = c.peek();
    if (pk == '+' || pk == '-') {
      c.take();
      sign = pk == '-' ? -1.0 : 1.0;
    } else if (!first) {
      c.fail("expected '+' or '-' between terms");
    }
    first = false;

    Complex coeff(1.0, 0.0);
    bool have_coeff = false;
    pk = c.peek();
    if (std::isdigit(pk) || pk == '.' || pk == '(') {
      coeff = detail::parse_coeff(c);
      have_coeff = true;
      c.accept('*');
    }

    ComplexPoly::Exponents alpha(nvars, 0);
    bool have_vars = false;
    for (;;) {
      pk = c.peek();
      unsigned idx;
      if (style == VarStyle::Z && pk == 'z') {
        c.take();
        unsigned k = c.uinteger();
        if (k < 1 || k > nvars)
          throw InvalidInputError("variable z" + std::to_string(k) +
                                  " outside declared range 1.." +
                                  std::to_string(nvars));
        idx = k - 1;
      } else if (style == VarStyle::W && pk == 'w') {
        c.take();
        idx = 0;
      } else {
        break;
      }
      unsigned e = 1;
      if (c.accept('^')) e = c.uinteger();
      alpha[idx] += e;
      have_vars = true;
      c.accept('*');
    }
    if (!have_coeff && !have_vars) c.fail("expected a term");
    // A bare "0" line is the zero polynomial.
    f.add_term(alpha, sign * coeff);
  }
  return f;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Coefficient rendering without outer sign; sets neg for sign folding.
inline std::string fmt_coeff(Complex c, bool leading_one_matters, bool* neg) {
  *neg = false;
  if (c.imag() == 0.0) {
    double v = c.real();
    if (v < 0) {
      *neg = true;
      v = -v;
    }
    if (v == 1.0 && !leading_one_matters) return "";
    return fmt_double(v);
  }
  if (c.real() == 0.0) {
    double v = c.imag();
    if (v < 0) {
      *neg = true;
      v = -v;
    }
    return fmt_double(v) + "i";
  }
  std::string im = fmt_double(c.imag());
  std::string sep = im[0] == '-' ? "" : "+";
  return "(" + fmt_double(c.real()) + sep + im + "i)";
}

}  // namespace detail

// Canonical printer; parse(print(f)) reproduces the term map exactly.
inline std::string print_poly(const ComplexPoly& f, VarStyle style) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [alpha, c] : f.terms()) {
    bool has_vars = false;
    for (unsigned a : alpha) has_vars = has_vars || a > 0;
    bool neg = false;
    std::string cs = detail::fmt_coeff(c, !has_vars, &neg);
    if (first) {
      if (neg) out += "-";
      first = false;
    } else {
      out += neg ? " - " : " + ";
    }
    std::string vars;
    for (unsigned i = 0; i < alpha.size(); ++i) {
      if (alpha[i] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += style == VarStyle::Z ? "z" + std::to_string(i + 1) : "w";
      if (alpha[i] > 1) vars += "^" + std::to_string(alpha[i]);
    }
    if (cs.empty()) {
      out += vars;
    } else if (vars.empty()) {
      out += cs;
    } else {
      out += cs + "*" + vars;
    }
  }
  return out;
}

// Splits file text into significant lines ('#' comments and blanks dropped).
inline std::vector<std::string> significant_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  auto flush = [&] {
    size_t h = cur.find('#');
    if (h != std::string::npos) cur.erase(h);
    size_t a = cur.find_first_not_of(" \t\r");
    if (a != std::string::npos) lines.push_back(cur.substr(a));
    cur.clear();
  };
  for (char ch : text) {
    if (ch == '\n')
      flush();
    else
      cur += ch;
  }
  flush();
  return lines;
}

// Standalone complex literal, e.g. "0.5", "2i", "(1-2i)"; used by the CLI.
inline Complex parse_complex(const std::string& s) {
  detail::Cursor c(s);
  double sign = 1.0;
  if (c.peek() == '-' || c.peek() == '+') sign = c.take() == '-' ? -1.0 : 1.0;
  Complex v = detail::parse_coeff(c);
  if (!c.done()) c.fail("trailing characters after complex literal");
  return sign * v;
}

}  // namespace rcd
