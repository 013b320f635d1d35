#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "rcd/errors.hpp"

namespace rcd {

// Nonnegative real stored by its natural logarithm. The constants chain
// produces values like delta^(m_1*...*m_n * A) that underflow any linear
// floating representation long before n reaches 3, so every threshold,
// radius, and envelope value in this library travels as a LogReal and is
// exponentiated only at the final rendering step (if at all).
class LogReal {
 public:
  LogReal() : lg_(-std::numeric_limits<double>::infinity()) {}  // zero

  static LogReal from_log(double lg) {
    LogReal x;
    x.lg_ = lg;
    return x;
  }
  static LogReal from_value(double v) {
    if (v < 0.0) throw InvalidParameterError("LogReal: negative value");
    LogReal x;
    x.lg_ = std::log(v);  // log(0) == -inf is the zero encoding
    return x;
  }
  static LogReal zero() { return LogReal(); }
  static LogReal one() { return from_log(0.0); }

  double log() const { return lg_; }
  bool is_zero() const { return std::isinf(lg_) && lg_ < 0; }

  // Exponentiation back to the linear domain; +inf on overflow, 0 on
  // underflow. Callers that cannot tolerate either must test first.
  double value() const { return std::exp(lg_); }

  LogReal operator*(LogReal o) const { return from_log(lg_ + o.lg_); }
  LogReal operator/(LogReal o) const {
    if (o.is_zero()) throw InvalidParameterError("LogReal: division by zero");
    return from_log(lg_ - o.lg_);
  }
  LogReal& operator*=(LogReal o) {
    lg_ += o.lg_;
    return *this;
  }

  // x^e for real e; 0^e is 0 for e > 0 and 1 for e == 0.
  LogReal pow(double e) const {
    if (is_zero()) {
      if (e > 0) return zero();
      if (e == 0) return one();
      throw InvalidParameterError("LogReal: 0 to a negative power");
    }
    return from_log(lg_ * e);
  }

  // log-sum-exp; exact when one side is zero.
  LogReal operator+(LogReal o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    double hi = lg_ > o.lg_ ? lg_ : o.lg_;
    double lo = lg_ > o.lg_ ? o.lg_ : lg_;
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  bool operator<(LogReal o) const { return lg_ < o.lg_; }
  bool operator<=(LogReal o) const { return lg_ <= o.lg_; }
  bool operator>(LogReal o) const { return lg_ > o.lg_; }
  bool operator>=(LogReal o) const { return lg_ >= o.lg_; }

  friend LogReal min(LogReal a, LogReal b) { return a < b ? a : b; }
  friend LogReal max(LogReal a, LogReal b) { return a < b ? b : a; }

 private:
  double lg_;
};

// Scientific-notation rendering straight from the log, so "1.3e-4521" prints
// faithfully even though the value itself is far below DBL_MIN.
inline std::string decimal_from_log(double lg, int digits = 6) {
  if (std::isinf(lg)) return lg < 0 ? "0" : "inf";
  if (std::isnan(lg)) return "nan";
  double l10 = lg / std::log(10.0);
  double e = std::floor(l10);
  double mant = std::pow(10.0, l10 - e);
  // Guard the mantissa rounding up to 10 at the print boundary.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, mant);
  if (buf[0] == '1' && buf[1] == '0') {
    e += 1;
    std::snprintf(buf, sizeof buf, "%.*f", digits, mant / 10.0);
  }
  std::string out(buf);
  out += "e";
  std::snprintf(buf, sizeof buf, "%+d", static_cast<int>(e));
  out += buf;
  return out;
}

inline std::string decimal_string(LogReal x, int digits = 6) {
  return decimal_from_log(x.log(), digits);
}

}  // namespace rcd
