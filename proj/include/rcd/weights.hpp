#pragma once

// Plurisubharmonic weights attached to one base point and scale.
//
// Three functions share their ingredients:
//
//   G  = (eta/delta) sum_s |f_s|^2            + sum_s chi_s      on C^n
//   Gt = exp(4 eta r / delta)                 + sum_s chi_s      on closure
//   g  = P(Gt - 3n/4)
//
// where chi_s = chi(|z_s - p_s|^2 / A_s^2) with A_s = a_s tau_s the window
// box radii, and r is the defining function value carried with the point.
//
// Gt and g are evaluated against the tangential frame L'_i = d_i - 2 (d_i
// rho) d_{n+1}, L'_{n+1} = d_{n+1}: the frame annihilates the rank-one part
// of the exponential's Hessian in the tangential directions, so the frame
// Hessian is exactly block diagonal. That structure is what the floor
// estimates quantify, and what the finite-difference tests cross-check by
// conjugating an ambient coordinate Hessian with the frame matrix.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "rcd/cutoff.hpp"
#include "rcd/errors.hpp"
#include "rcd/log_real.hpp"
#include "rcd/sampling.hpp"
#include "rcd/triangular_system.hpp"

namespace rcd {

// exp with an overflow gate: quantities that would leave double range mean
// the requested scale cannot be certified in this arithmetic.
inline double checked_exp(double lg, const char* what) {
  if (lg > 700.0)
    throw InfeasibleScaleError(std::string(what) +
                               " overflows double precision at this scale");
  return std::exp(lg);
}

class WeightWorkshop {
 public:
  WeightWorkshop(const TriangularSystem& sys, std::vector<Complex> p,
                 std::vector<double> box_radii, CutoffSpec chi, LogReal eta,
                 LogReal delta)
      : sys_(sys),
        p_(std::move(p)),
        A_(std::move(box_radii)),
        chi_(chi),
        n_(sys.n) {
    if (p_.size() != n_ || A_.size() != n_)
      throw InvalidParameterError("weights: point/radius arity mismatch");
    for (double A : A_)
      if (!(A > 0.0))
        throw InvalidParameterError("weights: box radii must be positive");
    eod_ = checked_exp(eta.log() - delta.log(), "eta/delta");
    q_ = 4.0 * eod_;
    // q^2 appears in the normal-normal Hessian entry
    checked_exp(2.0 * (std::log(4.0) + eta.log() - delta.log()),
                "(4 eta/delta)^2");
    df_.resize(n_);
    for (unsigned s = 0; s < n_; ++s) {
      df_[s].reserve(n_);
      for (unsigned i = 0; i < n_; ++i)
        df_[s].push_back(sys.f[s].derivative(i));
    }
  }

  unsigned n() const { return n_; }
  double eta_over_delta() const { return eod_; }
  double q() const { return q_; }
  const std::vector<double>& box_radii() const { return A_; }
  const std::vector<Complex>& base_point() const { return p_; }
  const CutoffSpec& chi() const { return chi_; }
  double shift() const { return 0.75 * n_; }

  // --- local weight G -------------------------------------------------

  template <typename T = double>
  T G_value(const std::vector<std::complex<T>>& z) const {
    T quad(0);
    for (unsigned s = 0; s < n_; ++s) quad += std::norm(sys_.f[s].evaluate(z));
    T cut(0);
    for (unsigned s = 0; s < n_; ++s) {
      T t = std::norm(z[s] - std::complex<T>(p_[s])) / T(A_[s] * A_[s]);
      cut += chi_.value(t);
    }
    return T(eod_) * quad + cut;
  }

  Eigen::VectorXcd G_gradient(const std::vector<Complex>& z) const {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(n_);
    Eigen::MatrixXcd J = jacobian(z);
    for (unsigned s = 0; s < n_; ++s) {
      Complex fbar = std::conj(sys_.f[s].evaluate(z));
      for (unsigned i = 0; i < n_; ++i) g(i) += eod_ * J(s, i) * fbar;
    }
    for (unsigned i = 0; i < n_; ++i) g(i) += chi_gradient_entry(z, i);
    return g;
  }

  // complex Hessian, entry (i,j) = d^2 G / dz_i dzbar_j
  Eigen::MatrixXcd G_hessian(const std::vector<Complex>& z) const {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n_, n_);
    Eigen::MatrixXcd J = jacobian(z);
    for (unsigned s = 0; s < n_; ++s)
      for (unsigned i = 0; i < n_; ++i)
        for (unsigned j = 0; j < n_; ++j)
          H(i, j) += eod_ * J(s, i) * std::conj(J(s, j));
    for (unsigned i = 0; i < n_; ++i) {
      double t = chi_arg(z, i);
      H(i, i) += chi_.hessian_profile(t) / (A_[i] * A_[i]);
    }
    return H;
  }

  // --- boundary weight Gt ----------------------------------------------

  double Gt_value(const BoundaryPoint& pt) const {
    check_point(pt);
    return std::exp(q_ * pt.r) + chi_sum(pt.z);
  }

  // ambient extension for finite differences: r is recomputed from the
  // coordinates, so this is only numerically usable at moderate scales
  template <typename T = double>
  T Gt_value_ambient(const std::vector<std::complex<T>>& z,
                     std::complex<T> z_last) const {
    T rho = z_last.real();
    for (unsigned s = 0; s < n_; ++s) rho += std::norm(sys_.f[s].evaluate(z));
    T cut(0);
    for (unsigned s = 0; s < n_; ++s) {
      T t = std::norm(z[s] - std::complex<T>(p_[s])) / T(A_[s] * A_[s]);
      cut += chi_.value(t);
    }
    return std::exp(T(q_) * rho) + cut;
  }

  // frame matrix at z: row i holds the coefficients of L'_i
  Eigen::MatrixXcd frame_matrix(const std::vector<Complex>& z) const {
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Identity(n_ + 1, n_ + 1);
    Eigen::VectorXcd w = rho_gradient(z);
    for (unsigned i = 0; i < n_; ++i) F(i, n_) = -2.0 * w(i);
    return F;
  }

  // frame Hessian of Gt: exactly block diagonal
  Eigen::MatrixXcd Gt_frame_hessian(const BoundaryPoint& pt) const {
    check_point(pt);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n_ + 1, n_ + 1);
    double E = std::exp(q_ * pt.r);
    Eigen::MatrixXcd J = jacobian(pt.z);
    for (unsigned s = 0; s < n_; ++s)
      for (unsigned i = 0; i < n_; ++i)
        for (unsigned j = 0; j < n_; ++j)
          H(i, j) += E * q_ * J(s, i) * std::conj(J(s, j));
    for (unsigned i = 0; i < n_; ++i) {
      double t = chi_arg(pt.z, i);
      H(i, i) += chi_.hessian_profile(t) / (A_[i] * A_[i]);
    }
    H(n_, n_) = E * q_ * q_ / 4.0;
    return H;
  }

  // coordinate Hessian of the ambient Gt, for the FD cross-check
  Eigen::MatrixXcd Gt_coordinate_hessian(const BoundaryPoint& pt) const {
    check_point(pt);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n_ + 1, n_ + 1);
    double E = std::exp(q_ * pt.r);
    Eigen::MatrixXcd J = jacobian(pt.z);
    Eigen::VectorXcd w = rho_gradient(pt.z);
    for (unsigned s = 0; s < n_; ++s)
      for (unsigned i = 0; i < n_; ++i)
        for (unsigned j = 0; j < n_; ++j)
          H(i, j) += E * q_ * J(s, i) * std::conj(J(s, j));
    for (unsigned i = 0; i < n_; ++i) {
      double t = chi_arg(pt.z, i);
      H(i, i) += chi_.hessian_profile(t) / (A_[i] * A_[i]);
      for (unsigned j = 0; j < n_; ++j)
        H(i, j) += E * q_ * q_ * w(i) * std::conj(w(j));
      H(i, n_) += E * q_ * q_ * w(i) * 0.5;
      H(n_, i) += E * q_ * q_ * 0.5 * std::conj(w(i));
    }
    H(n_, n_) = E * q_ * q_ / 4.0;
    return H;
  }

  // --- cut weight g ------------------------------------------------------

  double g_value(const BoundaryPoint& pt) const {
    return PSpec::value(Gt_value(pt) - shift());
  }

  template <typename T = double>
  T g_value_ambient(const std::vector<std::complex<T>>& z,
                    std::complex<T> z_last) const {
    return PSpec::value(Gt_value_ambient(z, z_last) - T(shift()));
  }

  // frame gradient of Gt (the exponential's tangential part cancels)
  Eigen::VectorXcd Gt_frame_gradient(const BoundaryPoint& pt) const {
    check_point(pt);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_ + 1);
    for (unsigned i = 0; i < n_; ++i) v(i) = chi_gradient_entry(pt.z, i);
    v(n_) = std::exp(q_ * pt.r) * q_ * 0.5;
    return v;
  }

  Eigen::MatrixXcd g_frame_hessian(const BoundaryPoint& pt) const {
    double t = Gt_value(pt) - shift();
    double p1 = PSpec::deriv(t), p2 = PSpec::second(t);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n_ + 1, n_ + 1);
    if (p1 == 0.0 && p2 == 0.0) return H;  // off the support
    Eigen::VectorXcd v = Gt_frame_gradient(pt);
    H = p2 * (v * v.adjoint());
    H += p1 * Gt_frame_hessian(pt);
    return H;
  }

  // support predicates (exact zeros, not tolerances)
  bool inside_box(const std::vector<Complex>& z) const {
    for (unsigned i = 0; i < n_; ++i)
      if (chi_arg(z, i) >= 1.0) return false;
    return true;
  }

  // gradient of the defining function in the first n coordinates
  Eigen::VectorXcd rho_gradient(const std::vector<Complex>& z) const {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n_);
    Eigen::MatrixXcd J = jacobian(z);
    for (unsigned s = 0; s < n_; ++s) {
      Complex fbar = std::conj(sys_.f[s].evaluate(z));
      for (unsigned i = 0; i < n_; ++i) w(i) += J(s, i) * fbar;
    }
    return w;
  }

  double chi_arg(const std::vector<Complex>& z, unsigned i) const {
    return std::norm(z[i] - p_[i]) / (A_[i] * A_[i]);
  }

  double chi_sum(const std::vector<Complex>& z) const {
    double c = 0.0;
    for (unsigned i = 0; i < n_; ++i) c += chi_.value(chi_arg(z, i));
    return c;
  }

 private:
  Complex chi_gradient_entry(const std::vector<Complex>& z, unsigned i) const {
    double t = chi_arg(z, i);
    return chi_.deriv(t) * std::conj(z[i] - p_[i]) / (A_[i] * A_[i]);
  }

  Eigen::MatrixXcd jacobian(const std::vector<Complex>& z) const {
    Eigen::MatrixXcd J(n_, n_);
    for (unsigned s = 0; s < n_; ++s)
      for (unsigned i = 0; i < n_; ++i) J(s, i) = df_[s][i].evaluate(z);
    return J;
  }

  void check_point(const BoundaryPoint& pt) const {
    if (pt.z.size() != n_)
      throw InvalidParameterError("boundary point arity mismatch");
    if (pt.r > 0.0)
      throw InvalidParameterError(
          "boundary point lies outside the closed domain (r > 0)");
  }

  TriangularSystem sys_;
  std::vector<Complex> p_;
  std::vector<double> A_;
  CutoffSpec chi_;
  unsigned n_;
  double eod_ = 0.0;  // eta / delta
  double q_ = 0.0;    // 4 eta / delta
  std::vector<std::vector<ComplexPoly>> df_;
};

}  // namespace rcd
