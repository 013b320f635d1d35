#pragma once

// Numerical certification of the Hessian floor estimates. Each check sweeps
// low-discrepancy samples of the relevant region, assembles the analytic
// Hessian, and measures how far it clears its stated floor:
//
//   margin = lambda_min( F^(-1/2) H F^(-1/2) ) - 1
//
// for a diagonal floor F, so "margin >= 0" is exactly "H >= F" and a
// tolerance like -1e-9 absorbs eigensolver noise. A second, independent
// reading of the same matrices comes from Rayleigh quotients along sampled
// directions; it can only overestimate the minimum, so the two bracket it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rcd/envelopes.hpp"
#include "rcd/global_constants.hpp"
#include "rcd/sampling.hpp"
#include "rcd/weights.hpp"
#include "rcd/windows.hpp"

namespace rcd {

inline double min_eigenvalue(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double whitened_margin(const Eigen::MatrixXcd& H,
                              const Eigen::VectorXd& floor_diag) {
  Eigen::Index n = H.rows();
  Eigen::MatrixXcd K(n, n);  // W - I with W the whitened Hessian
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      // divide by the roots one at a time: the product of two floor
      // entries can overflow double range on its own
      K(i, j) = H(i, j) / std::sqrt(floor_diag(i)) / std::sqrt(floor_diag(j));
      if (i == j) K(i, j) -= 1.0;
    }
  // Jacobi equilibration before the eigensolve. Different directions can
  // clear their floors by wildly different factors (the normal entry of the
  // boundary Hessian sits hundreds of orders above the tangential ones), and
  // the raw eigenproblem would lose lambda_min in roundoff from the largest
  // entries. Congruence by a positive diagonal preserves the sign of
  // lambda_min, so "margin >= 0 iff H >= floor" survives; the magnitude is
  // read relative to how far each direction clears its own floor.
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i)
    s(i) = 1.0 / std::sqrt(std::max(K(i, i).real() + 1.0, 1.0));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) *= s(i) * s(j);
  return min_eigenvalue(K);
}

// Rayleigh-quotient probe of the same inequality along Halton directions;
// used as a redundant cross-check on the eigensolver result.
inline double direction_margin(const Eigen::MatrixXcd& H,
                               const Eigen::VectorXd& floor_diag,
                               std::size_t directions = 64,
                               std::uint64_t seed = 0) {
  Eigen::Index n = H.rows();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < directions; ++k) {
    std::vector<double> u = halton_point(seed + k, 2 * n);
    Eigen::VectorXcd xi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double th = 6.283185307179586 * u[2 * i + 1];
      double m = 0.05 + u[2 * i];
      xi(i) = Complex(m * std::cos(th), m * std::sin(th));
    }
    double denom = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      denom += floor_diag(i) * std::norm(xi(i));
    double num = std::real((xi.adjoint() * H * xi)(0));
    worst = std::min(worst, num / denom - 1.0);
  }
  return worst;
}

// Scale-normalized minimum eigenvalue for plain positivity checks.
inline double psd_margin(const Eigen::MatrixXcd& H) {
  double scale = std::max(H.cwiseAbs().maxCoeff(), 1e-300);
  return min_eigenvalue(H) / scale;
}

struct FloorCheckReport {
  std::size_t samples = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_direction_margin = std::numeric_limits<double>::infinity();
  std::vector<double> margins;  // per sample, for plotting
  bool pass(double tol = 1e-9) const { return min_margin >= -tol; }
};

// Floor of the local weight's Hessian over the window polydisc: samples
// H(G) >= (1/4n) diag(1/A_i^2) inside R(p : a).
inline FloorCheckReport verify_hessian_G(const WeightWorkshop& W,
                                         std::size_t samples,
                                         std::uint64_t seed = 0) {
  unsigned n = W.n();
  Eigen::VectorXd floor_diag(n);
  for (unsigned i = 0; i < n; ++i)
    floor_diag(i) =
        1.0 / (4.0 * n * W.box_radii()[i] * W.box_radii()[i]);
  FloorCheckReport rep;
  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<Complex> z =
        polydisc_point(k, seed, W.base_point(), W.box_radii());
    Eigen::MatrixXcd H = W.G_hessian(z);
    double margin = whitened_margin(H, floor_diag);
    rep.margins.push_back(margin);
    rep.min_margin = std::min(rep.min_margin, margin);
    rep.min_direction_margin = std::min(
        rep.min_direction_margin, direction_margin(H, floor_diag, 32, 7 * k));
    ++rep.samples;
  }
  return rep;
}

struct PartialBoundsReport {
  std::size_t samples = 0;
  double min_lower_slack = std::numeric_limits<double>::infinity();
  double min_window_slack = std::numeric_limits<double>::infinity();
  double min_upper_slack = std::numeric_limits<double>::infinity();
  bool pass() const {
    return min_lower_slack >= 0.0 && min_window_slack >= 0.0 &&
           min_upper_slack >= 0.0;
  }
};

// Derivative bounds on the window geometry. For each level s:
//  - on the annulus (A_s/2, A_s) in the s-th coordinate (others sweeping
//    their discs): |d_s f_s| >= D sigma_s / A_s, and the dominating-term
//    version |d_s f_s| >= (1/2) |b_k| k |u_s|^(k-1);
//  - everywhere in the box: |d_i f_s| <= (2^(n+1)/mu) sigma_s / A_i, i < s.
// Slacks are reported as ratios minus 1, so >= 0 means the bound holds.
inline PartialBoundsReport verify_partial_bounds(
    const TriangularSystem& sys, const LocalExpansion& le,
    const ApproxSystem& as, const std::vector<DerivativeWindow>& win,
    const GlobalConstants& gc, double mu, std::size_t samples,
    std::uint64_t seed = 0) {
  unsigned n = sys.n;
  PartialBoundsReport rep;
  std::vector<double> A(n);
  for (unsigned s = 0; s < n; ++s)
    A[s] = std::exp(win[s].log_ratio + as.log_tau[s]);

  for (unsigned s = 1; s <= n; ++s) {
    ComplexPoly ds = sys.f[s - 1].derivative(s - 1);
    double sigma = std::exp(as.log_sigma[s - 1]);
    double floor_coeff = gc.D.value() * sigma / A[s - 1];
    const auto& pure = le.at(s).pure;
    auto itk = pure.find(win[s - 1].index);
    double bk = itk == pure.end() ? 0.0 : std::abs(itk->second);
    unsigned k = win[s - 1].index;

    for (std::size_t t = 0; t < samples; ++t) {
      std::vector<double> u = halton_point(seed + t, 2 * n);
      std::vector<Complex> z(n);
      for (unsigned i = 0; i < n; ++i)
        z[i] = as.p[i] + disc_point(u[2 * i], u[2 * i + 1], A[i]);
      // pin coordinate s to the annulus
      z[s - 1] =
          as.p[s - 1] + annulus_point(u[2 * (s - 1)], u[2 * (s - 1) + 1],
                                      A[s - 1]);
      double us = std::abs(z[s - 1] - as.p[s - 1]);
      double val = std::abs(ds.evaluate(z));
      rep.min_lower_slack =
          std::min(rep.min_lower_slack, val / floor_coeff - 1.0);
      double dom = 0.5 * bk * k * std::pow(us, static_cast<double>(k - 1));
      rep.min_window_slack = std::min(rep.min_window_slack, val / dom - 1.0);
      ++rep.samples;
    }

    // upper bounds on the lower-variable partials over the full box
    for (unsigned i = 1; i < s; ++i) {
      ComplexPoly di = sys.f[s - 1].derivative(i - 1);
      double cap = std::pow(2.0, n + 1.0) / mu * sigma / A[i - 1];
      for (std::size_t t = 0; t < samples; ++t) {
        std::vector<Complex> z = polydisc_point(t, seed + 31 * t + 1, as.p, A);
        double val = std::abs(di.evaluate(z));
        rep.min_upper_slack =
            std::min(rep.min_upper_slack, cap / std::max(val, 1e-300) - 1.0);
      }
    }
  }
  return rep;
}

// Floor of the boundary weight's frame Hessian on the deep strip
// r in [-c delta, 0]: blockdiag( (1/4n) diag(1/A_i^2), (eta/delta)^2 ).
inline FloorCheckReport verify_hessian_Gt(const WeightWorkshop& W,
                                          double strip_depth,
                                          std::size_t samples,
                                          std::uint64_t seed = 0) {
  unsigned n = W.n();
  Eigen::VectorXd floor_diag(n + 1);
  for (unsigned i = 0; i < n; ++i)
    floor_diag(i) = 1.0 / (4.0 * n * W.box_radii()[i] * W.box_radii()[i]);
  double eod = W.eta_over_delta();
  floor_diag(n) = eod * eod;
  FloorCheckReport rep;
  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<double> u = halton_point(seed + k, 2 * n + 1);
    BoundaryPoint pt;
    pt.z.resize(n);
    for (unsigned i = 0; i < n; ++i)
      pt.z[i] = W.base_point()[i] +
                disc_point(u[2 * i], u[2 * i + 1], W.box_radii()[i]);
    pt.r = -strip_depth * u[2 * n];
    Eigen::MatrixXcd H = W.Gt_frame_hessian(pt);
    rep.min_margin = std::min(rep.min_margin, whitened_margin(H, floor_diag));
    rep.min_direction_margin = std::min(
        rep.min_direction_margin, direction_margin(H, floor_diag, 32, 11 * k));
    ++rep.samples;
  }
  return rep;
}

struct WeightGReport {
  std::size_t samples = 0;
  double max_value = 0.0;
  double min_value = 0.0;
  bool bounds_ok = true;      // 0 <= g <= 1 at every sample
  bool support_ok = true;     // g == 0 outside the box and below the strip
  double min_psh_margin = std::numeric_limits<double>::infinity();
  double min_floor_margin = std::numeric_limits<double>::infinity();
  std::size_t floor_samples = 0;
  bool pass(double tol = 1e-9) const {
    return bounds_ok && support_ok && min_psh_margin >= -tol &&
           min_floor_margin >= -tol;
  }
};

// Properties of the cut weight g:
//  - range and exact support control on stratified samples of the closed
//    domain (bulk depths, the support shell, and the floor strip);
//  - plurisubharmonicity of the frame Hessian everywhere;
//  - the quantitative floor C (sum |t_i|^2/tau_i^2 + |t_{n+1}|^2/delta^2)
//    on the shallow strip, with C = P'(1/3) min_i(a_i^2) / (4n), verified
//    where every cutoff sits on its ramp (|u_s| <= A_s/sqrt(2)).
inline WeightGReport verify_weight_g(const WeightWorkshop& W,
                                     const std::vector<double>& log_tau,
                                     const std::vector<double>& log_a,
                                     double support_depth, double floor_depth,
                                     double delta, std::size_t samples,
                                     std::uint64_t seed = 0) {
  unsigned n = W.n();
  WeightGReport rep;

  // floor diagonal: C / tau_i^2 tangentially, C / delta^2 normally
  double min_a2 = std::numeric_limits<double>::infinity();
  for (double la : log_a) min_a2 = std::min(min_a2, std::exp(2.0 * la));
  double C = PSpec::slope_floor * min_a2 / (4.0 * n);
  Eigen::VectorXd floor_diag(n + 1);
  for (unsigned i = 0; i < n; ++i)
    floor_diag(i) = C * std::exp(-2.0 * log_tau[i]);
  floor_diag(n) = C / (delta * delta);

  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<double> u = halton_point(seed + k, 2 * n + 2);
    unsigned stratum = k % 3;
    BoundaryPoint pt;
    pt.z.resize(n);
    // strata 0,1: roam past the box edge so support is exercised;
    // stratum 2: stay on the cutoff ramps for the floor check
    double spread = stratum == 2 ? 1.0 / std::sqrt(2.0) : 2.0;
    for (unsigned i = 0; i < n; ++i)
      pt.z[i] = W.base_point()[i] +
                disc_point(u[2 * i], u[2 * i + 1], spread * W.box_radii()[i]);
    switch (stratum) {
      case 0:  // bulk of the domain
        pt.r = -u[2 * n] * 0.5;
        break;
      case 1:  // support shell: straddles the cutoff depth
        pt.r = -u[2 * n] * 2.0 * support_depth;
        break;
      default:  // floor strip
        pt.r = -u[2 * n] * floor_depth;
    }

    double g = W.g_value(pt);
    rep.max_value = std::max(rep.max_value, g);
    rep.min_value = std::min(rep.min_value, g);
    if (!(g >= 0.0 && g <= 1.0)) rep.bounds_ok = false;
    if ((pt.r < -support_depth || !W.inside_box(pt.z)) && g != 0.0)
      rep.support_ok = false;

    Eigen::MatrixXcd H = W.g_frame_hessian(pt);
    rep.min_psh_margin = std::min(rep.min_psh_margin, psd_margin(H));

    if (stratum == 2) {
      rep.min_floor_margin =
          std::min(rep.min_floor_margin, whitened_margin(H, floor_diag));
      ++rep.floor_samples;
    }
    ++rep.samples;
  }
  return rep;
}

}  // namespace rcd
