#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "ssd/error.hpp"
#include "ssd/pca.hpp"
#include "ssd/stats.hpp"

namespace ssd {

// Fitted SSD linear model y = alpha + beta' x + eps, with inferential
// statistics and the unit-norm semantic gradient. `gradient_d` is filled once
// a PCA model is available (see attach_gradient_d / fit_ols overload).
struct GradientFit {
  double alpha = 0.0;
  Eigen::VectorXd beta;        // K
  double beta_norm = 0.0;      // ||beta|| before normalization
  double r2 = 0.0;
  double r2_adj = 0.0;
  double f_stat = 0.0;
  double p_value = 1.0;
  double r = 0.0;              // multiple correlation sqrt(max(r2, 0))
  Eigen::VectorXd gradient_k;  // unit beta direction in component space
  Eigen::VectorXd gradient_d;  // back-projected unit direction in R^D
  Eigen::VectorXd residuals;   // n
  bool rank_deficient = false;
  bool constant_outcome = false;
};

// Ordinary least squares of y on [1, Xk]. Rank-deficient designs fall back to
// the minimum-norm pseudoinverse solution; a constant outcome yields the
// defined degenerate statistics r2 = 0, F = 0, p = 1.
inline GradientFit fit_ols(const Eigen::MatrixXd& Xk, const Eigen::VectorXd& y) {
  const Eigen::Index n = Xk.rows();
  const Eigen::Index k = Xk.cols();
  if (y.size() != n)
    fail(ErrorKind::Numeric, "fit_ols: " + std::to_string(n) + " rows vs " +
                                 std::to_string(y.size()) + " outcomes");
  if (n < k + 2)
    fail(ErrorKind::Numeric, "fit_ols: need n >= K + 2, got n=" + std::to_string(n) +
                                 " K=" + std::to_string(k));

  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = Xk;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd coef = cod.solve(y);

  GradientFit fit;
  fit.rank_deficient = cod.rank() < k + 1;
  fit.alpha = coef(0);
  fit.beta = coef.tail(k);
  fit.beta_norm = fit.beta.norm();
  fit.residuals = y - design * coef;

  const double sse = fit.residuals.squaredNorm();
  const double y_mean = y.mean();
  const double sst = (y.array() - y_mean).square().sum();

  if (sst <= 0.0) {
    fit.constant_outcome = true;
    fit.r2 = 0.0;
    fit.r2_adj = 0.0;
    fit.f_stat = 0.0;
    fit.p_value = 1.0;
  } else {
    fit.r2 = 1.0 - sse / sst;
    const double dfe = static_cast<double>(n - k - 1);
    fit.r2_adj = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) / dfe;
    fit.f_stat = (fit.r2 / static_cast<double>(k)) / ((1.0 - fit.r2) / dfe);
    if (!(fit.f_stat >= 0.0)) fit.f_stat = 0.0;  // guard tiny negative r2 from roundoff
    fit.p_value = f_upper_tail(fit.f_stat, static_cast<int>(k), static_cast<int>(n - k - 1));
  }
  fit.r = std::sqrt(std::max(fit.r2, 0.0));

  if (fit.beta_norm > 0.0) {
    fit.gradient_k = fit.beta / fit.beta_norm;
  } else {
    fit.gradient_k = Eigen::VectorXd::Zero(k);  // degenerate: no direction
  }
  return fit;
}

// Fills gradient_d = back_project_direction(model, gradient_k); unit norm by
// the isometry of orthonormal components.
inline void attach_gradient_d(GradientFit& fit, const PcaModel& model) {
  fit.gradient_d = back_project_direction(model, fit.gradient_k);
}

inline GradientFit fit_ols(const Eigen::MatrixXd& Xk, const Eigen::VectorXd& y,
                           const PcaModel& model) {
  GradientFit fit = fit_ols(Xk, y);
  attach_gradient_d(fit, model);
  return fit;
}

}  // namespace ssd
