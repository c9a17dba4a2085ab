#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <string>

#include "ssd/error.hpp"

namespace ssd {

// Centered PCA model: orthonormal component rows ordered by descending
// explained variance, with a deterministic sign convention (the entry of
// largest absolute value in each component is nonnegative).
struct PcaModel {
  Eigen::VectorXd mean;                      // D
  Eigen::MatrixXd components;                // K x D, orthonormal rows
  Eigen::VectorXd explained_variance_ratio;  // K, nonincreasing
  double cumulative_ratio = 0.0;             // sum of the K ratios

  Eigen::Index k() const { return components.rows(); }
  Eigen::Index dim() const { return components.cols(); }
};

namespace detail {

inline void apply_sign_convention(Eigen::MatrixXd& components) {
  for (Eigen::Index i = 0; i < components.rows(); ++i) {
    Eigen::Index arg = 0;
    components.row(i).cwiseAbs().maxCoeff(&arg);
    if (components(i, arg) < 0.0) components.row(i) = -components.row(i);
  }
}

}  // namespace detail

// Full-rank fit used internally by the sweep: fitting once and truncating per
// K is exactly equivalent to refitting, because components, ratios, and the
// sign convention are all per-component quantities.
struct FullPca {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // rank_cap x D
  Eigen::VectorXd ratios;      // rank_cap, normalized by total variance
  Eigen::Index rank_cap = 0;   // min(n-1, D)
};

inline FullPca pca_fit_full(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n < 3) fail(ErrorKind::Numeric, "PCA needs at least 3 rows, got " + std::to_string(n));

  FullPca full;
  full.mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.rowwise() - full.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double total = sv.squaredNorm();
  if (!(total > 0.0))
    fail(ErrorKind::Numeric, "degenerate PCA input: all rows identical");

  full.rank_cap = std::min<Eigen::Index>(n - 1, d);
  full.components = svd.matrixV().leftCols(full.rank_cap).transpose();
  detail::apply_sign_convention(full.components);
  full.ratios = sv.head(full.rank_cap).array().square() / total;
  return full;
}

inline PcaModel pca_truncate(const FullPca& full, Eigen::Index k) {
  if (k < 1 || k > full.rank_cap)
    fail(ErrorKind::Numeric, "K=" + std::to_string(k) + " out of range [1, " +
                                 std::to_string(full.rank_cap) + "]");
  PcaModel model;
  model.mean = full.mean;
  model.components = full.components.topRows(k);
  model.explained_variance_ratio = full.ratios.head(k);
  model.cumulative_ratio = model.explained_variance_ratio.sum();
  return model;
}

// Fits centered PCA with K components via SVD of the centered data matrix.
// Requires 1 <= K <= min(n-1, D) and n >= 3.
inline PcaModel pca_fit(const Eigen::MatrixXd& X, Eigen::Index k) {
  return pca_truncate(pca_fit_full(X), k);
}

// Coordinates of x in the component basis: components * (x - mean).
inline Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim())
    fail(ErrorKind::Numeric, "project: vector has dimension " + std::to_string(x.size()) +
                                 ", model expects " + std::to_string(model.dim()));
  return model.components * (x - model.mean);
}

inline Eigen::MatrixXd project_rows(const PcaModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.dim())
    fail(ErrorKind::Numeric, "project: rows have dimension " + std::to_string(X.cols()) +
                                 ", model expects " + std::to_string(model.dim()));
  return (X.rowwise() - model.mean.transpose()) * model.components.transpose();
}

// Maps a direction from component space back to embedding space. Directions
// are translation-free, so no mean is added; orthonormality makes this an
// isometry.
inline Eigen::VectorXd back_project_direction(const PcaModel& model, const Eigen::VectorXd& b) {
  if (b.size() != model.k())
    fail(ErrorKind::Numeric, "back_project: direction has dimension " + std::to_string(b.size()) +
                                 ", model has K=" + std::to_string(model.k()));
  return model.components.transpose() * b;
}

}  // namespace ssd
