#include <catch2/catch_amalgamated.hpp>

#include "ssd/pca.hpp"
#include "ssd/rng.hpp"

#include "oracles.hpp"

using Catch::Approx;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  ssd::Rng rng(seed);
  Eigen::MatrixXd X(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) X(i, j) = rng.normal();
  return X;
}

}  // namespace

TEST_CASE("pca_fit captures rank-1 data with one component") {
  Eigen::VectorXd direction(3), mean(3);
  direction << 1, -2, 0.5;
  mean << 4, 4, 4;
  Eigen::MatrixXd X(6, 3);
  for (int i = 0; i < 6; ++i) X.row(i) = (mean + (i - 2.5) * direction).transpose();

  const auto model = ssd::pca_fit(X, 1);
  CHECK(model.cumulative_ratio == Approx(1.0).margin(1e-10));
}

TEST_CASE("pca_fit reaches cumulative ratio 1 at full rank") {
  const auto X = random_matrix(9, 4, 3);
  const auto model = ssd::pca_fit(X, 4);  // min(n-1, D) = 4
  CHECK(model.cumulative_ratio == Approx(1.0).margin(1e-10));
}

TEST_CASE("pca_fit matches the covariance eigensolve oracle") {
  const auto X = random_matrix(30, 10, 17);
  const auto model = ssd::pca_fit(X, 4);

  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mean;
  const auto eig = oracle::jacobi_eig(centered.transpose() * centered / (X.rows() - 1.0));
  const double total = eig.values.sum();

  for (int i = 0; i < 4; ++i) {
    CHECK(model.explained_variance_ratio(i) == Approx(eig.values(i) / total).margin(1e-8));
    // components match up to the sign convention
    CHECK(std::abs(model.components.row(i).dot(eig.vectors.col(i).transpose())) ==
          Approx(1.0).margin(1e-8));
  }
}

TEST_CASE("pca model invariants hold on random data") {
  const auto X = random_matrix(25, 8, 23);
  const auto model = ssd::pca_fit(X, 6);

  SECTION("components are orthonormal") {
    const Eigen::MatrixXd gram = model.components * model.components.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
  }

  SECTION("ratios are nonincreasing and sum below one") {
    for (int i = 1; i < 6; ++i)
      CHECK(model.explained_variance_ratio(i) <= model.explained_variance_ratio(i - 1) + 1e-12);
    CHECK(model.cumulative_ratio <= 1.0 + 1e-10);
  }

  SECTION("sign convention is deterministic across refits") {
    const auto again = ssd::pca_fit(X, 6);
    CHECK(model.components == again.components);
    for (int i = 0; i < 6; ++i) {
      Eigen::Index arg = 0;
      model.components.row(i).cwiseAbs().maxCoeff(&arg);
      CHECK(model.components(i, arg) >= 0.0);
    }
  }
}

TEST_CASE("project and back_project behave as adjoint maps") {
  const auto X = random_matrix(20, 5, 31);
  const auto model = ssd::pca_fit(X, 4);  // full rank of this 20x5 data is 5; use 4 first

  SECTION("the mean projects to zero") {
    CHECK(ssd::project(model, model.mean).norm() == Approx(0.0).margin(1e-12));
  }

  SECTION("a shifted component projects to a coordinate vector") {
    const double c = 2.75;
    const Eigen::VectorXd x = model.mean + c * model.components.row(1).transpose();
    const Eigen::VectorXd z = ssd::project(model, x);
    CHECK(z(1) == Approx(c).margin(1e-10));
    CHECK(z(0) == Approx(0.0).margin(1e-10));
    CHECK(z(2) == Approx(0.0).margin(1e-10));
  }

  SECTION("round-trip reconstructs at full data rank") {
    const auto full = ssd::pca_fit(X, 5);
    ssd::Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd x(5);
      for (int j = 0; j < 5; ++j) x(j) = rng.normal();
      // express x in the row space spanned by the data
      const Eigen::VectorXd z = ssd::project(full, x);
      const Eigen::VectorXd back = ssd::back_project_direction(full, z) + full.mean;
      CHECK((back - x).norm() < 1e-8);
    }
  }

  SECTION("back-projection is an isometry") {
    ssd::Rng rng(5);
    Eigen::VectorXd b(4);
    for (int j = 0; j < 4; ++j) b(j) = rng.normal();
    const Eigen::VectorXd up = ssd::back_project_direction(model, b);
    CHECK(up.norm() == Approx(b.norm()).margin(1e-10));
    const Eigen::VectorXd roundtrip = model.components * up;
    CHECK((roundtrip - b).norm() < 1e-8);
  }

  SECTION("basis vectors map to components") {
    CHECK((ssd::back_project_direction(model, Eigen::VectorXd::Unit(4, 0)) -
           model.components.row(0).transpose())
              .norm() == Approx(0.0).margin(1e-12));
    CHECK(ssd::back_project_direction(model, Eigen::VectorXd::Zero(4)).norm() == 0.0);
  }
}

TEST_CASE("pca_fit validates its bounds") {
  const auto X = random_matrix(6, 4, 41);
  CHECK_THROWS_AS(ssd::pca_fit(X, 0), ssd::Error);
  CHECK_THROWS_AS(ssd::pca_fit(X, 5), ssd::Error);  // min(n-1, D) = 4
  CHECK_NOTHROW(ssd::pca_fit(X, 4));
  CHECK_THROWS_AS(ssd::pca_fit(random_matrix(2, 4, 43), 1), ssd::Error);
}
