#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "ssd/sweep.hpp"
#include "ssd/synthbench.hpp"

#include "oracles.hpp"

using Catch::Approx;

namespace {

ssd::PlantedScenario small_scenario(std::uint64_t seed) {
  ssd::PlantedScenario scenario;
  scenario.seed = seed;
  scenario.n_authors = 80;
  scenario.vocab_size = 300;
  scenario.dim = 20;
  scenario.effective_rank = 5;
  scenario.noise_sd = 0.5;
  return scenario;
}

}  // namespace

TEST_CASE("gradient_change hits its landmark values") {
  Eigen::VectorXd a = Eigen::VectorXd::Unit(4, 0);
  Eigen::VectorXd b = Eigen::VectorXd::Unit(4, 1);
  CHECK(ssd::gradient_change(a, a) == Approx(0.0).margin(1e-15));
  CHECK(ssd::gradient_change(a, b) == Approx(1.0).margin(1e-15));
  CHECK(ssd::gradient_change(a, (-a).eval()) == Approx(2.0).margin(1e-15));
}

TEST_CASE("median_smooth removes spikes with truncated windows") {
  CHECK(ssd::median_smooth({3, 3, 3, 3}, 3) == std::vector<double>{3, 3, 3, 3});
  CHECK(ssd::median_smooth({0, 0, 9, 0, 0}, 3) == std::vector<double>{0, 0, 0, 0, 0});
  CHECK_THROWS_AS(ssd::median_smooth({1, 2, 3}, 4), ssd::Error);

  SECTION("random series matches a direct per-index sort") {
    ssd::Rng rng(3);
    std::vector<double> series(41);
    for (auto& v : series) v = rng.normal();
    const auto smoothed = ssd::median_smooth(series, 7);
    for (std::size_t i = 0; i < series.size(); ++i) {
      const std::size_t lo = i >= 3 ? i - 3 : 0;
      const std::size_t hi = std::min(series.size() - 1, i + 3);
      std::vector<double> window(series.begin() + static_cast<std::ptrdiff_t>(lo),
                                 series.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
      std::sort(window.begin(), window.end());
      CHECK(smoothed[i] == window[(window.size() - 1) / 2]);
    }
  }
}

TEST_CASE("auck averages truncated neighborhoods") {
  const std::vector<double> series = {1, 2, 3, 4};
  CHECK(ssd::auck(series, 0) == series);
  CHECK(ssd::auck({5, 5, 5}, 2) == std::vector<double>{5, 5, 5});

  // hand-enumerated truncated windows around a single spike
  const auto out = ssd::auck({0, 0, 0, 6, 0, 0, 0}, 3);
  const std::vector<double> expected = {1.5, 1.2, 1.0, 6.0 / 7.0, 1.0, 1.2, 1.5};
  REQUIRE(out.size() == expected.size());
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == Approx(expected[i]).margin(1e-12));
}

TEST_CASE("auck and median_smooth commute with adding a constant") {
  ssd::Rng rng(4);
  std::vector<double> series(25);
  for (auto& v : series) v = rng.normal();
  std::vector<double> shifted(series);
  for (auto& v : shifted) v += 10.0;

  const auto a1 = ssd::auck(series, 3);
  const auto a2 = ssd::auck(shifted, 3);
  const auto m1 = ssd::median_smooth(series, 5);
  const auto m2 = ssd::median_smooth(shifted, 5);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(a2[i] == Approx(a1[i] + 10.0).margin(1e-12));
    CHECK(m2[i] == Approx(m1[i] + 10.0).margin(1e-12));
  }
}

TEST_CASE("detrend_z removes the log-variance trend") {
  SECTION("an exactly affine series detrends to zeros") {
    std::vector<double> cum_var = {0.1, 0.2, 0.4, 0.6, 0.9};
    std::vector<double> values(5);
    for (std::size_t i = 0; i < 5; ++i) values[i] = 2.0 + 3.0 * std::log(cum_var[i]);
    for (double z : ssd::detrend_z(values, cum_var)) CHECK(z == Approx(0.0).margin(1e-10));
  }

  SECTION("residuals are standardized") {
    ssd::Rng rng(6);
    std::vector<double> cum_var(12), values(12);
    for (std::size_t i = 0; i < 12; ++i) {
      cum_var[i] = 0.05 + 0.07 * static_cast<double>(i);
      values[i] = rng.normal();
    }
    const auto z = ssd::detrend_z(values, cum_var);
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size() - 1);
    CHECK(mean == Approx(0.0).margin(1e-10));
    CHECK(std::sqrt(var) == Approx(1.0).margin(1e-10));
  }

  SECTION("matches the normal-equations oracle") {
    ssd::Rng rng(7);
    std::vector<double> cum_var(9), values(9);
    for (std::size_t i = 0; i < 9; ++i) {
      cum_var[i] = 0.1 + 0.1 * static_cast<double>(i);
      values[i] = rng.normal() + std::log(cum_var[i]);
    }
    Eigen::MatrixXd design(9, 2);
    Eigen::VectorXd y(9);
    for (int i = 0; i < 9; ++i) {
      design(i, 0) = 1.0;
      design(i, 1) = std::log(cum_var[static_cast<std::size_t>(i)]);
      y(i) = values[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd coef = oracle::normal_equations_solve(design, y);
    Eigen::VectorXd residuals = y - design * coef;
    const double mean = residuals.mean();
    const double sd = std::sqrt((residuals.array() - mean).square().sum() / 8.0);

    const auto z = ssd::detrend_z(values, cum_var);
    for (int i = 0; i < 9; ++i)
      CHECK(z[static_cast<std::size_t>(i)] == Approx((residuals(i) - mean) / sd).margin(1e-8));
  }

  SECTION("needs at least three points") {
    CHECK_THROWS_AS(ssd::detrend_z({1.0, 2.0}, {0.5, 0.6}), ssd::Error);
  }
}

TEST_CASE("standardize handles the degenerate flat series") {
  const auto z = ssd::standardize({2.0, 2.0, 2.0, 2.0});
  CHECK(z == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("selection returns the smallest argmax on ties") {
  // equal precomputed joint scores at two positions: the earlier one wins
  std::vector<double> joint = {0.1, 0.4, 0.2, 0.4, 0.3};
  CHECK(ssd::select_smallest_argmax(joint, 0) == 1);
  CHECK(ssd::select_smallest_argmax(joint, 2) == 3);
}

TEST_CASE("run_sweep produces consistent diagnostics end to end") {
  const auto data = ssd::generate(small_scenario(42));
  auto store = data.store;
  store.frequencies = ssd::corpus_frequencies(data.records);
  const auto built = ssd::build_pcvs(data.records, store, ssd::SifConfig{});
  Eigen::VectorXd y(static_cast<Eigen::Index>(built.pcvs.size()));
  for (std::size_t i = 0; i < built.pcvs.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = data.records[i].outcome("score");

  std::vector<int> grid;
  for (int k = 1; k <= 99; k += 2) grid.push_back(k);  // extends past feasibility

  ssd::SweepSettings settings;
  settings.seed = 5;
  settings.neighbors_per_pole = 40;
  const auto result = ssd::run_sweep(built.pcvs, y, store, grid, settings);

  SECTION("infeasible K values are skipped, not fatal") {
    const int cap = ssd::feasible_k_cap(built.pcvs.size(), store.dim);
    for (const auto& rec : result.records) {
      if (rec.k > cap) {
        CHECK(rec.skipped);
        CHECK_FALSE(rec.skip_reason.empty());
      } else {
        CHECK_FALSE(rec.skipped);
      }
    }
  }

  SECTION("per-record invariants hold") {
    bool first_feasible = true;
    double prev_cum = 0.0;
    for (const auto& rec : result.records) {
      if (rec.skipped) continue;
      if (first_feasible) {
        CHECK_FALSE(rec.delta.has_value());
        first_feasible = false;
      } else {
        REQUIRE(rec.delta.has_value());
        CHECK(*rec.delta >= 0.0);
        CHECK(*rec.delta <= 2.0);
      }
      CHECK(rec.joint == 0.5 * (rec.interp_auck + rec.stab_auck));  // exact by construction
      CHECK(rec.cum_var >= prev_cum - 1e-12);
      prev_cum = rec.cum_var;
    }
  }

  SECTION("selected k attains the maximal joint score at the smallest k") {
    double best = -1e300;
    for (const auto& rec : result.records)
      if (!rec.skipped) best = std::max(best, rec.joint);
    for (const auto& rec : result.records) {
      if (rec.skipped) continue;
      if (rec.k < result.selected_k) CHECK(rec.joint < best);
      if (rec.k == result.selected_k) CHECK(rec.joint == best);
    }
  }

  SECTION("worker count does not change the result") {
    ssd::SweepSettings parallel = settings;
    parallel.threads = 4;
    const auto again = ssd::run_sweep(built.pcvs, y, store, grid, parallel);
    CHECK(again.selected_k == result.selected_k);
    REQUIRE(again.records.size() == result.records.size());
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      const auto& a = result.records[i];
      const auto& b = again.records[i];
      CHECK(a.skipped == b.skipped);
      if (a.skipped) continue;
      CHECK(a.interp_raw == b.interp_raw);
      CHECK(a.joint == b.joint);
      CHECK(a.stab_z == b.stab_z);
      CHECK(a.delta == b.delta);
    }
  }
}

TEST_CASE("run_sweep validates its inputs") {
  const auto data = ssd::generate(small_scenario(43));
  auto store = data.store;
  store.frequencies = ssd::corpus_frequencies(data.records);
  const auto built = ssd::build_pcvs(data.records, store, ssd::SifConfig{});
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(built.pcvs.size()));

  ssd::SweepSettings settings;
  SECTION("non-increasing grid is a config error") {
    CHECK_THROWS_AS(ssd::run_sweep(built.pcvs, y, store, {3, 3, 5}, settings), ssd::Error);
  }
  SECTION("a grid with fewer than three feasible K fails") {
    CHECK_THROWS_AS(ssd::run_sweep(built.pcvs, y, store, {200, 300, 400}, settings), ssd::Error);
  }
  SECTION("even median window is a config error") {
    ssd::SweepSettings bad = settings;
    bad.median_win = 6;
    CHECK_THROWS_AS(ssd::run_sweep(built.pcvs, y, store, {1, 3, 5}, bad), ssd::Error);
  }
}
