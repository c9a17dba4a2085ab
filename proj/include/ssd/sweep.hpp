#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ssd/compose.hpp"
#include "ssd/embeddings.hpp"
#include "ssd/error.hpp"
#include "ssd/interpret.hpp"
#include "ssd/pca.hpp"
#include "ssd/regression.hpp"
#include "ssd/rng.hpp"

namespace ssd {

// Gradient change between consecutive unit gradients: 1 - cos. Zero for
// identical directions, 1 for orthogonal, 2 for opposite.
inline double gradient_change(const Eigen::VectorXd& g_k, const Eigen::VectorXd& g_prev) {
  const double denom = g_k.norm() * g_prev.norm();
  double cosine = denom > 0.0 ? g_k.dot(g_prev) / denom : 0.0;
  cosine = std::clamp(cosine, -1.0, 1.0);  // roundoff must not leave [0, 2]
  return 1.0 - cosine;
}

// Running median with a centered window of odd width `win`; windows shrink at
// the boundaries. Even-length edge windows take the lower median.
inline std::vector<double> median_smooth(const std::vector<double>& series, int win) {
  if (series.empty()) fail(ErrorKind::Data, "median_smooth of an empty series");
  if (win < 1 || win % 2 == 0)
    fail(ErrorKind::Config, "median window must be odd and positive, got " + std::to_string(win));

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.size());
  const std::ptrdiff_t half = win / 2;
  std::vector<double> out(series.size());
  std::vector<double> window;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    window.assign(series.begin() + lo, series.begin() + hi + 1);
    std::sort(window.begin(), window.end());
    out[static_cast<std::size_t>(i)] = window[(window.size() - 1) / 2];
  }
  return out;
}

// Local neighborhood average with index radius, truncated at boundaries.
inline std::vector<double> auck(const std::vector<double>& series, int radius) {
  if (series.empty()) fail(ErrorKind::Data, "auck of an empty series");
  if (radius < 0) fail(ErrorKind::Config, "auck radius must be nonnegative");

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<double> out(series.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - radius);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + radius);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += series[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// z-standardization with the sample (n-1) standard deviation; a series with
// variance below 1e-12 standardizes to all zeros.
inline std::vector<double> standardize(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = values.size() > 1 ? var / (n - 1.0) : 0.0;

  std::vector<double> out(values.size(), 0.0);
  if (var < 1e-12) return out;
  const double sd = std::sqrt(var);
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

// OLS detrend of `values` against log cumulative variance, residuals
// z-standardized. Removes the mechanical growth of interpretability with
// representation capacity before scoring.
inline std::vector<double> detrend_z(const std::vector<double>& values,
                                     const std::vector<double>& cum_var) {
  if (values.size() != cum_var.size())
    fail(ErrorKind::Numeric, "detrend_z: length mismatch");
  if (values.size() < 3)
    fail(ErrorKind::Numeric, "detrend_z needs at least 3 points, got " +
                                 std::to_string(values.size()));

  const std::size_t n = values.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cum_var[i] > 0.0))
      fail(ErrorKind::Numeric, "detrend_z: cumulative variance must be positive");
    x[i] = std::log(cum_var[i]);
  }

  double x_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x_mean += x[i];
    y_mean += values[i];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - x_mean) * (x[i] - x_mean);
    sxy += (x[i] - x_mean) * (values[i] - y_mean);
  }
  const double slope = sxx > 1e-300 ? sxy / sxx : 0.0;

  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i)
    residuals[i] = values[i] - (y_mean + slope * (x[i] - x_mean));
  return standardize(residuals);
}

// Per-K diagnostics. Numeric fields are NaN on skipped records; `delta` is
// additionally undefined at the first evaluated K (its smoothed value is
// imputed from the successor for scoring).
struct SweepRecord {
  int k = 0;
  bool skipped = false;
  std::string skip_reason;
  double cum_var = std::numeric_limits<double>::quiet_NaN();
  double interp_raw = std::numeric_limits<double>::quiet_NaN();
  double interp_z = std::numeric_limits<double>::quiet_NaN();
  double interp_auck = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> delta;
  double delta_smooth = std::numeric_limits<double>::quiet_NaN();
  double stab_z = std::numeric_limits<double>::quiet_NaN();
  double stab_auck = std::numeric_limits<double>::quiet_NaN();
  double joint = std::numeric_limits<double>::quiet_NaN();
  double r2_adj = std::numeric_limits<double>::quiet_NaN();
  double f_stat = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double beta_norm = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  std::vector<SweepRecord> records;  // one per grid K, in grid order
  int selected_k = 0;
  GradientFit selected_fit;
  InterpretabilityReport selected_report;
  std::size_t n_authors = 0;
};

struct SweepSettings {
  std::size_t neighbors_per_pole = 100;
  int cluster_k_min = 2;
  int cluster_k_max = 5;
  int auck_radius = 3;
  int median_win = 7;
  std::uint64_t seed = 0;
  int threads = 1;
  bool exclude_first_k = false;  // drop the imputed-delta first K from selection
  const NeighborFilter* filter = nullptr;

  void validate() const {
    if (median_win < 1 || median_win % 2 == 0)
      fail(ErrorKind::Config, "median window must be odd and positive");
    if (auck_radius < 0) fail(ErrorKind::Config, "auck radius must be nonnegative");
    if (cluster_k_min < 1 || cluster_k_max < cluster_k_min)
      fail(ErrorKind::Config, "invalid cluster k range");
    if (neighbors_per_pole < 1) fail(ErrorKind::Config, "neighbors_per_pole must be >= 1");
    if (threads < 1) fail(ErrorKind::Config, "threads must be >= 1");
  }
};

// Largest K for which PCA and the regression are both feasible.
inline int feasible_k_cap(std::size_t n_authors, Eigen::Index dim) {
  return static_cast<int>(std::min<Eigen::Index>(static_cast<Eigen::Index>(n_authors) - 2, dim));
}

// Smallest index attaining the maximal joint score (strict > keeps the first).
inline std::size_t select_smallest_argmax(const std::vector<double>& joint, std::size_t first) {
  std::size_t best = first;
  for (std::size_t i = first; i < joint.size(); ++i)
    if (joint[i] > joint[best]) best = i;
  return best;
}

namespace detail {

struct PerKOutcome {
  bool ok = false;
  std::string reason;
  double cum_var = 0.0;
  GradientFit fit;
  InterpretabilityReport report;
};

}  // namespace detail

// Runs SSD across the K grid: per-K PCA + regression + pole interpretation,
// then the detrend / smooth / AUCK scoring pipeline and the smallest-argmax
// selection. Per-K failures are recorded as skipped, not fatal. Output is
// independent of the worker count.
inline SweepResult run_sweep(const std::vector<Pcv>& pcvs, const Eigen::VectorXd& outcomes,
                             const EmbeddingStore& store, const std::vector<int>& k_grid,
                             const SweepSettings& settings) {
  settings.validate();
  if (pcvs.empty()) fail(ErrorKind::Data, "no PCVs");
  if (static_cast<Eigen::Index>(pcvs.size()) != outcomes.size())
    fail(ErrorKind::Numeric, "outcome count does not match PCV count");
  for (std::size_t i = 1; i < k_grid.size(); ++i)
    if (k_grid[i] <= k_grid[i - 1])
      fail(ErrorKind::Config, "K grid must be strictly increasing");
  if (!k_grid.empty() && k_grid.front() < 1)
    fail(ErrorKind::Config, "K grid values must be positive");

  const std::size_t n = pcvs.size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), store.dim);
  for (std::size_t i = 0; i < n; ++i)
    X.row(static_cast<Eigen::Index>(i)) = pcvs[i].vector.transpose();

  const FullPca full = pca_fit_full(X);
  const int k_cap = feasible_k_cap(n, store.dim);

  // Stage 1: independent per-K evaluations into index-addressed slots.
  std::vector<detail::PerKOutcome> slots(k_grid.size());
  std::atomic<std::size_t> cursor{0};
  const auto eval_k = [&](std::size_t slot) {
    const int k = k_grid[slot];
    detail::PerKOutcome& out = slots[slot];
    if (k > k_cap || k > full.rank_cap) {
      out.reason = "k exceeds feasible cap " +
                   std::to_string(std::min<Eigen::Index>(k_cap, full.rank_cap));
      return;
    }
    try {
      const PcaModel model = pca_truncate(full, k);
      const Eigen::MatrixXd Xk = project_rows(model, X);
      out.fit = fit_ols(Xk, outcomes, model);
      InterpretOptions opts;
      opts.neighbors_per_pole = settings.neighbors_per_pole;
      opts.cluster_k_min = settings.cluster_k_min;
      opts.cluster_k_max = settings.cluster_k_max;
      opts.seed = mix_seed(settings.seed, static_cast<std::uint64_t>(k));
      opts.filter = settings.filter;
      out.report = interpret_gradient(out.fit.gradient_d, store, opts);
      out.cum_var = model.cumulative_ratio;
      out.ok = true;
    } catch (const Error& e) {
      out.reason = e.what();
    }
  };

  const int workers = std::max(1, std::min<int>(settings.threads, static_cast<int>(k_grid.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < k_grid.size(); ++i) eval_k(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = cursor.fetch_add(1); i < k_grid.size(); i = cursor.fetch_add(1))
          eval_k(i);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i].ok) feasible.push_back(i);
  if (feasible.size() < 3)
    fail(ErrorKind::Numeric, "only " + std::to_string(feasible.size()) +
                                 " evaluable K values; the sweep needs at least 3");

  // Stage 2: sequential scoring over the feasible records.
  const std::size_t m = feasible.size();
  std::vector<double> interp_raw(m), cum_var(m);
  for (std::size_t i = 0; i < m; ++i) {
    interp_raw[i] = slots[feasible[i]].report.score;
    cum_var[i] = slots[feasible[i]].cum_var;
  }

  std::vector<double> deltas(m - 1);
  for (std::size_t i = 1; i < m; ++i)
    deltas[i - 1] = gradient_change(slots[feasible[i]].fit.gradient_d,
                                    slots[feasible[i - 1]].fit.gradient_d);

  const std::vector<double> interp_z = detrend_z(interp_raw, cum_var);
  const std::vector<double> interp_auck = auck(interp_z, settings.auck_radius);

  const std::vector<double> smoothed = median_smooth(deltas, settings.median_win);
  std::vector<double> delta_smooth(m);
  delta_smooth[0] = smoothed[0];  // first K copies its successor's smoothed value
  for (std::size_t i = 1; i < m; ++i) delta_smooth[i] = smoothed[i - 1];

  std::vector<double> negated(m);
  for (std::size_t i = 0; i < m; ++i) negated[i] = -delta_smooth[i];
  const std::vector<double> stab_z = standardize(negated);
  const std::vector<double> stab_auck = auck(stab_z, settings.auck_radius);

  std::vector<double> joint(m);
  for (std::size_t i = 0; i < m; ++i) joint[i] = 0.5 * (interp_auck[i] + stab_auck[i]);

  const std::size_t first = settings.exclude_first_k && m > 1 ? 1 : 0;
  const std::size_t selected_pos = select_smallest_argmax(joint, first);

  SweepResult result;
  result.n_authors = n;
  result.records.resize(k_grid.size());
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    SweepRecord& rec = result.records[i];
    rec.k = k_grid[i];
    if (!slots[i].ok) {
      rec.skipped = true;
      rec.skip_reason = slots[i].reason;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    SweepRecord& rec = result.records[feasible[i]];
    rec.cum_var = cum_var[i];
    rec.interp_raw = interp_raw[i];
    rec.interp_z = interp_z[i];
    rec.interp_auck = interp_auck[i];
    if (i > 0) rec.delta = deltas[i - 1];
    rec.delta_smooth = delta_smooth[i];
    rec.stab_z = stab_z[i];
    rec.stab_auck = stab_auck[i];
    rec.joint = joint[i];
    const GradientFit& fit = slots[feasible[i]].fit;
    rec.r2_adj = fit.r2_adj;
    rec.f_stat = fit.f_stat;
    rec.p_value = fit.p_value;
    rec.beta_norm = fit.beta_norm;
  }

  result.selected_k = k_grid[feasible[selected_pos]];
  result.selected_fit = std::move(slots[feasible[selected_pos]].fit);
  result.selected_report = std::move(slots[feasible[selected_pos]].report);
  return result;
}

}  // namespace ssd
