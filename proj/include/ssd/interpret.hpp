#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ssd/compose.hpp"
#include "ssd/embeddings.hpp"
#include "ssd/error.hpp"
#include "ssd/rng.hpp"

namespace ssd {

enum class Pole { Positive, Negative };

inline double pole_sign(Pole pole) { return pole == Pole::Positive ? 1.0 : -1.0; }
inline const char* pole_name(Pole pole) { return pole == Pole::Positive ? "positive" : "negative"; }

struct Neighbor {
  std::string word;
  Eigen::Index vocab_index = 0;
  double cosine = 0.0;  // against the signed gradient
};

// Optional vocabulary filtering for neighbor retrieval. By default the full
// embedding vocabulary is searched.
struct NeighborFilter {
  std::optional<std::unordered_set<std::string>> restrict_to;
  std::unordered_set<std::string> exclude;

  bool allows(const std::string& word) const {
    if (exclude.count(word)) return false;
    if (restrict_to && !restrict_to->count(word)) return false;
    return true;
  }
};

// The n vocabulary words most cosine-aligned with the signed gradient.
// Ties break by vocabulary order; zero vectors are excluded.
inline std::vector<Neighbor> pole_neighbors(const Eigen::VectorXd& gradient_d,
                                            const EmbeddingStore& store, Pole pole,
                                            std::size_t n,
                                            const NeighborFilter* filter = nullptr) {
  if (store.size() == 0) fail(ErrorKind::Data, "empty embedding store");
  const double sign = pole_sign(pole);
  const Eigen::VectorXd scores = sign * (store.table * gradient_d);

  std::vector<Eigen::Index> eligible;
  eligible.reserve(static_cast<std::size_t>(store.size()));
  for (Eigen::Index i = 0; i < store.size(); ++i) {
    if (store.norms(i) <= 1e-12) continue;
    if (filter && !filter->allows(store.vocab[static_cast<std::size_t>(i)])) continue;
    eligible.push_back(i);
  }

  std::vector<double> cosines(static_cast<std::size_t>(store.size()), 0.0);
  for (Eigen::Index i : eligible)
    cosines[static_cast<std::size_t>(i)] = scores(i) / store.norms(i);

  if (n > eligible.size()) {
    warn("requested " + std::to_string(n) + " neighbors but only " +
         std::to_string(eligible.size()) + " eligible words; returning all");
    n = eligible.size();
  }

  const auto better = [&](Eigen::Index a, Eigen::Index b) {
    const double ca = cosines[static_cast<std::size_t>(a)];
    const double cb = cosines[static_cast<std::size_t>(b)];
    return ca > cb || (ca == cb && a < b);
  };
  std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(n),
                    eligible.end(), better);

  std::vector<Neighbor> result;
  result.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index idx = eligible[i];
    result.push_back(Neighbor{store.vocab[static_cast<std::size_t>(idx)], idx,
                              cosines[static_cast<std::size_t>(idx)]});
  }
  return result;
}

struct KmeansResult {
  std::vector<int> assignments;
  Eigen::MatrixXd centroids;  // k x D
  double wcss = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double sq_dist(const Eigen::MatrixXd& X, Eigen::Index i, const Eigen::RowVectorXd& c) {
  return (X.row(i) - c).squaredNorm();
}

inline KmeansResult kmeans_single(const Eigen::MatrixXd& X, int k, Rng& rng) {
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd centroids(k, X.cols());

  // k-means++ seeding
  centroids.row(0) = X.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(m))));
  Eigen::VectorXd min_d2 = (X.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = min_d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < m; ++i) {
        target -= min_d2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
        chosen = i;
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(m)));
    }
    centroids.row(c) = X.row(chosen);
    min_d2 = min_d2.cwiseMin((X.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assignments(static_cast<std::size_t>(m), -1);
  constexpr int kMaxIter = 100;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best = 0;
      double best_d = sq_dist(X, i, centroids.row(0));
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(X, i, centroids.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assignments[static_cast<std::size_t>(i)] != best) {
        assignments[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      sums.row(assignments[static_cast<std::size_t>(i)]) += X.row(i);
      ++counts[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);

    // An emptied cluster is re-seeded at the farthest point of a non-singleton
    // cluster, which moves there immediately so every cluster stays nonempty.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const int owner = assignments[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double d = sq_dist(X, i, centroids.row(owner));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;  // k > number of points; cannot fill
      const int owner = assignments[static_cast<std::size_t>(far)];
      --counts[static_cast<std::size_t>(owner)];
      sums.row(owner) -= X.row(far);
      centroids.row(owner) = sums.row(owner) / static_cast<double>(counts[static_cast<std::size_t>(owner)]);
      assignments[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      sums.row(c) = X.row(far);
      centroids.row(c) = X.row(far);
      changed = true;
    }
    if (!changed) break;
  }

  KmeansResult result;
  result.assignments = std::move(assignments);
  result.centroids = std::move(centroids);
  result.wcss = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    result.wcss += sq_dist(X, i, result.centroids.row(result.assignments[static_cast<std::size_t>(i)]));
  return result;
}

inline Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& X) {
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd dist(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = (X.row(i) - X.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

inline double silhouette_from_distances(const Eigen::MatrixXd& dist,
                                        const std::vector<int>& assignments, int k) {
  const Eigen::Index m = dist.rows();
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++counts[static_cast<std::size_t>(a)];

  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const int own = assignments[static_cast<std::size_t>(i)];
    if (counts[static_cast<std::size_t>(own)] <= 1) continue;  // singleton scores 0

    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != i) sums[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] += dist(i, j);

    const double a = sums[static_cast<std::size_t>(own)] /
                     static_cast<double>(counts[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || counts[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, sums[static_cast<std::size_t>(c)] /
                          static_cast<double>(counts[static_cast<std::size_t>(c)]));
    }
    if (std::isinf(b)) continue;  // no other nonempty cluster
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(m);
}

}  // namespace detail

// Lloyd's k-means with k-means++ seeding, 10 restarts, best WCSS kept.
// Deterministic for a fixed seed.
inline KmeansResult kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                           int restarts = 10) {
  const Eigen::Index m = X.rows();
  if (k < 1 || static_cast<Eigen::Index>(k) > m)
    fail(ErrorKind::Numeric, "kmeans: k=" + std::to_string(k) + " out of range for " +
                                 std::to_string(m) + " points");
  KmeansResult best;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    KmeansResult candidate = detail::kmeans_single(X, k, rng);
    if (candidate.wcss < best.wcss) best = std::move(candidate);
  }
  return best;
}

// Mean silhouette over points, Euclidean distances; singletons score 0.
inline double silhouette_mean(const Eigen::MatrixXd& X, const std::vector<int>& assignments) {
  if (static_cast<Eigen::Index>(assignments.size()) != X.rows())
    fail(ErrorKind::Numeric, "silhouette: assignment length mismatch");
  const int k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(std::max(k, 1)), 0);
  for (int a : assignments) {
    if (a < 0 || a >= k) fail(ErrorKind::Numeric, "silhouette: invalid cluster label");
    ++counts[static_cast<std::size_t>(a)];
  }
  int nonempty = 0;
  for (Eigen::Index c : counts)
    if (c > 0) ++nonempty;
  if (nonempty < 2)
    fail(ErrorKind::Numeric, "silhouette undefined for fewer than 2 clusters");
  return detail::silhouette_from_distances(detail::pairwise_distances(X), assignments, k);
}

// Mean pairwise cosine similarity over distinct member pairs; a singleton
// cluster scores 1 by convention.
inline double cluster_coherence(const Eigen::MatrixXd& members) {
  const Eigen::Index m = members.rows();
  if (m < 1) fail(ErrorKind::Numeric, "coherence of an empty cluster");
  if (m == 1) return 1.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double denom = members.row(i).norm() * members.row(j).norm();
      total += denom > 0.0 ? members.row(i).dot(members.row(j)) / denom : 0.0;
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

// Cosine between the cluster centroid and the pole-signed gradient.
inline double cluster_alignment(const Eigen::VectorXd& centroid, const Eigen::VectorXd& gradient_d,
                                Pole pole) {
  const double norm = centroid.norm() * gradient_d.norm();
  if (norm <= 0.0) fail(ErrorKind::Numeric, "alignment of a zero centroid");
  return pole_sign(pole) * centroid.dot(gradient_d) / norm;
}

struct PoleCluster {
  Pole pole = Pole::Positive;
  std::vector<Neighbor> members;  // in cosine-to-signed-gradient order
  Eigen::VectorXd centroid;       // unit
  double coherence = 0.0;
  double alignment = 0.0;

  std::size_t size() const { return members.size(); }
};

// Clusters one pole's neighbor words on their L2-normalized vectors, picking
// the cluster count by mean silhouette over k_range (smallest k on ties).
// Fewer words than k_min fall back to a single cluster with a warning.
inline std::vector<PoleCluster> cluster_pole(const std::vector<Neighbor>& words,
                                             const EmbeddingStore& store,
                                             const Eigen::VectorXd& gradient_d, Pole pole,
                                             int k_min, int k_max, std::uint64_t seed,
                                             double* chosen_silhouette = nullptr) {
  if (words.empty()) fail(ErrorKind::Data, "no neighbor words to cluster");
  if (k_min < 1 || k_max < k_min) fail(ErrorKind::Config, "invalid cluster k range");

  const Eigen::Index m = static_cast<Eigen::Index>(words.size());
  Eigen::MatrixXd X(m, store.dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index idx = words[static_cast<std::size_t>(i)].vocab_index;
    X.row(i) = store.table.row(idx) / store.norms(idx);
  }

  std::vector<int> assignments;
  int chosen_k = 1;
  double best_sil = std::numeric_limits<double>::quiet_NaN();

  if (m < k_min) {
    warn("pole '" + std::string(pole_name(pole)) + "': only " + std::to_string(m) +
         " neighbors, below cluster range minimum " + std::to_string(k_min) +
         "; using a single cluster");
    assignments.assign(static_cast<std::size_t>(m), 0);
  } else {
    const int hi = std::min<int>(k_max, static_cast<int>(m));
    const Eigen::MatrixXd dist = detail::pairwise_distances(X);
    bool have = false;
    for (int k = k_min; k <= hi; ++k) {
      KmeansResult run = kmeans(X, k, mix_seed(seed, static_cast<std::uint64_t>(k)));
      const double sil = detail::silhouette_from_distances(dist, run.assignments, k);
      if (!have || sil > best_sil) {  // strict: smallest k wins ties
        best_sil = sil;
        chosen_k = k;
        assignments = std::move(run.assignments);
        have = true;
      }
    }
  }
  if (chosen_silhouette) *chosen_silhouette = best_sil;

  // Group members per label, keeping neighbor-rank (cosine) order inside each
  // cluster; order clusters by size descending, first-member rank on ties.
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(std::max(chosen_k, 1)));
  for (std::size_t i = 0; i < words.size(); ++i)
    groups[static_cast<std::size_t>(assignments[i])].push_back(i);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
  });

  std::vector<PoleCluster> clusters;
  clusters.reserve(groups.size());
  for (const auto& group : groups) {
    PoleCluster cluster;
    cluster.pole = pole;
    Eigen::MatrixXd member_rows(static_cast<Eigen::Index>(group.size()), store.dim);
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(store.dim);
    for (std::size_t j = 0; j < group.size(); ++j) {
      cluster.members.push_back(words[group[j]]);
      member_rows.row(static_cast<Eigen::Index>(j)) = X.row(static_cast<Eigen::Index>(group[j]));
      centroid += X.row(static_cast<Eigen::Index>(group[j])).transpose();
    }
    centroid /= static_cast<double>(group.size());
    const double norm = centroid.norm();
    if (norm <= 0.0) fail(ErrorKind::Numeric, "degenerate cluster centroid");
    cluster.centroid = centroid / norm;
    cluster.coherence = cluster_coherence(member_rows);
    cluster.alignment = cluster_alignment(cluster.centroid, gradient_d, pole);
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

// Cluster size-weighted mean of (coherence + alignment) / 2 over all clusters
// from both poles.
inline double interpretability_score(const std::vector<PoleCluster>& clusters) {
  if (clusters.empty()) fail(ErrorKind::Data, "interpretability score of no clusters");
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& c : clusters) {
    const double size = static_cast<double>(c.size());
    weighted += size * 0.5 * (c.coherence + c.alignment);
    total += size;
  }
  return weighted / total;
}

struct InterpretabilityReport {
  std::vector<PoleCluster> clusters;  // positive pole clusters first
  double score = 0.0;
  std::size_t neighbors_per_pole = 0;
  double positive_silhouette = std::numeric_limits<double>::quiet_NaN();
  double negative_silhouette = std::numeric_limits<double>::quiet_NaN();
};

struct InterpretOptions {
  std::size_t neighbors_per_pole = 100;
  int cluster_k_min = 2;
  int cluster_k_max = 5;
  std::uint64_t seed = 0;
  const NeighborFilter* filter = nullptr;
};

// Full pole interpretation for one gradient: neighbor retrieval, per-pole
// clustering, and the aggregate interpretability score.
inline InterpretabilityReport interpret_gradient(const Eigen::VectorXd& gradient_d,
                                                 const EmbeddingStore& store,
                                                 const InterpretOptions& options) {
  InterpretabilityReport report;
  report.neighbors_per_pole = options.neighbors_per_pole;
  for (Pole pole : {Pole::Positive, Pole::Negative}) {
    const auto neighbors =
        pole_neighbors(gradient_d, store, pole, options.neighbors_per_pole, options.filter);
    double sil = std::numeric_limits<double>::quiet_NaN();
    auto clusters = cluster_pole(neighbors, store, gradient_d, pole, options.cluster_k_min,
                                 options.cluster_k_max,
                                 mix_seed(options.seed, pole == Pole::Positive ? 0x706F73u : 0x6E6567u),
                                 &sil);
    (pole == Pole::Positive ? report.positive_silhouette : report.negative_silhouette) = sil;
    for (auto& c : clusters) report.clusters.push_back(std::move(c));
  }
  report.score = interpretability_score(report.clusters);
  return report;
}

// Authors whose PCVs are most cosine-aligned with a cluster centroid.
struct SnippetRef {
  std::size_t pcv_index = 0;
  std::string author_id;
  double cosine = 0.0;
};

inline std::vector<SnippetRef> snippets_for_cluster(const Eigen::VectorXd& centroid,
                                                    const std::vector<Pcv>& pcvs,
                                                    std::size_t top_m) {
  if (pcvs.empty()) fail(ErrorKind::Data, "no PCVs for snippet retrieval");
  const double cnorm = centroid.norm();
  std::vector<SnippetRef> refs;
  refs.reserve(pcvs.size());
  for (std::size_t i = 0; i < pcvs.size(); ++i) {
    const double denom = cnorm * pcvs[i].vector.norm();
    const double cosine = denom > 0.0 ? centroid.dot(pcvs[i].vector) / denom : 0.0;
    refs.push_back(SnippetRef{i, pcvs[i].author_id, cosine});
  }
  std::stable_sort(refs.begin(), refs.end(),
                   [](const SnippetRef& a, const SnippetRef& b) { return a.cosine > b.cosine; });
  if (refs.size() > top_m) refs.resize(top_m);
  return refs;
}

}  // namespace ssd
