#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssd/compose.hpp"
#include "ssd/error.hpp"

namespace ssd {

enum class RunMode { Sweep, FixedK };

// Resolved run configuration. Defaults follow the reference analysis setup:
// SIF a = 1e-3 with top-1 component removal, K grid {1,3,...,119}, silhouette
// cluster selection over k in [2,5], 100 neighbors per pole, AUCK radius 3,
// median window 7.
struct RunConfig {
  std::string embeddings_path;
  std::string corpus_path;
  std::string lexicon_path;         // optional; empty = whole-document mode
  std::string exclusion_list_path;  // optional neighbor exclusions
  std::string output_dir = ".";

  std::string outcome;

  SifConfig sif;

  int k_start = 1;
  int k_stop = 119;
  int k_step = 2;

  std::size_t neighbors_per_pole = 100;
  int cluster_k_min = 2;
  int cluster_k_max = 5;
  int auck_radius = 3;
  int median_win = 7;
  std::size_t snippet_top_m = 3;

  std::uint64_t seed = 0;
  int threads = 1;
  bool exclude_first_k = false;
  bool restrict_neighbors_to_corpus = false;

  RunMode mode = RunMode::Sweep;
  int fixed_k = 0;  // used when mode == FixedK

  std::vector<int> k_grid() const {
    std::vector<int> grid;
    for (int k = k_start; k <= k_stop; k += k_step) grid.push_back(k);
    return grid;
  }

  void validate() const {
    if (embeddings_path.empty()) fail(ErrorKind::Config, "embeddings path is required");
    if (corpus_path.empty()) fail(ErrorKind::Config, "corpus path is required");
    if (outcome.empty()) fail(ErrorKind::Config, "outcome name is required");
    if (k_start < 1 || k_step < 1 || k_stop < k_start)
      fail(ErrorKind::Config, "invalid K grid specification");
    if (mode == RunMode::FixedK && fixed_k < 1)
      fail(ErrorKind::Config, "fixed-K mode requires K >= 1");
    if (median_win < 1 || median_win % 2 == 0)
      fail(ErrorKind::Config, "median window must be odd and positive");
    if (auck_radius < 0) fail(ErrorKind::Config, "auck radius must be nonnegative");
    if (cluster_k_min < 1 || cluster_k_max < cluster_k_min)
      fail(ErrorKind::Config, "invalid cluster k range");
    if (neighbors_per_pole < 1) fail(ErrorKind::Config, "neighbors_per_pole must be >= 1");
    if (snippet_top_m < 1) fail(ErrorKind::Config, "snippet count must be >= 1");
    if (threads < 1) fail(ErrorKind::Config, "threads must be >= 1");
    sif.validate();
  }
};

}  // namespace ssd
