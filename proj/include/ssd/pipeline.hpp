#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ssd/compose.hpp"
#include "ssd/config.hpp"
#include "ssd/corpus.hpp"
#include "ssd/embeddings.hpp"
#include "ssd/error.hpp"
#include "ssd/interpret.hpp"
#include "ssd/pca.hpp"
#include "ssd/regression.hpp"
#include "ssd/report.hpp"
#include "ssd/sweep.hpp"
#include "ssd/synthbench.hpp"

namespace ssd {

// Loaded and prepared analysis inputs, independent of the source (files via
// load_inputs, or in-memory data from the synthetic generator).
struct AnalysisInputs {
  EmbeddingStore store;
  std::vector<AuthorRecord> records;
  std::optional<Lexicon> lexicon;
  NeighborFilter filter;
  bool use_filter = false;
};

inline AnalysisInputs load_inputs(const RunConfig& config) {
  AnalysisInputs inputs;
  inputs.store = load_embeddings(config.embeddings_path);
  if (inputs.store.duplicate_count > 0)
    warn(std::to_string(inputs.store.duplicate_count) + " duplicate embedding rows ignored");
  inputs.records = load_corpus(config.corpus_path, {config.outcome});
  if (!config.lexicon_path.empty()) inputs.lexicon = load_lexicon(config.lexicon_path);
  return inputs;
}

// Attaches corpus-derived SIF frequencies and the neighbor filter implied by
// the configuration. Call once per (inputs, config) pair before analysis.
inline void prepare_inputs(AnalysisInputs& inputs, const RunConfig& config) {
  inputs.store.frequencies = corpus_frequencies(inputs.records);

  inputs.use_filter = false;
  inputs.filter = NeighborFilter{};
  if (config.restrict_neighbors_to_corpus) {
    std::unordered_set<std::string> corpus_tokens;
    for (const auto& rec : inputs.records)
      for (const auto& text : rec.texts)
        for (auto& token : tokenize(text)) corpus_tokens.insert(std::move(token));
    inputs.filter.restrict_to = std::move(corpus_tokens);
    inputs.use_filter = true;
  }
  if (!config.exclusion_list_path.empty()) {
    const Lexicon exclusions = load_lexicon(config.exclusion_list_path);
    inputs.filter.exclude.insert(exclusions.terms.begin(), exclusions.terms.end());
    inputs.use_filter = true;
  }
}

struct PreparedData {
  std::vector<Pcv> pcvs;
  Eigen::VectorXd outcomes;
};

inline PreparedData build_analysis_data(const AnalysisInputs& inputs, const RunConfig& config) {
  const Lexicon* lexicon = inputs.lexicon ? &*inputs.lexicon : nullptr;
  PcvBuildResult built = build_pcvs(inputs.records, inputs.store, config.sif, lexicon);
  for (const auto& author : built.dropped_authors)
    warn("author '" + author + "' has no usable content; dropped");

  std::unordered_map<std::string, const AuthorRecord*> by_id;
  for (const auto& rec : inputs.records) by_id.emplace(rec.author_id, &rec);

  PreparedData data;
  data.outcomes.resize(static_cast<Eigen::Index>(built.pcvs.size()));
  for (std::size_t i = 0; i < built.pcvs.size(); ++i)
    data.outcomes(static_cast<Eigen::Index>(i)) =
        by_id.at(built.pcvs[i].author_id)->outcome(config.outcome);
  data.pcvs = std::move(built.pcvs);
  return data;
}

namespace detail {

// First ~max_bytes of the author's text, cut on a UTF-8 boundary, newlines
// flattened for single-line display.
inline std::string make_excerpt(const AuthorRecord& rec, std::size_t max_bytes = 200) {
  std::string joined;
  for (const auto& text : rec.texts) {
    if (!joined.empty()) joined += ' ';
    joined += text;
  }
  for (char& c : joined)
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  if (joined.size() <= max_bytes) return joined;
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(joined[cut]) & 0xC0u) == 0x80u) --cut;
  return joined.substr(0, cut) + "...";
}

inline std::vector<ClusterOut> cluster_outputs(const InterpretabilityReport& report,
                                               const std::vector<Pcv>& pcvs,
                                               const std::vector<AuthorRecord>& records,
                                               std::size_t top_m) {
  std::unordered_map<std::string, const AuthorRecord*> by_id;
  for (const auto& rec : records) by_id.emplace(rec.author_id, &rec);

  std::vector<ClusterOut> out;
  out.reserve(report.clusters.size());
  for (const auto& cluster : report.clusters) {
    ClusterOut c;
    c.pole = pole_name(cluster.pole);
    c.size = cluster.size();
    for (const auto& member : cluster.members) c.top_words.emplace_back(member.word, member.cosine);
    c.coherence = cluster.coherence;
    c.alignment = cluster.alignment;
    for (const auto& ref : snippets_for_cluster(cluster.centroid, pcvs, top_m))
      c.snippets.push_back(
          SnippetOut{ref.author_id, ref.cosine, make_excerpt(*by_id.at(ref.author_id))});
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

struct PipelineOutcome {
  int k = 0;
  GradientFit fit;
  InterpretabilityReport report;
  std::optional<SweepResult> sweep;
  std::vector<std::string> artifacts;
};

// Full sweep run over prepared inputs, artifacts written into output_dir:
// sweep_diagnostics.csv, selected_fit.json, clusters.json, clusters.md,
// curves.svg.
inline PipelineOutcome run_sweep_pipeline(const AnalysisInputs& inputs, const RunConfig& config) {
  config.validate();
  const PreparedData data = build_analysis_data(inputs, config);

  SweepSettings settings;
  settings.neighbors_per_pole = config.neighbors_per_pole;
  settings.cluster_k_min = config.cluster_k_min;
  settings.cluster_k_max = config.cluster_k_max;
  settings.auck_radius = config.auck_radius;
  settings.median_win = config.median_win;
  settings.seed = config.seed;
  settings.threads = config.threads;
  settings.exclude_first_k = config.exclude_first_k;
  settings.filter = inputs.use_filter ? &inputs.filter : nullptr;

  PipelineOutcome outcome;
  SweepResult result = run_sweep(data.pcvs, data.outcomes, inputs.store, config.k_grid(), settings);
  outcome.k = result.selected_k;
  outcome.fit = result.selected_fit;
  outcome.report = result.selected_report;

  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const auto path_of = [&](const char* name) { return (fs::path(config.output_dir) / name).string(); };

  const auto clusters =
      detail::cluster_outputs(result.selected_report, data.pcvs, inputs.records, config.snippet_top_m);

  write_sweep_csv(result.records, config, path_of("sweep_diagnostics.csv"));
  write_selected_fit_json(result.selected_k, result.selected_fit, result.n_authors, config,
                          path_of("selected_fit.json"));
  write_clusters_json(clusters, result.selected_k, config, path_of("clusters.json"));
  write_clusters_md(clusters, result.selected_k, config, path_of("clusters.md"));
  write_curves_svg(result.records, result.selected_k, config, path_of("curves.svg"));
  outcome.artifacts = {path_of("sweep_diagnostics.csv"), path_of("selected_fit.json"),
                       path_of("clusters.json"), path_of("clusters.md"), path_of("curves.svg")};
  outcome.sweep = std::move(result);
  return outcome;
}

// Single SSD run at a user-chosen K (the high-K counterfactual mode). Same
// artifact set minus the sweep diagnostics and curves.
inline PipelineOutcome run_fixed_k_pipeline(const AnalysisInputs& inputs, const RunConfig& config) {
  config.validate();
  const PreparedData data = build_analysis_data(inputs, config);

  const int k = config.fixed_k;
  const int cap = feasible_k_cap(data.pcvs.size(), inputs.store.dim);
  if (k < 1 || k > cap)
    fail(ErrorKind::Numeric, "K=" + std::to_string(k) + " infeasible; valid range [1, " +
                                 std::to_string(cap) + "]");

  Eigen::MatrixXd X(static_cast<Eigen::Index>(data.pcvs.size()), inputs.store.dim);
  for (std::size_t i = 0; i < data.pcvs.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = data.pcvs[i].vector.transpose();

  const PcaModel model = pca_fit(X, k);
  const Eigen::MatrixXd Xk = project_rows(model, X);
  GradientFit fit = fit_ols(Xk, data.outcomes, model);

  InterpretOptions opts;
  opts.neighbors_per_pole = config.neighbors_per_pole;
  opts.cluster_k_min = config.cluster_k_min;
  opts.cluster_k_max = config.cluster_k_max;
  opts.seed = mix_seed(config.seed, static_cast<std::uint64_t>(k));
  opts.filter = inputs.use_filter ? &inputs.filter : nullptr;
  InterpretabilityReport report = interpret_gradient(fit.gradient_d, inputs.store, opts);

  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const auto path_of = [&](const char* name) { return (fs::path(config.output_dir) / name).string(); };

  const auto clusters =
      detail::cluster_outputs(report, data.pcvs, inputs.records, config.snippet_top_m);
  write_selected_fit_json(k, fit, data.pcvs.size(), config, path_of("selected_fit.json"));
  write_clusters_json(clusters, k, config, path_of("clusters.json"));
  write_clusters_md(clusters, k, config, path_of("clusters.md"));

  PipelineOutcome outcome;
  outcome.k = k;
  outcome.fit = std::move(fit);
  outcome.report = std::move(report);
  outcome.artifacts = {path_of("selected_fit.json"), path_of("clusters.json"),
                       path_of("clusters.md")};
  return outcome;
}

inline PipelineOutcome run_pipeline(const RunConfig& config) {
  AnalysisInputs inputs = load_inputs(config);
  prepare_inputs(inputs, config);
  return config.mode == RunMode::Sweep ? run_sweep_pipeline(inputs, config)
                                       : run_fixed_k_pipeline(inputs, config);
}

// Writes a generated scenario to disk in the formats the loaders consume.
inline std::vector<std::string> run_generate(const PlantedScenario& scenario,
                                             const std::string& output_dir) {
  const SynthData data = generate(scenario);
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  const auto path_of = [&](const char* name) { return (fs::path(output_dir) / name).string(); };
  write_embeddings_file(data.store, path_of("embeddings.txt"));
  write_corpus_file(data.records, path_of("corpus.jsonl"));
  write_truth_file(data.truth, path_of("truth.json"));
  return {path_of("embeddings.txt"), path_of("corpus.jsonl"), path_of("truth.json")};
}

}  // namespace ssd
