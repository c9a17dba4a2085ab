// Command-line front end: `sweep` runs the full K-selection pipeline,
// `fixed-k` runs SSD at one dimensionality, `generate` emits a synthetic
// planted-gradient corpus.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "ssd/ssd.hpp"

namespace {

void add_common_analysis_flags(CLI::App* cmd, ssd::RunConfig& config) {
  cmd->add_option("--embeddings", config.embeddings_path, "embedding file (GloVe text format)")
      ->required();
  cmd->add_option("--corpus", config.corpus_path, "corpus file (JSON lines)")->required();
  cmd->add_option("--outcome", config.outcome, "outcome field name")->required();
  cmd->add_option("--out", config.output_dir, "output directory")->required();
  cmd->add_option("--lexicon", config.lexicon_path,
                  "lexicon file; switches composition to lexicon-window mode");
  cmd->add_option("--exclude-words", config.exclusion_list_path,
                  "file of words excluded from neighbor retrieval");
  cmd->add_option("--sif-a", config.sif.a, "SIF smoothing constant");
  cmd->add_option("--remove-top", config.sif.remove_top_components,
                  "number of top components removed from composed vectors");
  cmd->add_option("--window", config.sif.window, "half-width of the lexicon context window");
  cmd->add_option("--neighbors", config.neighbors_per_pole, "neighbors retrieved per pole");
  cmd->add_option("--cluster-k-min", config.cluster_k_min, "minimum cluster count");
  cmd->add_option("--cluster-k-max", config.cluster_k_max, "maximum cluster count");
  cmd->add_option("--snippets", config.snippet_top_m, "snippets reported per cluster");
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--threads", config.threads, "worker threads for per-K evaluation");
  cmd->add_flag("--corpus-vocab-only", config.restrict_neighbors_to_corpus,
                "restrict neighbor retrieval to words present in the corpus");
  cmd->set_config("--config", "", "flat key=value configuration file (flags win)");
}

int dispatch(const ssd::RunConfig& config) {
  const auto outcome = ssd::run_pipeline(config);
  std::printf("k=%d r2_adj=%.6g p=%s artifacts=%zu\n", outcome.k, outcome.fit.r2_adj,
              ssd::format_p(outcome.fit.p_value).c_str(), outcome.artifacts.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised semantic differential with PCA-sweep K selection"};
  app.require_subcommand(1);

  ssd::RunConfig config;
  ssd::PlantedScenario scenario;
  std::string generate_out = ".";

  auto* sweep = app.add_subcommand("sweep", "run SSD across a K grid and select K");
  add_common_analysis_flags(sweep, config);
  sweep->add_option("--k-start", config.k_start, "first K in the grid");
  sweep->add_option("--k-stop", config.k_stop, "last K in the grid");
  sweep->add_option("--k-step", config.k_step, "grid step");
  sweep->add_option("--auck-radius", config.auck_radius, "AUCK neighborhood radius");
  sweep->add_option("--median-win", config.median_win, "median smoothing window (odd)");
  sweep->add_flag("--exclude-first-k", config.exclude_first_k,
                  "exclude the first grid point from selection");

  auto* fixed = app.add_subcommand("fixed-k", "run SSD at one dimensionality");
  add_common_analysis_flags(fixed, config);
  fixed->add_option("--k", config.fixed_k, "PCA dimensionality")->required();

  auto* gen = app.add_subcommand("generate", "write a synthetic planted-gradient corpus");
  gen->add_option("--out", generate_out, "output directory")->required();
  gen->add_option("--seed", scenario.seed, "random seed");
  gen->add_option("--authors", scenario.n_authors, "number of authors");
  gen->add_option("--vocab", scenario.vocab_size, "vocabulary size");
  gen->add_option("--dim", scenario.dim, "embedding dimensionality");
  gen->add_option("--rank", scenario.effective_rank, "planted signal subspace size");
  gen->add_option("--noise-sd", scenario.noise_sd, "outcome noise standard deviation");
  gen->add_option("--outcome", scenario.outcome_name, "outcome field name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    std::fprintf(stderr, "error kind=config code=2 msg=\"%s\"\n", e.what());
    return 2;
  }

  try {
    if (gen->parsed()) {
      const auto files = ssd::run_generate(scenario, generate_out);
      std::printf("generated %zu files in %s\n", files.size(), generate_out.c_str());
      return 0;
    }
    config.mode = fixed->parsed() ? ssd::RunMode::FixedK : ssd::RunMode::Sweep;
    if (!config.lexicon_path.empty()) config.sif.mode = ssd::ComposeMode::LexiconWindow;
    return dispatch(config);
  } catch (const ssd::Error& e) {
    std::fprintf(stderr, "error kind=%s code=%d msg=\"%s\"\n", ssd::error_kind_name(e.kind()),
                 e.exit_code(), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error kind=internal code=1 msg=\"%s\"\n", e.what());
    return 1;
  }
}
