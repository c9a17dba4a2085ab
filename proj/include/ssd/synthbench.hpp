#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssd/compose.hpp"
#include "ssd/corpus.hpp"
#include "ssd/embeddings.hpp"
#include "ssd/error.hpp"
#include "ssd/rng.hpp"
#include "ssd/sweep.hpp"

namespace ssd {

// Synthetic corpus scenario with a planted semantic gradient. Authors draw
// token bags from rank-many topic blocks, two pole lexicons, and a common
// "style" block whose direction lies outside the signal subspace and carries
// the dominant variance (the anisotropy that top-component removal strips).
// Outcomes are a linear function of the composed PCVs along the planted
// direction, so the whole composer/regression path is exercised with known
// ground truth.
struct PlantedScenario {
  std::uint64_t seed = 1;
  std::size_t n_authors = 350;
  std::size_t vocab_size = 600;
  Eigen::Index dim = 50;
  int effective_rank = 10;
  double noise_sd = 1.0;
  std::string outcome_name = "score";

  // Token-bag shape. Defaults are sized for desk-scale runs.
  std::size_t min_tokens = 80;
  std::size_t max_tokens = 120;

  // Embedding geometry: structured component scale vs per-coordinate noise.
  // Word noise and filler vectors live in a `noise_rank`-dimensional subspace
  // (plus a tiny isotropic residual), giving the PCV spectrum a realistic
  // deep tail: dimensions past style+rank+noise_rank carry almost no
  // variance, so far-too-large K genuinely degrades the fitted gradient.
  double topic_scale = 1.0;
  double word_noise = 0.12;       // noise norm relative to topic_scale
  double filler_norm = 0.5;       // typical filler word norm
  int noise_rank = 12;            // dimensionality of the shared noise subspace
  double residual_noise = 0.01;   // per-coordinate isotropic residual

  // Author mixing: how strongly latent traits shift block usage, how strongly
  // sentiment drives pole-word usage, and how the style factor varies.
  double topic_response = 0.9;
  double topic_decay = 0.88;   // geometric decay of latent sd across signal dims
  double pole_rate = 0.0;      // pole words can stay corpus-absent, GloVe-style
  double filler_weight = 2.0;  // total mixture mass on filler words
  double style_scale = 2.0;    // style word vector length
  double style_weight = 3.0;   // mean mixture mass on style words
  double style_sd = 0.9;       // lognormal sd of the per-author style factor

  SifConfig sif;  // composition settings shared with the analysis defaults

  void validate() const {
    if (effective_rank < 2) fail(ErrorKind::Config, "effective_rank must be >= 2");
    if (noise_rank < 1) fail(ErrorKind::Config, "noise_rank must be >= 1");
    if (static_cast<Eigen::Index>(effective_rank) + 1 + noise_rank > dim)
      fail(ErrorKind::Config, "effective_rank + style + noise_rank cannot exceed dim");
    if (n_authors < 10) fail(ErrorKind::Config, "n_authors must be >= 10");
    if (min_tokens < 2 || max_tokens < min_tokens)
      fail(ErrorKind::Config, "invalid token count range");
    if (noise_sd < 0.0) fail(ErrorKind::Config, "noise_sd must be nonnegative");
    if (vocab_size < static_cast<std::size_t>(4 * effective_rank + 60))
      fail(ErrorKind::Config, "vocab_size too small for the scenario");
  }
};

struct GroundTruth {
  Eigen::VectorXd planted_direction;  // unit, in the signal subspace
  int effective_rank = 0;
  std::uint64_t seed = 0;
  double noise_sd = 0.0;
  std::vector<std::string> positive_lexemes;
  std::vector<std::string> negative_lexemes;
};

struct SynthData {
  EmbeddingStore store;
  std::vector<AuthorRecord> records;
  GroundTruth truth;
};

namespace detail {

inline std::string alpha_fixed(std::size_t n, int width) {
  std::string s(static_cast<std::size_t>(width), 'a');
  for (int i = width - 1; i >= 0 && n > 0; --i) {
    s[static_cast<std::size_t>(i)] = static_cast<char>('a' + n % 26);
    n /= 26;
  }
  return s;
}

inline Eigen::VectorXd noise_vector(Rng& rng, Eigen::Index dim, double per_coord_sd) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = per_coord_sd * rng.normal();
  return v;
}

}  // namespace detail

// Deterministic generation of (embedding store, author records, ground truth)
// for a planted scenario. The analysis path receives only the store and the
// records; the truth struct is for test harnesses.
inline SynthData generate(const PlantedScenario& scenario) {
  scenario.validate();
  Rng rng(scenario.seed);

  const Eigen::Index d = scenario.dim;
  const int rank = scenario.effective_rank;
  const int n_rank = scenario.noise_rank;

  // One QR yields the orthonormal signal basis, the style direction, and the
  // shared noise subspace.
  const int total_cols = rank + 1 + n_rank;
  Eigen::MatrixXd gaussian(d, total_cols);
  for (Eigen::Index i = 0; i < d; ++i)
    for (int j = 0; j < total_cols; ++j) gaussian(i, j) = rng.normal();
  const Eigen::MatrixXd orth =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ() *
      Eigen::MatrixXd::Identity(d, total_cols);
  const Eigen::MatrixXd basis = orth.leftCols(rank);
  const Eigen::VectorXd style_dir = orth.col(rank);
  const Eigen::MatrixXd noise_basis = orth.rightCols(n_rank);

  // Planted direction inside the signal subspace.
  Eigen::VectorXd w(rank);
  for (int j = 0; j < rank; ++j) w(j) = rng.normal();
  w.normalize();
  const Eigen::VectorXd planted = basis * w;

  // Vocabulary blocks: two pole lexicons, a style block, `rank` topic blocks,
  // filler.
  const std::size_t per_pole = std::max<std::size_t>(20, scenario.vocab_size / 10);
  const std::size_t per_style = per_pole;
  const std::size_t per_topic = std::max<std::size_t>(
      5, (scenario.vocab_size - 3 * per_pole) / (2 * static_cast<std::size_t>(rank)));
  const std::size_t structured = 3 * per_pole + per_topic * static_cast<std::size_t>(rank);
  if (structured >= scenario.vocab_size)
    fail(ErrorKind::Config, "vocab_size too small for the scenario block layout");
  const std::size_t filler = scenario.vocab_size - structured;

  const double subspace_sd =
      scenario.word_noise * scenario.topic_scale / std::sqrt(static_cast<double>(n_rank));
  const auto word_jitter = [&](double norm_scale) {
    Eigen::VectorXd sub(n_rank);
    for (int j = 0; j < n_rank; ++j) sub(j) = norm_scale * subspace_sd * rng.normal();
    return (noise_basis * sub + detail::noise_vector(rng, d, scenario.residual_noise)).eval();
  };

  EmbeddingStore store;
  store.dim = d;
  store.table.resize(static_cast<Eigen::Index>(scenario.vocab_size), d);
  GroundTruth truth;

  struct Block {
    std::size_t first = 0;
    std::size_t count = 0;
  };
  std::vector<Block> topic_blocks(static_cast<std::size_t>(rank));
  Block pos_block, neg_block, style_block, filler_block;

  const auto add_word = [&](std::string name, const Eigen::VectorXd& vec) {
    const Eigen::Index row = static_cast<Eigen::Index>(store.vocab.size());
    store.index.emplace(name, row);
    store.table.row(row) = vec.transpose();
    store.vocab.push_back(std::move(name));
  };

  pos_block.first = store.vocab.size();
  pos_block.count = per_pole;
  for (std::size_t i = 0; i < per_pole; ++i) {
    std::string name = "pos" + detail::alpha_fixed(i, 3);
    truth.positive_lexemes.push_back(name);
    add_word(std::move(name), scenario.topic_scale * planted + word_jitter(1.0));
  }
  neg_block.first = store.vocab.size();
  neg_block.count = per_pole;
  for (std::size_t i = 0; i < per_pole; ++i) {
    std::string name = "neg" + detail::alpha_fixed(i, 3);
    truth.negative_lexemes.push_back(name);
    add_word(std::move(name), -scenario.topic_scale * planted + word_jitter(1.0));
  }
  style_block.first = store.vocab.size();
  style_block.count = per_style;
  for (std::size_t i = 0; i < per_style; ++i)
    add_word("sty" + detail::alpha_fixed(i, 3),
             scenario.style_scale * style_dir + word_jitter(1.0));
  for (int j = 0; j < rank; ++j) {
    topic_blocks[static_cast<std::size_t>(j)].first = store.vocab.size();
    topic_blocks[static_cast<std::size_t>(j)].count = per_topic;
    for (std::size_t i = 0; i < per_topic; ++i)
      add_word("top" + detail::alpha_fixed(static_cast<std::size_t>(j), 2) + detail::alpha_fixed(i, 3),
               scenario.topic_scale * basis.col(j) + word_jitter(1.0));
  }
  filler_block.first = store.vocab.size();
  filler_block.count = filler;
  for (std::size_t i = 0; i < filler; ++i)
    add_word("wrd" + detail::alpha_fixed(i, 3),
             word_jitter(scenario.filler_norm / (scenario.word_noise * scenario.topic_scale)));
  store.finalize_norms();

  // Author latent traits and token bags. Latent sds decay geometrically so
  // the PCV spectrum tapers like real embedding data instead of a cliff.
  Eigen::VectorXd latent_sd(rank);
  for (int j = 0; j < rank; ++j) latent_sd(j) = std::pow(scenario.topic_decay, j);

  std::vector<double> sentiments(scenario.n_authors);
  std::vector<std::vector<std::string>> bags(scenario.n_authors);
  for (std::size_t a = 0; a < scenario.n_authors; ++a) {
    Eigen::VectorXd z(rank);
    for (int j = 0; j < rank; ++j) z(j) = latent_sd(j) * rng.normal();
    sentiments[a] = w.dot(z);
    // lognormal style factor: strictly positive, mean 1
    const double style_factor =
        std::exp(scenario.style_sd * rng.normal() - 0.5 * scenario.style_sd * scenario.style_sd);

    std::vector<double> weights;
    std::vector<const Block*> blocks;
    blocks.push_back(&filler_block);
    weights.push_back(scenario.filler_weight);
    blocks.push_back(&style_block);
    weights.push_back(scenario.style_weight * style_factor);
    for (int j = 0; j < rank; ++j) {
      blocks.push_back(&topic_blocks[static_cast<std::size_t>(j)]);
      weights.push_back(std::max(0.05, 1.0 + scenario.topic_response * z(j)));
    }
    blocks.push_back(&pos_block);
    weights.push_back(scenario.pole_rate * std::max(0.0, sentiments[a]));
    blocks.push_back(&neg_block);
    weights.push_back(scenario.pole_rate * std::max(0.0, -sentiments[a]));

    double total = 0.0;
    for (double weight : weights) total += weight;

    const std::size_t count = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(scenario.min_tokens),
                        static_cast<std::int64_t>(scenario.max_tokens)));
    auto& bag = bags[a];
    bag.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
      double target = rng.uniform() * total;
      std::size_t pick = weights.size() - 1;
      for (std::size_t b = 0; b < weights.size(); ++b) {
        target -= weights[b];
        if (target <= 0.0) {
          pick = b;
          break;
        }
      }
      const Block& block = *blocks[pick];
      bag.push_back(store.vocab[block.first + rng.index(block.count)]);
    }
  }

  // Records: one row per author, occasionally two to exercise row grouping.
  std::vector<AuthorRecord> records(scenario.n_authors);
  for (std::size_t a = 0; a < scenario.n_authors; ++a) {
    AuthorRecord& rec = records[a];
    rec.author_id = "p" + detail::alpha_fixed(a, 4);
    const auto& bag = bags[a];
    std::string text;
    if (a % 7 == 3 && bag.size() >= 4) {
      const std::size_t half = bag.size() / 2;
      for (std::size_t t = 0; t < half; ++t) {
        if (t) text += ' ';
        text += bag[t];
      }
      rec.texts.push_back(text);
      text.clear();
      for (std::size_t t = half; t < bag.size(); ++t) {
        if (t > half) text += ' ';
        text += bag[t];
      }
      rec.texts.push_back(text);
    } else {
      for (std::size_t t = 0; t < bag.size(); ++t) {
        if (t) text += ' ';
        text += bag[t];
      }
      rec.texts.push_back(text);
    }
    rec.outcomes[scenario.outcome_name] = 0.0;  // filled below
  }

  // Outcomes ride on the PCVs exactly as the analysis will compose them.
  EmbeddingStore composing = store;
  composing.frequencies = corpus_frequencies(records);
  const PcvBuildResult built = build_pcvs(records, composing, scenario.sif);
  if (built.pcvs.size() != scenario.n_authors)
    fail(ErrorKind::Numeric, "synthetic generation dropped authors unexpectedly");

  std::vector<double> signal(scenario.n_authors);
  double mean = 0.0;
  for (std::size_t a = 0; a < scenario.n_authors; ++a) {
    signal[a] = built.pcvs[a].vector.dot(planted);
    mean += signal[a];
  }
  mean /= static_cast<double>(scenario.n_authors);
  double var = 0.0;
  for (double s : signal) var += (s - mean) * (s - mean);
  var /= static_cast<double>(scenario.n_authors - 1);
  if (!(var > 0.0)) fail(ErrorKind::Numeric, "degenerate planted signal");
  const double sd = std::sqrt(var);

  for (std::size_t a = 0; a < scenario.n_authors; ++a)
    records[a].outcomes[scenario.outcome_name] =
        (signal[a] - mean) / sd + scenario.noise_sd * rng.normal();

  truth.planted_direction = planted;
  truth.effective_rank = rank;
  truth.seed = scenario.seed;
  truth.noise_sd = scenario.noise_sd;

  SynthData data;
  data.store = std::move(store);
  data.records = std::move(records);
  data.truth = std::move(truth);
  return data;
}

// |cos| between the sweep-selected gradient and the planted direction.
inline double recovery_cosine(const SweepResult& result, const GroundTruth& truth) {
  const Eigen::VectorXd& g = result.selected_fit.gradient_d;
  const double denom = g.norm() * truth.planted_direction.norm();
  if (denom <= 0.0) return 0.0;
  return std::abs(g.dot(truth.planted_direction) / denom);
}

// --- file emission (same formats the loaders consume) ---

inline void write_embeddings_file(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write embedding file '" + path + "'");
  char buf[64];
  for (Eigen::Index i = 0; i < store.size(); ++i) {
    out << store.vocab[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < store.dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", store.table(i, j));
      out << ' ' << buf;
    }
    out << '\n';
  }
}

inline void write_corpus_file(const std::vector<AuthorRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write corpus file '" + path + "'");
  for (const auto& rec : records) {
    for (const auto& text : rec.texts) {
      nlohmann::ordered_json row;
      row["author_id"] = rec.author_id;
      row["text"] = text;
      for (const auto& [name, value] : std::map<std::string, double>(rec.outcomes.begin(),
                                                                     rec.outcomes.end()))
        row[name] = value;
      out << row.dump() << '\n';
    }
  }
}

inline void write_truth_file(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write truth file '" + path + "'");
  nlohmann::ordered_json doc;
  doc["seed"] = truth.seed;
  doc["effective_rank"] = truth.effective_rank;
  doc["noise_sd"] = truth.noise_sd;
  doc["planted_direction"] = std::vector<double>(
      truth.planted_direction.data(), truth.planted_direction.data() + truth.planted_direction.size());
  doc["positive_lexemes"] = truth.positive_lexemes;
  doc["negative_lexemes"] = truth.negative_lexemes;
  out << doc.dump(2) << '\n';
}

}  // namespace ssd
