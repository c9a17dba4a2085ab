#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <optional>
#include <string>
#include <vector>

#include "ssd/corpus.hpp"
#include "ssd/embeddings.hpp"
#include "ssd/error.hpp"

namespace ssd {

enum class ComposeMode { WholeDocument, LexiconWindow };

// SIF composition settings. `a` is the smooth-inverse-frequency constant,
// `remove_top_components` the number of leading principal directions stripped
// from the composed vectors, `window` the half-width used around lexicon hits.
struct SifConfig {
  double a = 1e-3;
  int remove_top_components = 1;
  ComposeMode mode = ComposeMode::WholeDocument;
  int window = 5;

  void validate() const {
    if (!(a > 0.0)) fail(ErrorKind::Config, "SIF constant a must be positive");
    if (remove_top_components < 0)
      fail(ErrorKind::Config, "remove_top_components must be nonnegative");
    if (mode == ComposeMode::LexiconWindow && window < 1)
      fail(ErrorKind::Config, "lexicon window must be >= 1");
  }
};

// One author's composed concept vector.
struct Pcv {
  std::string author_id;
  Eigen::VectorXd vector;
  std::size_t token_count = 0;  // in-vocabulary token occurrences used
};

// SIF weight a / (a + p_w); strictly decreasing in the word frequency.
inline double sif_weight(double p_w, double a) {
  if (!(a > 0.0)) fail(ErrorKind::Config, "SIF constant a must be positive");
  if (p_w < 0.0 || p_w > 1.0)
    fail(ErrorKind::Data, "word frequency out of [0,1]: " + std::to_string(p_w));
  return a / (a + p_w);
}

// SIF-weighted average of the in-vocabulary token vectors, divided by the
// in-vocabulary occurrence count. Out-of-vocabulary tokens are skipped.
inline Eigen::VectorXd compose_raw(const std::vector<std::string>& tokens,
                                   const EmbeddingStore& store, const SifConfig& cfg,
                                   std::size_t* used_count = nullptr) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(store.dim);
  std::size_t count = 0;
  for (const auto& token : tokens) {
    auto idx = store.find(token);
    if (!idx) continue;
    sum += sif_weight(store.frequency(token), cfg.a) * store.table.row(*idx).transpose();
    ++count;
  }
  if (count == 0)
    fail(ErrorKind::Data, "no in-vocabulary tokens to compose");
  if (used_count) *used_count = count;
  return sum / static_cast<double>(count);
}

// Collects, in document order, the tokens within +-window positions of each
// lexicon-term occurrence, excluding the occurrence itself. Tokens covered by
// several windows appear once per covering window.
inline std::vector<std::string> extract_lexicon_contexts(const std::vector<std::string>& tokens,
                                                         const Lexicon& lexicon, int window) {
  if (lexicon.empty()) fail(ErrorKind::Config, "lexicon mode requires a nonempty lexicon");
  if (window < 1) fail(ErrorKind::Config, "lexicon window must be >= 1");

  std::vector<std::string> contexts;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tokens.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!lexicon.contains(tokens[static_cast<std::size_t>(i)])) continue;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      contexts.push_back(tokens[static_cast<std::size_t>(j)]);
    }
  }
  return contexts;
}

// All-but-the-top: computes the top-m principal directions of the mean-
// centered row set and strips their projections from the *uncentered* rows.
// m = 0 is the identity.
inline Eigen::MatrixXd remove_top_components(const Eigen::MatrixXd& X, int m) {
  if (m == 0) return X;
  if (m < 0) fail(ErrorKind::Config, "component count must be nonnegative");
  if (X.rows() < 2)
    fail(ErrorKind::Numeric, "need at least 2 rows to estimate principal directions");

  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mean;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);

  const double tol = 1e-12 * std::max(svd.singularValues()(0), 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  if (m >= rank)
    fail(ErrorKind::Numeric, "cannot remove " + std::to_string(m) +
                                 " components from data of centered rank " + std::to_string(rank));

  const Eigen::MatrixXd top = svd.matrixV().leftCols(m);  // D x m directions
  return X - (X * top) * top.transpose();
}

struct PcvBuildResult {
  std::vector<Pcv> pcvs;
  std::vector<std::string> dropped_authors;  // no embeddable content
};

// Composes one PCV per author (whole-document or lexicon-window token bags),
// then applies all-but-the-top across the full PCV set. Authors with no
// usable tokens are dropped and reported, not zero-imputed.
inline PcvBuildResult build_pcvs(const std::vector<AuthorRecord>& records,
                                 const EmbeddingStore& store, const SifConfig& cfg,
                                 const Lexicon* lexicon = nullptr,
                                 const Tokenizer& tok = default_tokenizer()) {
  cfg.validate();
  if (records.empty()) fail(ErrorKind::Data, "no author records");
  if (cfg.mode == ComposeMode::LexiconWindow && (lexicon == nullptr || lexicon->empty()))
    fail(ErrorKind::Config, "lexicon mode requires a nonempty lexicon");

  PcvBuildResult result;
  for (const auto& rec : records) {
    std::vector<std::string> tokens;
    for (const auto& text : rec.texts) {
      auto text_tokens = tok(text);
      tokens.insert(tokens.end(), text_tokens.begin(), text_tokens.end());
    }
    if (cfg.mode == ComposeMode::LexiconWindow)
      tokens = extract_lexicon_contexts(tokens, *lexicon, cfg.window);

    std::size_t used = 0;
    bool has_content = false;
    Eigen::VectorXd composed;
    if (!tokens.empty()) {
      try {
        composed = compose_raw(tokens, store, cfg, &used);
        has_content = true;
      } catch (const Error&) {
        has_content = false;  // all tokens out of vocabulary
      }
    }
    if (!has_content) {
      result.dropped_authors.push_back(rec.author_id);
      continue;
    }
    result.pcvs.push_back(Pcv{rec.author_id, std::move(composed), used});
  }

  if (result.pcvs.size() < 3)
    fail(ErrorKind::Numeric, "only " + std::to_string(result.pcvs.size()) +
                                 " authors have usable content; need at least 3");

  if (cfg.remove_top_components > 0) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(result.pcvs.size()), store.dim);
    for (std::size_t i = 0; i < result.pcvs.size(); ++i)
      X.row(static_cast<Eigen::Index>(i)) = result.pcvs[i].vector.transpose();
    const Eigen::MatrixXd cleaned = remove_top_components(X, cfg.remove_top_components);
    for (std::size_t i = 0; i < result.pcvs.size(); ++i)
      result.pcvs[i].vector = cleaned.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return result;
}

}  // namespace ssd
