#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssd/error.hpp"

namespace ssd {

// Immutable-after-load vocabulary of word vectors, one row per word.
// Safe for shared read-only access from many workers.
struct EmbeddingStore {
  Eigen::Index dim = 0;
  std::vector<std::string> vocab;          // insertion order, unique
  Eigen::MatrixXd table;                   // |vocab| x dim
  Eigen::VectorXd norms;                   // cached row L2 norms
  std::unordered_map<std::string, Eigen::Index> index;
  std::size_t duplicate_count = 0;         // rows dropped by first-wins rule

  // Optional relative word frequencies for SIF weighting; words absent from
  // the map behave as frequency 0 (full weight).
  std::unordered_map<std::string, double> frequencies;

  Eigen::Index size() const { return static_cast<Eigen::Index>(vocab.size()); }

  std::optional<Eigen::Index> find(std::string_view word) const {
    auto it = index.find(std::string(word));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  Eigen::VectorXd vector_of(std::string_view word) const {
    auto idx = find(word);
    if (!idx) fail(ErrorKind::Data, "word not in embedding vocabulary: '" + std::string(word) + "'");
    return table.row(*idx).transpose();
  }

  double frequency(std::string_view word) const {
    auto it = frequencies.find(std::string(word));
    return it == frequencies.end() ? 0.0 : it->second;
  }

  void finalize_norms() {
    norms = table.rowwise().norm();
  }
};

namespace detail {

inline bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

inline bool parse_positive_int(std::string_view field, long& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && out > 0;
}

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

}  // namespace detail

// Loads a GloVe-style text embedding file: one `word f1 ... fD` per line.
// An optional `N D` header line is auto-detected and skipped. Duplicate words
// keep the first occurrence; the dropped-row count is recorded on the store.
inline EmbeddingStore load_embeddings(const std::string& path,
                                      std::optional<Eigen::Index> expected_dim = std::nullopt) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open embedding file '" + path + "'");

  std::vector<std::string> vocab;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, Eigen::Index> index;
  std::size_t duplicates = 0;

  std::string line;
  std::size_t line_no = 0;
  Eigen::Index dim = -1;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++line_no;
    auto fields = detail::split_whitespace(line);
    if (fields.empty()) continue;

    if (first_content_line && fields.size() == 2) {
      long n = 0;
      if (detail::parse_positive_int(fields[0], n)) {
        first_content_line = false;
        continue;  // word2vec-style count header
      }
    }
    first_content_line = false;

    if (fields.size() < 2)
      fail(ErrorKind::Data, "embedding file '" + path + "' line " + std::to_string(line_no) +
                                ": expected a word followed by vector entries");

    const Eigen::Index row_dim = static_cast<Eigen::Index>(fields.size()) - 1;
    if (dim < 0) {
      dim = row_dim;
    } else if (row_dim != dim) {
      fail(ErrorKind::Data, "embedding file '" + path + "' line " + std::to_string(line_no) +
                                ": " + std::to_string(row_dim) + " entries, expected " +
                                std::to_string(dim));
    }

    std::string word(fields[0]);
    std::vector<double> values(static_cast<std::size_t>(row_dim));
    for (Eigen::Index j = 0; j < row_dim; ++j) {
      if (!detail::parse_double(fields[static_cast<std::size_t>(j) + 1], values[static_cast<std::size_t>(j)]))
        fail(ErrorKind::Data, "embedding file '" + path + "' line " + std::to_string(line_no) +
                                  ": entry " + std::to_string(j + 1) + " is not a finite number");
    }

    if (index.contains(word)) {
      ++duplicates;  // first occurrence wins
      continue;
    }
    index.emplace(word, static_cast<Eigen::Index>(vocab.size()));
    vocab.push_back(std::move(word));
    rows.push_back(std::move(values));
  }

  if (vocab.empty()) fail(ErrorKind::Data, "embedding file '" + path + "' contains no vectors");
  if (expected_dim && dim != *expected_dim)
    fail(ErrorKind::Data, "embedding file '" + path + "' has dimension " + std::to_string(dim) +
                              ", expected " + std::to_string(*expected_dim));

  EmbeddingStore store;
  store.dim = dim;
  store.vocab = std::move(vocab);
  store.index = std::move(index);
  store.duplicate_count = duplicates;
  store.table.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      store.table(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  store.finalize_norms();
  return store;
}

}  // namespace ssd
