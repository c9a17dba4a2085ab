#pragma once

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ssd/error.hpp"
#include "ssd/text.hpp"

namespace ssd {

// One author's texts plus their outcome scores, grouped from corpus rows.
struct AuthorRecord {
  std::string author_id;
  std::vector<std::string> texts;
  std::unordered_map<std::string, double> outcomes;

  double outcome(const std::string& name) const {
    auto it = outcomes.find(name);
    if (it == outcomes.end())
      fail(ErrorKind::Data, "author '" + author_id + "' has no outcome '" + name + "'");
    return it->second;
  }
};

// Set of lowercase single-token terms denoting the target concept.
struct Lexicon {
  std::set<std::string> terms;

  bool contains(const std::string& token) const { return terms.count(token) > 0; }
  bool empty() const { return terms.empty(); }
};

// Loads a JSON-lines corpus: every line an object with string `author_id`,
// string `text`, and one numeric field per requested outcome. Rows sharing an
// author_id are grouped (texts appended, outcomes required to agree exactly);
// first-appearance order is preserved.
inline std::vector<AuthorRecord> load_corpus(const std::string& path,
                                             const std::vector<std::string>& outcome_names) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open corpus file '" + path + "'");

  std::vector<AuthorRecord> records;
  std::unordered_map<std::string, std::size_t> by_id;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Data,
           "corpus file '" + path + "' line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!row.is_object() || !row.contains("author_id") || !row["author_id"].is_string() ||
        !row.contains("text") || !row["text"].is_string())
      fail(ErrorKind::Data, "corpus file '" + path + "' line " + std::to_string(line_no) +
                                ": expected object with string author_id and text");

    const std::string author_id = row["author_id"].get<std::string>();
    std::unordered_map<std::string, double> outcomes;
    for (const auto& name : outcome_names) {
      if (!row.contains(name) || !row[name].is_number())
        fail(ErrorKind::Data, "corpus file '" + path + "' line " + std::to_string(line_no) +
                                  ": record for author '" + author_id +
                                  "' is missing numeric outcome '" + name + "'");
      const double value = row[name].get<double>();
      if (!std::isfinite(value))
        fail(ErrorKind::Data, "corpus file '" + path + "' line " + std::to_string(line_no) +
                                  ": outcome '" + name + "' is not finite");
      outcomes[name] = value;
    }

    auto it = by_id.find(author_id);
    if (it == by_id.end()) {
      by_id.emplace(author_id, records.size());
      AuthorRecord rec;
      rec.author_id = author_id;
      rec.texts.push_back(row["text"].get<std::string>());
      rec.outcomes = std::move(outcomes);
      records.push_back(std::move(rec));
    } else {
      AuthorRecord& rec = records[it->second];
      for (const auto& name : outcome_names) {
        if (rec.outcomes.at(name) != outcomes.at(name))
          fail(ErrorKind::Data, "corpus file '" + path + "' line " + std::to_string(line_no) +
                                    ": author '" + author_id + "' has conflicting values for '" +
                                    name + "'");
      }
      rec.texts.push_back(row["text"].get<std::string>());
    }
  }

  return records;
}

// Loads a lexicon file: one term per line, `#` comments and blank lines
// ignored. Terms are normalized through the tokenizer and must be single
// tokens afterwards.
inline Lexicon load_lexicon(const std::string& path, const Tokenizer& tok = default_tokenizer()) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open lexicon file '" + path + "'");

  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto tokens = tok(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 1)
      fail(ErrorKind::Data, "lexicon file '" + path + "' line " + std::to_string(line_no) +
                                ": '" + line + "' is not a single token");
    lexicon.terms.insert(tokens[0]);
  }
  return lexicon;
}

// Relative token frequencies over the whole corpus (counts / total tokens).
// This is the default SIF frequency source; an embedding-side table can be
// attached to the store instead.
inline std::unordered_map<std::string, double> corpus_frequencies(
    const std::vector<AuthorRecord>& records, const Tokenizer& tok = default_tokenizer()) {
  std::unordered_map<std::string, double> counts;
  double total = 0.0;
  for (const auto& rec : records) {
    for (const auto& text : rec.texts) {
      for (auto& token : tok(text)) {
        counts[token] += 1.0;
        total += 1.0;
      }
    }
  }
  if (total > 0.0)
    for (auto& [word, count] : counts) count /= total;
  return counts;
}

}  // namespace ssd
