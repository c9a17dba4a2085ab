#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ssd/config.hpp"
#include "ssd/error.hpp"
#include "ssd/sweep.hpp"

namespace ssd {

inline std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

// Render rule for p-values: below the 1e-10 accuracy floor they display as a
// bound rather than a number.
inline std::string format_p(double p) {
  if (p < 1e-10) return "<1e-10";
  return format_float(p);
}

// Resolved analysis configuration embedded in every artifact. Output location
// and worker count are excluded: they must not affect artifact bytes.
inline nlohmann::ordered_json config_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["embeddings"] = config.embeddings_path;
  j["corpus"] = config.corpus_path;
  j["lexicon"] = config.lexicon_path;
  j["exclusion_list"] = config.exclusion_list_path;
  j["outcome"] = config.outcome;
  j["mode"] = config.mode == RunMode::Sweep ? "sweep" : "fixed_k";
  if (config.mode == RunMode::FixedK) j["fixed_k"] = config.fixed_k;
  j["sif_a"] = config.sif.a;
  j["remove_top_components"] = config.sif.remove_top_components;
  j["compose_mode"] =
      config.sif.mode == ComposeMode::WholeDocument ? "whole_document" : "lexicon_window";
  j["window"] = config.sif.window;
  j["k_start"] = config.k_start;
  j["k_stop"] = config.k_stop;
  j["k_step"] = config.k_step;
  j["neighbors_per_pole"] = config.neighbors_per_pole;
  j["cluster_k_min"] = config.cluster_k_min;
  j["cluster_k_max"] = config.cluster_k_max;
  j["auck_radius"] = config.auck_radius;
  j["median_win"] = config.median_win;
  j["snippet_top_m"] = config.snippet_top_m;
  j["seed"] = config.seed;
  j["exclude_first_k"] = config.exclude_first_k;
  j["restrict_neighbors_to_corpus"] = config.restrict_neighbors_to_corpus;
  return j;
}

inline std::string config_comment_line(const RunConfig& config) {
  const nlohmann::ordered_json resolved = config_json(config);
  std::string line = "# config:";
  for (const auto& [key, value] : resolved.items())
    line += " " + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
  return line;
}

namespace detail {

inline std::string csv_field(double value) {
  return std::isnan(value) ? std::string() : format_float(value);
}

inline std::string sanitize_reason(std::string reason) {
  for (char& c : reason)
    if (c == ',' || c == '\n') c = ';';
  return reason;
}

}  // namespace detail

// Per-K diagnostics table. Fixed column set; undefined values render empty.
inline void write_sweep_csv(const std::vector<SweepRecord>& records, const RunConfig& config,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << config_comment_line(config) << '\n';
  out << "k,cum_var,interp_raw,interp_z,interp_auck,delta,delta_smooth,stab_z,stab_auck,joint,"
         "r2_adj,f,p,beta_norm,skipped,reason\n";
  for (const auto& rec : records) {
    out << rec.k << ',' << detail::csv_field(rec.cum_var) << ','
        << detail::csv_field(rec.interp_raw) << ',' << detail::csv_field(rec.interp_z) << ','
        << detail::csv_field(rec.interp_auck) << ','
        << (rec.delta ? format_float(*rec.delta) : std::string()) << ','
        << detail::csv_field(rec.delta_smooth) << ',' << detail::csv_field(rec.stab_z) << ','
        << detail::csv_field(rec.stab_auck) << ',' << detail::csv_field(rec.joint) << ','
        << detail::csv_field(rec.r2_adj) << ',' << detail::csv_field(rec.f_stat) << ','
        << (std::isnan(rec.p_value) ? std::string() : format_p(rec.p_value)) << ','
        << detail::csv_field(rec.beta_norm) << ',' << (rec.skipped ? "true" : "false") << ','
        << detail::sanitize_reason(rec.skip_reason) << '\n';
  }
}

// Regression summary at the reported K.
inline void write_selected_fit_json(int k, const GradientFit& fit, std::size_t n_authors,
                                    const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  nlohmann::ordered_json doc;
  doc["k"] = k;
  doc["r2_adj"] = fit.r2_adj;
  doc["f"] = fit.f_stat;
  doc["p"] = fit.p_value;
  doc["p_display"] = format_p(fit.p_value);
  doc["r"] = fit.r;
  doc["beta_norm"] = fit.beta_norm;
  doc["n"] = n_authors;
  doc["outcome"] = config.outcome;
  doc["config"] = config_json(config);
  out << doc.dump(2) << '\n';
}

struct SnippetOut {
  std::string author_id;
  double cosine = 0.0;
  std::string excerpt;
};

struct ClusterOut {
  std::string pole;
  std::size_t size = 0;
  std::vector<std::pair<std::string, double>> top_words;  // word, cosine to signed gradient
  double coherence = 0.0;
  double alignment = 0.0;
  std::vector<SnippetOut> snippets;
};

inline void write_clusters_json(const std::vector<ClusterOut>& clusters, int k,
                                const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  nlohmann::ordered_json doc;
  doc["outcome"] = config.outcome;
  doc["k"] = k;
  doc["clusters"] = nlohmann::ordered_json::array();
  for (const auto& cluster : clusters) {
    nlohmann::ordered_json c;
    c["pole"] = cluster.pole;
    c["size"] = cluster.size;
    c["top_words"] = nlohmann::ordered_json::array();
    for (const auto& [word, cosine] : cluster.top_words)
      c["top_words"].push_back({{"word", word}, {"cosine", cosine}});
    c["coherence"] = cluster.coherence;
    c["alignment"] = cluster.alignment;
    c["snippets"] = nlohmann::ordered_json::array();
    for (const auto& snippet : cluster.snippets)
      c["snippets"].push_back({{"author_id", snippet.author_id},
                               {"cosine", snippet.cosine},
                               {"excerpt", snippet.excerpt}});
    doc["clusters"].push_back(std::move(c));
  }
  doc["config"] = config_json(config);
  out << doc.dump(2) << '\n';
}

// Human-readable pole summary, one section per pole.
inline void write_clusters_md(const std::vector<ClusterOut>& clusters, int k,
                              const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << "# Pole clusters for outcome `" << config.outcome << "` (K=" << k << ")\n";
  for (const char* pole : {"positive", "negative"}) {
    out << "\n## " << (pole[0] == 'p' ? "Positive" : "Negative") << " pole\n";
    std::size_t index = 0;
    for (const auto& cluster : clusters) {
      if (cluster.pole != pole) continue;
      ++index;
      char line[160];
      std::snprintf(line, sizeof(line),
                    "\n### Cluster %zu (size %zu, coherence %.3f, alignment %.3f)\n", index,
                    cluster.size, cluster.coherence, cluster.alignment);
      out << line;
      out << "Top words:";
      const std::size_t shown = std::min<std::size_t>(cluster.top_words.size(), 12);
      for (std::size_t i = 0; i < shown; ++i) out << (i ? ", " : " ") << cluster.top_words[i].first;
      if (cluster.top_words.size() > shown) out << ", ...";
      out << "\n";
      if (!cluster.snippets.empty()) {
        out << "Snippets:\n";
        for (const auto& snippet : cluster.snippets) {
          std::snprintf(line, sizeof(line), "- %s (cos %.3f): ", snippet.author_id.c_str(),
                        snippet.cosine);
          out << line << '"' << snippet.excerpt << "\"\n";
        }
      }
    }
    if (index == 0) out << "\n(no clusters)\n";
  }
  out << "\n---\n" << config_comment_line(config) << '\n';
}

namespace detail {

struct SvgSeries {
  std::string label;
  std::vector<int> ks;
  std::vector<double> values;
};

inline void svg_panel(std::ostream& out, const SvgSeries& series, int selected_k, double x0,
                      double y0, double width, double height) {
  double lo = series.values.empty() ? 0.0 : series.values[0];
  double hi = lo;
  for (double v : series.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  const int k_min = series.ks.front();
  const int k_max = series.ks.back();
  const auto x_of = [&](double k) {
    return k_max > k_min ? x0 + (k - k_min) / double(k_max - k_min) * width : x0 + width / 2;
  };
  const auto y_of = [&](double v) { return y0 + height - (v - lo) / (hi - lo) * height; };

  char buf[128];
  out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << width << "\" height=\""
      << height << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < series.ks.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x_of(series.ks[i]), y_of(series.values[i]));
    out << buf;
  }
  out << "\"/>\n";
  if (selected_k >= k_min && selected_k <= k_max) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#d62728\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  x_of(selected_k), y0, x_of(selected_k), y0 + height);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" font-family=\"sans-serif\">%s</text>\n",
                x0, y0 - 6.0, series.label.c_str());
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" font-family=\"sans-serif\">K=%d</text>\n",
                x0, y0 + height + 14.0, k_min);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" font-family=\"sans-serif\" "
                "text-anchor=\"end\">K=%d</text>\n",
                x0 + width, y0 + height + 14.0, k_max);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" font-family=\"sans-serif\" "
                "text-anchor=\"end\">%.3g</text>\n",
                x0 - 4.0, y0 + 10.0, hi);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" font-family=\"sans-serif\" "
                "text-anchor=\"end\">%.3g</text>\n",
                x0 - 4.0, y0 + height, lo);
  out << buf;
}

}  // namespace detail

// Diagnostic curves (one panel per series, K on the x axis) with the selected
// K marked. Self-contained SVG, no plotting dependency.
inline void write_curves_svg(const std::vector<SweepRecord>& records, int selected_k,
                             const RunConfig& config, const std::string& path) {
  detail::SvgSeries interp{"detrended interpretability (AUCK)", {}, {}};
  detail::SvgSeries stab{"stability (AUCK)", {}, {}};
  for (const auto& rec : records) {
    if (rec.skipped) continue;
    interp.ks.push_back(rec.k);
    interp.values.push_back(rec.interp_auck);
    stab.ks.push_back(rec.k);
    stab.values.push_back(rec.stab_auck);
  }
  if (interp.ks.empty()) fail(ErrorKind::Numeric, "no evaluated K values to plot");

  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  const double width = 720, panel_h = 200, margin = 56, gap = 56;
  const double total_h = 2 * panel_h + gap + 2 * margin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 2 * margin
      << "\" height=\"" << total_h << "\">\n";
  out << "<!-- " << config_comment_line(config) << " -->\n";
  detail::svg_panel(out, interp, selected_k, margin, margin, width, panel_h);
  detail::svg_panel(out, stab, selected_k, margin, margin + panel_h + gap, width, panel_h);
  out << "</svg>\n";
}

}  // namespace ssd
