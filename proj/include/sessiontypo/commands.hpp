#pragma once

// Subcommand bodies behind the `sessiontypo` executable. Each takes its
// configuration, writes data files, and reports through the given streams.
// Domain failures surface as sessiontypo::Error; the executable turns them
// into a one-line "error: <Code>: <message>" and exit status 1.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sessiontypo/analysis.hpp"
#include "sessiontypo/annotation.hpp"
#include "sessiontypo/corpus.hpp"
#include "sessiontypo/features.hpp"
#include "sessiontypo/io.hpp"
#include "sessiontypo/plot.hpp"
#include "sessiontypo/report.hpp"
#include "sessiontypo/synth.hpp"

namespace sessiontypo::commands {

namespace fs = std::filesystem;

inline constexpr double kKappaFloor = 0.80;

struct RunConfig {
  fs::path scheme;
  fs::path sessions;
  std::vector<fs::path> annotations;
  fs::path features;
  fs::path report;
  fs::path spec;
  fs::path stopwords;
  fs::path out;
  int k = 5;
  std::optional<int> components;  // nullopt: all
  double level = 0.95;
  std::optional<std::uint64_t> seed;
  bool default_archetypes = false;
  std::optional<int> count;
  bool include_autre_in_flags = true;
  int fuzzy_distance = 1;
};

namespace detail {

inline void require(const fs::path& p, const char* flag) {
  if (p.empty()) fail(ErrorCode::InvalidArgument, std::string(flag) + " is required");
}

inline void warn_diagnostics(const std::vector<CorpusDiagnostic>& diags, std::ostream& err) {
  for (const auto& d : diags) err << "warning: " << d.session_id << ": " << d.issue << "\n";
}

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline void cmd_features(const RunConfig& cfg, std::ostream& err) {
  detail::require(cfg.scheme, "--scheme");
  detail::require(cfg.sessions, "--sessions");
  detail::require(cfg.out, "--out");
  if (cfg.annotations.size() != 1) fail(ErrorCode::InvalidArgument, "exactly one --annotations file is required");
  if (!fs::exists(cfg.annotations.front()))
    fail(ErrorCode::MissingAnnotation, "annotation file '" + cfg.annotations.front().string() + "' does not exist");
  const auto scheme = load_scheme(cfg.scheme);
  const auto sessions = load_sessions(cfg.sessions);
  const auto annotations = load_annotations(cfg.annotations.front(), scheme);
  detail::warn_diagnostics(validate_corpus(sessions, scheme), err);
  const auto fm = extract_all(sessions, annotations, scheme, FlagOptions{cfg.include_autre_in_flags});
  save_features(fm, cfg.out);
}

inline nlohmann::ordered_json agreement_to_json(const AgreementReport& report, const AlignedRows& aligned) {
  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["n_items"] = report.n_items;
  doc["unmatched_a"] = aligned.unmatched_a.size();
  doc["unmatched_b"] = aligned.unmatched_b.size();
  doc["floor"] = kKappaFloor;
  doc["per_proposition"] = nlohmann::ordered_json::array();
  for (const auto& la : report.per_proposition)
    doc["per_proposition"].push_back({{"label", la.label},
                                      {"kappa", la.kappa},
                                      {"observed_agreement", la.observed},
                                      {"below_floor", la.kappa < kKappaFloor}});
  return doc;
}

inline AgreementReport cmd_kappa(const RunConfig& cfg, std::ostream& out) {
  detail::require(cfg.scheme, "--scheme");
  if (cfg.annotations.size() != 2) fail(ErrorCode::InvalidArgument, "kappa needs two --annotations files");
  const auto scheme = load_scheme(cfg.scheme);
  const auto a = load_annotations(cfg.annotations[0], scheme);
  const auto b = load_annotations(cfg.annotations[1], scheme);
  const auto aligned = align(a, b);
  const auto report = cohen_kappa(aligned, scheme);

  out << "paired rows: " << report.n_items << " (unmatched: " << aligned.unmatched_a.size() << " / "
      << aligned.unmatched_b.size() << ")\n";
  for (const auto& la : report.per_proposition) {
    out << la.label << "\tkappa=" << detail::fixed(la.kappa, 4) << "\tagreement=" << detail::fixed(la.observed, 4);
    if (la.kappa < kKappaFloor) out << "\t<-- below 0.80";
    out << "\n";
  }
  if (!cfg.out.empty()) io::write_file(cfg.out, agreement_to_json(report, aligned).dump(2) + "\n");
  return report;
}

inline TypologyReport cmd_analyze(const RunConfig& cfg) {
  detail::require(cfg.features, "--features");
  detail::require(cfg.out, "--out");
  const auto fm = load_features(cfg.features);
  auto report = analyze(fm, AnalyzeOptions{cfg.k, cfg.components, cfg.level});
  save_report(report, cfg.out);
  return report;
}

inline void cmd_plot(const RunConfig& cfg, std::ostream& err) {
  detail::require(cfg.report, "--report");
  detail::require(cfg.out, "--out");
  const auto view = load_plane_view(cfg.report);
  for (const auto& ce : view.ellipses)
    if (!ce.ellipse) err << "warning: cluster " << ce.label << " drawn without ellipse (" << ce.note << ")\n";
  io::write_file(cfg.out, render_svg(view));
}

inline SyntheticCorpus cmd_generate(const RunConfig& cfg) {
  detail::require(cfg.scheme, "--scheme");
  detail::require(cfg.out, "--out");
  if (!cfg.seed) fail(ErrorCode::InvalidArgument, "--seed is required");
  const auto scheme = load_scheme(cfg.scheme);
  std::vector<ArchetypeCount> specs;
  if (cfg.default_archetypes == !cfg.spec.empty())
    fail(ErrorCode::InvalidArgument, "give exactly one of --spec or --default-archetypes");
  if (cfg.default_archetypes) {
    for (auto& s : default_archetypes(scheme)) specs.push_back({std::move(s), cfg.count.value_or(14)});
  } else {
    specs = load_archetypes(cfg.spec);
    if (cfg.count)
      for (auto& s : specs) s.count = *cfg.count;
  }
  auto corpus = generate(specs, scheme, *cfg.seed);

  fs::create_directories(cfg.out);
  save_sessions(corpus.sessions, cfg.out / "sessions.jsonl");
  save_annotations(corpus.annotations, scheme, cfg.out / "annotations.csv");
  std::string labels = csv::format_row({"session_id", "label", "archetype"});
  for (std::size_t i = 0; i < corpus.sessions.size(); ++i)
    labels += csv::format_row({corpus.sessions[i].session_id, std::to_string(corpus.planted_labels[i]),
                               corpus.archetype_names[corpus.planted_labels[i] - 1]});
  io::write_file(cfg.out / "labels.csv", labels);
  return corpus;
}

inline std::set<std::string> load_stopwords(const fs::path& path) {
  std::set<std::string> words;
  const auto text = io::read_file(path);
  for (const auto& t : normalize_tokens(text))
    if (t.kind == TokenClass::word) words.insert(t.text);
  return words;
}

inline void cmd_autolabel(const RunConfig& cfg) {
  detail::require(cfg.scheme, "--scheme");
  detail::require(cfg.sessions, "--sessions");
  detail::require(cfg.out, "--out");
  if (cfg.fuzzy_distance < 0) fail(ErrorCode::InvalidArgument, "--fuzzy-distance must be >= 0");
  const auto scheme = load_scheme(cfg.scheme);
  if (!scheme.has_lexicons()) fail(ErrorCode::EmptyLexicons, "scheme '" + scheme.task_id + "' has no lexicons");
  AutolabelOptions options;
  options.fuzzy_distance = cfg.fuzzy_distance;
  options.stopwords = cfg.stopwords.empty() ? default_stopwords() : load_stopwords(cfg.stopwords);
  std::vector<AnnotationMatrix> matrices;
  for (const auto& s : load_sessions(cfg.sessions)) matrices.push_back(autolabel_session(s, scheme, options));
  save_annotations(matrices, scheme, cfg.out);
}

inline nlohmann::ordered_json describe_to_json(const DescriptiveTable& table, std::size_t n) {
  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["n"] = n;
  doc["variables"] = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < table.variables.size(); ++j) {
    const auto& s = table.summaries[j];
    doc["variables"].push_back({{"name", table.variables[j]},
                                {"min", s.min},
                                {"max", s.max},
                                {"mean", s.mean},
                                {"sd", s.sd},
                                {"median", s.median}});
  }
  return doc;
}

/// Min / Max / Moy / E-type / Med rows, one column per variable.
inline std::string format_describe(const DescriptiveTable& table) {
  std::string text = "       ";
  for (const auto& v : table.variables) {
    char cell[32];
    std::snprintf(cell, sizeof(cell), "%15s", v.c_str());
    text += cell;
  }
  text += "\n";
  const std::pair<const char*, double VariableSummary::*> rows[] = {{"Min", &VariableSummary::min},
                                                                     {"Max", &VariableSummary::max},
                                                                     {"Moy", &VariableSummary::mean},
                                                                     {"E-type", &VariableSummary::sd},
                                                                     {"Med", &VariableSummary::median}};
  for (const auto& [name, field] : rows) {
    char head[16];
    std::snprintf(head, sizeof(head), "%-7s", name);
    text += head;
    for (const auto& s : table.summaries) {
      char cell[32];
      std::snprintf(cell, sizeof(cell), "%15.2f", s.*field);
      text += cell;
    }
    text += "\n";
  }
  return text;
}

inline DescriptiveTable cmd_stats(const RunConfig& cfg, std::ostream& out) {
  detail::require(cfg.features, "--features");
  const auto fm = load_features(cfg.features);
  const auto table = describe(fm);
  out << format_describe(table);
  if (!cfg.out.empty()) io::write_file(cfg.out, describe_to_json(table, fm.size()).dump(2) + "\n");
  return table;
}

}  // namespace sessiontypo::commands
