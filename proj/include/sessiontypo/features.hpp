#pragma once

// Session-level behavioural variables.
//
// Four of the eight come from the annotation matrix (coverage, mean
// propositions per query, persistence, intermittence); the other four come
// from the raw session (query count, mean query length, clicks, duration).

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sessiontypo/annotation.hpp"
#include "sessiontypo/corpus.hpp"
#include "sessiontypo/csv.hpp"
#include "sessiontypo/error.hpp"
#include "sessiontypo/text.hpp"

namespace sessiontypo {

inline constexpr std::size_t kVariableCount = 8;
inline constexpr std::array<std::string_view, kVariableCount> kVariableNames = {
    "NbReq", "LongReq", "NbPSession", "PmoyReq", "IntermittenceP", "PersistanceP", "NbClics", "Duree"};

enum Variable : std::size_t {
  NbReq = 0,
  LongReq,
  NbPSession,
  PmoyReq,
  IntermittenceP,
  PersistanceP,
  NbClics,
  Duree,
};

struct FeatureVector {
  std::string session_id;
  std::array<double, kVariableCount> values{};

  double operator[](Variable v) const { return values[v]; }
  double& operator[](Variable v) { return values[v]; }
};

struct FeatureMatrix {
  std::vector<std::string> session_ids;
  std::vector<std::array<double, kVariableCount>> rows;

  std::size_t size() const { return rows.size(); }
  std::vector<double> column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
  }
};

struct FlagOptions {
  bool include_autre_column = true;
};

struct PersistenceRun {
  std::string label;
  std::size_t start_index = 0;
  std::size_t length = 0;

  friend bool operator==(const PersistenceRun&, const PersistenceRun&) = default;
};

struct IntermittenceGap {
  std::string label;
  std::size_t gap_start = 0;
  std::size_t gap_length = 0;

  friend bool operator==(const IntermittenceGap&, const IntermittenceGap&) = default;
};

struct PersistenceResult {
  int flag = 0;
  std::vector<PersistenceRun> runs;
};

struct IntermittenceResult {
  int flag = 0;
  std::vector<IntermittenceGap> gaps;
};

/// Distinct columns (PAutre included) marked at least once.
inline int coverage(const AnnotationMatrix& m) {
  int count = 0;
  for (std::size_t c = 0; c < m.column_count(); ++c) {
    for (const auto& row : m.rows) {
      if (row.marks.at(c)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

/// Mean number of marked columns per row; unmarked rows count as zero.
inline double props_per_query(const AnnotationMatrix& m) {
  if (m.rows.empty()) fail(ErrorCode::EmptyMatrix, "session '" + m.session_id + "' has no annotation rows");
  std::size_t total = 0;
  for (const auto& row : m.rows)
    for (auto v : row.marks) total += v;
  return static_cast<double>(total) / static_cast<double>(m.rows.size());
}

namespace detail {

inline std::size_t considered_columns(const AnnotationMatrix& m, const FlagOptions& options) {
  std::size_t n = m.column_count();
  if (!options.include_autre_column && m.has_autre()) --n;
  return n;
}

}  // namespace detail

/// Every maximal run of >= 2 consecutive marked rows, column by column.
inline PersistenceResult persistence_flag(const AnnotationMatrix& m, const FlagOptions& options = {}) {
  PersistenceResult out;
  const std::size_t rows = m.rows.size();
  for (std::size_t c = 0; c < detail::considered_columns(m, options); ++c) {
    std::size_t i = 0;
    while (i < rows) {
      if (!m.rows[i].marks[c]) {
        ++i;
        continue;
      }
      std::size_t start = i;
      while (i < rows && m.rows[i].marks[c]) ++i;
      if (i - start >= 2) out.runs.push_back({m.labels[c], start, i - start});
    }
  }
  out.flag = out.runs.empty() ? 0 : 1;
  return out;
}

/// Every unmarked stretch bounded by marked rows on both sides.
inline IntermittenceResult intermittence_flag(const AnnotationMatrix& m, const FlagOptions& options = {}) {
  IntermittenceResult out;
  const std::size_t rows = m.rows.size();
  for (std::size_t c = 0; c < detail::considered_columns(m, options); ++c) {
    bool seen = false;
    std::size_t i = 0;
    while (i < rows) {
      if (m.rows[i].marks[c]) {
        seen = true;
        ++i;
        continue;
      }
      std::size_t start = i;
      while (i < rows && !m.rows[i].marks[c]) ++i;
      if (seen && i < rows) out.gaps.push_back({m.labels[c], start, i - start});
    }
  }
  out.flag = out.gaps.empty() ? 0 : 1;
  return out;
}

/// Mean token count over query events; operators count as tokens.
inline double query_length_mean(const Session& session) {
  std::size_t queries = 0, tokens = 0;
  for (const auto& e : session.events) {
    if (e.kind != EventKind::query) continue;
    ++queries;
    tokens += normalize_tokens(e.text).size();
  }
  if (queries == 0) fail(ErrorCode::NoQueries, "session '" + session.session_id + "' has no query events");
  return static_cast<double>(tokens) / static_cast<double>(queries);
}

/// Timestamp of the last event (timestamps are session-relative).
inline double session_duration(const Session& session) {
  if (session.events.empty()) fail(ErrorCode::NoEvents, "session '" + session.session_id + "' has no events");
  return session.events.back().t;
}

inline FeatureVector extract(const Session& session, const AnnotationMatrix& m, const PropositionScheme& scheme,
                             const FlagOptions& options = {}) {
  if (m.session_id != session.session_id)
    fail(ErrorCode::IdMismatch,
         "annotation for '" + m.session_id + "' paired with session '" + session.session_id + "'");
  if (m.labels != scheme.column_labels())
    fail(ErrorCode::ColumnMismatch, "session '" + session.session_id + "': annotation columns differ from the scheme");
  const std::size_t queries = session.query_count();
  if (m.rows.size() != queries)
    fail(ErrorCode::RowCountMismatch, "session '" + session.session_id + "' has " + std::to_string(queries) +
                                          " queries but " + std::to_string(m.rows.size()) + " annotation rows");
  FeatureVector fv;
  fv.session_id = session.session_id;
  fv[NbReq] = static_cast<double>(queries);
  fv[LongReq] = query_length_mean(session);
  fv[NbPSession] = coverage(m);
  fv[PmoyReq] = props_per_query(m);
  fv[IntermittenceP] = intermittence_flag(m, options).flag;
  fv[PersistanceP] = persistence_flag(m, options).flag;
  fv[NbClics] = static_cast<double>(session.click_count());
  fv[Duree] = session_duration(session);
  return fv;
}

/// Rows follow session order; any per-session error aborts the whole call.
inline FeatureMatrix extract_all(const std::vector<Session>& sessions, const std::vector<AnnotationMatrix>& annotations,
                                 const PropositionScheme& scheme, const FlagOptions& options = {}) {
  std::map<std::string, const AnnotationMatrix*> by_id;
  for (const auto& m : annotations) by_id.emplace(m.session_id, &m);
  FeatureMatrix fm;
  for (const auto& s : sessions) {
    auto it = by_id.find(s.session_id);
    if (it == by_id.end()) fail(ErrorCode::MissingAnnotation, "session '" + s.session_id + "' has no annotation");
    auto fv = extract(s, *it->second, scheme, options);
    fm.session_ids.push_back(fv.session_id);
    fm.rows.push_back(fv.values);
  }
  return fm;
}

// --- features.csv ------------------------------------------------------------

inline std::string format_features(const FeatureMatrix& fm) {
  csv::Row header{"session_id"};
  for (auto name : kVariableNames) header.emplace_back(name);
  std::string out = csv::format_row(header);
  for (std::size_t i = 0; i < fm.size(); ++i) {
    csv::Row row{fm.session_ids[i]};
    for (double v : fm.rows[i]) row.push_back(csv::format_real(v));
    out += csv::format_row(row);
  }
  return out;
}

inline void save_features(const FeatureMatrix& fm, const std::filesystem::path& path) {
  io::write_file(path, format_features(fm));
}

inline FeatureMatrix parse_features(std::string_view text) {
  auto table = csv::parse(text);
  if (table.empty()) fail(ErrorCode::ParseError, "feature file is empty");
  csv::Row header{"session_id"};
  for (auto name : kVariableNames) header.emplace_back(name);
  if (table.front() != header) fail(ErrorCode::ParseError, "feature header does not match the expected columns");
  FeatureMatrix fm;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& fields = table[r];
    if (fields.size() != header.size())
      fail(ErrorCode::ParseError, "feature row " + std::to_string(r + 1) + " has the wrong number of fields");
    std::array<double, kVariableCount> values{};
    for (std::size_t j = 0; j < kVariableCount; ++j) {
      try {
        std::size_t used = 0;
        values[j] = std::stod(fields[j + 1], &used);
        if (used != fields[j + 1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, "feature row " + std::to_string(r + 1) + ": '" + fields[j + 1] +
                                        "' is not a number");
      }
      if (!std::isfinite(values[j]))
        fail(ErrorCode::NonFiniteInput, "feature row " + std::to_string(r + 1) + " has a non-finite value");
    }
    fm.session_ids.push_back(fields[0]);
    fm.rows.push_back(values);
  }
  return fm;
}

inline FeatureMatrix load_features(const std::filesystem::path& path) { return parse_features(io::read_file(path)); }

}  // namespace sessiontypo
