#pragma once

// Binary query x proposition annotation matrices, inter-annotator agreement,
// and the lexical baseline annotator.
//
// annotations.csv header:
//   session_id,query_index,query_text,<label per proposition>,PAutre,autre_terms
// PAutre is present only when the scheme enables it; autre_terms is
// semicolon-separated and must be non-empty exactly when PAutre = 1.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sessiontypo/corpus.hpp"
#include "sessiontypo/csv.hpp"
#include "sessiontypo/error.hpp"
#include "sessiontypo/io.hpp"
#include "sessiontypo/text.hpp"

namespace sessiontypo {

struct AnnotationRow {
  std::size_t query_index = 0;
  std::string query_text;
  std::vector<std::uint8_t> marks;
  std::vector<std::string> autre_terms;

  friend bool operator==(const AnnotationRow&, const AnnotationRow&) = default;
};

struct AnnotationMatrix {
  std::string session_id;
  std::string scheme_ref;
  std::vector<std::string> labels;  // column labels, PAutre last when present
  std::vector<AnnotationRow> rows;

  std::size_t column_count() const { return labels.size(); }
  bool has_autre() const { return !labels.empty() && labels.back() == kAutreLabel; }

  friend bool operator==(const AnnotationMatrix&, const AnnotationMatrix&) = default;
};

inline AnnotationMatrix make_matrix(const PropositionScheme& scheme, std::string session_id) {
  return AnnotationMatrix{std::move(session_id), scheme.task_id, scheme.column_labels(), {}};
}

namespace detail {

inline std::vector<std::string> split_terms(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(';', pos);
    if (end == std::string_view::npos) end = s.size();
    auto term = trim(s.substr(pos, end - pos));
    if (!term.empty()) out.push_back(std::move(term));
    pos = end + 1;
  }
  return out;
}

inline std::string join_terms(const std::vector<std::string>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out.push_back(';');
    out += t;
  }
  return out;
}

inline std::vector<std::string> annotation_header(const std::vector<std::string>& labels) {
  std::vector<std::string> header{"session_id", "query_index", "query_text"};
  header.insert(header.end(), labels.begin(), labels.end());
  header.emplace_back("autre_terms");
  return header;
}

inline void check_row(const AnnotationMatrix& m, const AnnotationRow& row) {
  const std::string where = "session '" + m.session_id + "' query " + std::to_string(row.query_index);
  if (row.marks.size() != m.column_count())
    fail(ErrorCode::ColumnMismatch, where + ": mark vector has the wrong length");
  for (auto v : row.marks)
    if (v > 1) fail(ErrorCode::NonBinaryMark, where + ": mark is not 0 or 1");
  bool autre = m.has_autre() && row.marks.back() == 1;
  if (autre && row.autre_terms.empty())
    fail(ErrorCode::MalformedAnnotation, where + ": PAutre = 1 requires autre_terms");
  if (!autre && !row.autre_terms.empty())
    fail(ErrorCode::MalformedAnnotation, where + ": autre_terms given but PAutre = 0");
}

}  // namespace detail

/// Throws on any violated matrix invariant.
inline void validate_matrix(const AnnotationMatrix& m) {
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    if (m.rows[i].query_index != i)
      fail(ErrorCode::GapInIndices, "session '" + m.session_id + "': query indices are not 0..m-1");
    detail::check_row(m, m.rows[i]);
  }
}

inline std::vector<AnnotationMatrix> parse_annotations(std::string_view text, const PropositionScheme& scheme) {
  auto table = csv::parse(text);
  const auto labels = scheme.column_labels();
  const auto header = detail::annotation_header(labels);
  if (table.empty()) fail(ErrorCode::ColumnMismatch, "annotation file has no header row");
  if (table.front() != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    fail(ErrorCode::ColumnMismatch, "annotation header does not match the scheme; expected " + expected);
  }

  std::vector<AnnotationMatrix> matrices;
  std::map<std::string, std::size_t> index_of;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& fields = table[r];
    const std::string where = "annotation row " + std::to_string(r + 1);
    if (fields.size() != header.size())
      fail(ErrorCode::ColumnMismatch, where + ": expected " + std::to_string(header.size()) + " fields");
    AnnotationRow row;
    try {
      std::size_t used = 0;
      long long idx = std::stoll(fields[1], &used);
      if (used != fields[1].size() || idx < 0) throw std::invalid_argument("index");
      row.query_index = static_cast<std::size_t>(idx);
    } catch (const std::exception&) {
      fail(ErrorCode::GapInIndices, where + ": query_index '" + fields[1] + "' is not a non-negative integer");
    }
    row.query_text = fields[2];
    for (std::size_t c = 0; c < labels.size(); ++c) {
      const auto& v = fields[3 + c];
      if (v == "0") {
        row.marks.push_back(0);
      } else if (v == "1") {
        row.marks.push_back(1);
      } else {
        fail(ErrorCode::NonBinaryMark, where + ": column " + labels[c] + " has value '" + v + "'");
      }
    }
    row.autre_terms = detail::split_terms(fields.back());

    auto [it, inserted] = index_of.try_emplace(fields[0], matrices.size());
    if (inserted) matrices.push_back(AnnotationMatrix{fields[0], scheme.task_id, labels, {}});
    matrices[it->second].rows.push_back(std::move(row));
  }

  for (auto& m : matrices) {
    std::stable_sort(m.rows.begin(), m.rows.end(),
                     [](const auto& a, const auto& b) { return a.query_index < b.query_index; });
    validate_matrix(m);
  }
  return matrices;
}

inline std::vector<AnnotationMatrix> load_annotations(const std::filesystem::path& path,
                                                      const PropositionScheme& scheme) {
  return parse_annotations(io::read_file(path), scheme);
}

inline std::string format_annotations(const std::vector<AnnotationMatrix>& matrices,
                                      const PropositionScheme& scheme) {
  const auto labels = scheme.column_labels();
  std::string out = csv::format_row(detail::annotation_header(labels));
  for (const auto& m : matrices) {
    if (m.labels != labels)
      fail(ErrorCode::ColumnMismatch, "session '" + m.session_id + "': matrix columns differ from the scheme");
    validate_matrix(m);
    for (const auto& row : m.rows) {
      csv::Row fields{m.session_id, std::to_string(row.query_index), row.query_text};
      for (auto v : row.marks) fields.push_back(v ? "1" : "0");
      fields.push_back(detail::join_terms(row.autre_terms));
      out += csv::format_row(fields);
    }
  }
  return out;
}

inline void save_annotations(const std::vector<AnnotationMatrix>& matrices, const PropositionScheme& scheme,
                             const std::filesystem::path& path) {
  io::write_file(path, format_annotations(matrices, scheme));
}

// --- agreement -------------------------------------------------------------

struct RowRef {
  std::string session_id;
  std::size_t query_index = 0;
};

struct AlignedRows {
  std::vector<std::string> labels;
  std::vector<std::pair<AnnotationRow, AnnotationRow>> pairs;
  std::vector<RowRef> unmatched_a;
  std::vector<RowRef> unmatched_b;
};

/// Pairs rows on (session_id, query_index). Pair order follows `a`.
inline AlignedRows align(const std::vector<AnnotationMatrix>& a, const std::vector<AnnotationMatrix>& b) {
  using Key = std::pair<std::string, std::size_t>;
  std::map<Key, const AnnotationRow*> b_rows;
  std::vector<std::string> labels;
  for (const auto& m : b) {
    if (labels.empty()) labels = m.labels;
    for (const auto& row : m.rows) b_rows.emplace(Key{m.session_id, row.query_index}, &row);
  }
  AlignedRows out;
  std::set<Key> matched;
  for (const auto& m : a) {
    if (!labels.empty() && m.labels != labels)
      fail(ErrorCode::ColumnMismatch, "annotation sets use different column labels");
    if (out.labels.empty()) out.labels = m.labels;
    for (const auto& row : m.rows) {
      Key key{m.session_id, row.query_index};
      auto it = b_rows.find(key);
      if (it == b_rows.end()) {
        out.unmatched_a.push_back({m.session_id, row.query_index});
      } else {
        out.pairs.emplace_back(row, *it->second);
        matched.insert(key);
      }
    }
  }
  for (const auto& m : b)
    for (const auto& row : m.rows)
      if (!matched.count({m.session_id, row.query_index})) out.unmatched_b.push_back({m.session_id, row.query_index});
  if (out.pairs.empty()) fail(ErrorCode::EmptyIntersection, "the two annotation sets share no (session, query) rows");
  return out;
}

struct LabelAgreement {
  std::string label;
  double kappa = 1.0;
  double observed = 1.0;
};

struct AgreementReport {
  std::vector<LabelAgreement> per_proposition;
  std::size_t n_items = 0;
};

/// Cohen's kappa for two binary rating vectors of equal length.
/// Defined as 1 when expected agreement is 1 (both raters constant and equal).
inline double cohen_kappa_binary(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "rating vectors differ in length");
  if (a.empty()) fail(ErrorCode::NoItems, "no items to compare");
  const double n = static_cast<double>(a.size());
  std::size_t agree = 0, ones_a = 0, ones_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    ones_a += a[i];
    ones_b += b[i];
  }
  const double po = agree / n;
  const double pa1 = ones_a / n, pb1 = ones_b / n;
  const double pe = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

inline AgreementReport cohen_kappa(const AlignedRows& aligned, const PropositionScheme& scheme) {
  if (aligned.pairs.empty()) fail(ErrorCode::NoItems, "no paired rows");
  const auto labels = scheme.column_labels();
  if (aligned.labels != labels) fail(ErrorCode::ColumnMismatch, "aligned rows do not use the scheme's columns");
  AgreementReport report;
  report.n_items = aligned.pairs.size();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::vector<std::uint8_t> col_a, col_b;
    col_a.reserve(aligned.pairs.size());
    col_b.reserve(aligned.pairs.size());
    std::size_t agree = 0;
    for (const auto& [ra, rb] : aligned.pairs) {
      col_a.push_back(ra.marks.at(c));
      col_b.push_back(rb.marks.at(c));
      agree += ra.marks[c] == rb.marks[c];
    }
    report.per_proposition.push_back(
        {labels[c], cohen_kappa_binary(col_a, col_b), static_cast<double>(agree) / aligned.pairs.size()});
  }
  return report;
}

// --- lexical auto-annotation --------------------------------------------------

/// French and English function words that never become Autre terms.
inline std::set<std::string> default_stopwords() {
  return {"a",    "au",   "aux",  "avec", "ce",   "ces",  "d",    "dans", "de",   "des",  "du",
          "en",   "et",   "for",  "l",    "la",   "le",   "les",  "of",   "on",   "par",  "pour",
          "sur",  "the",  "to",   "un",   "une",  "in",   "an",   "is",   "est",  "what", "how",
          "quoi", "quel", "quels", "quelle", "quelles", "comment", "qu", "que", "qui", "vs", "with"};
}

struct AutolabelOptions {
  int fuzzy_distance = 1;
  std::size_t fuzzy_min_length = 5;  // single-word entries shorter than this match exactly only
  std::set<std::string> stopwords = default_stopwords();
};

namespace detail {

inline std::size_t code_point_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) words.emplace_back(s.substr(start, i - start));
  }
  return words;
}

}  // namespace detail

/// Annotates one query. A proposition is marked when one of its lexicon
/// entries matches: single words exactly or within `fuzzy_distance` edits
/// (entries of at least `fuzzy_min_length` characters), phrases as an exact
/// contiguous token run. Remaining non-stopword words become Autre terms.
inline AnnotationRow autolabel(std::string_view query_text, const PropositionScheme& scheme,
                               const AutolabelOptions& options = {}) {
  if (!scheme.has_lexicons()) fail(ErrorCode::EmptyLexicons, "no proposition has a lexicon");
  const auto tokens = normalize_tokens(query_text);
  std::vector<bool> covered(tokens.size(), false);
  AnnotationRow row;
  row.query_text = std::string(query_text);
  row.marks.assign(scheme.column_count(), 0);

  for (std::size_t p = 0; p < scheme.propositions.size(); ++p) {
    for (const auto& entry : scheme.propositions[p].lexicon) {
      const auto words = detail::split_words(entry);
      if (words.empty()) continue;
      if (words.size() == 1) {
        const bool fuzzy = options.fuzzy_distance > 0 &&
                           detail::code_point_length(words[0]) >= options.fuzzy_min_length;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          if (tokens[t].kind != TokenClass::word) continue;
          bool hit = tokens[t].text == words[0] ||
                     (fuzzy && damerau_levenshtein(tokens[t].text, words[0]) <=
                                   static_cast<std::size_t>(options.fuzzy_distance));
          if (hit) {
            row.marks[p] = 1;
            covered[t] = true;
          }
        }
        continue;
      }
      for (std::size_t t = 0; t + words.size() <= tokens.size(); ++t) {
        bool hit = true;
        for (std::size_t w = 0; w < words.size() && hit; ++w)
          hit = tokens[t + w].kind == TokenClass::word && tokens[t + w].text == words[w];
        if (!hit) continue;
        row.marks[p] = 1;
        for (std::size_t w = 0; w < words.size(); ++w) covered[t + w] = true;
      }
    }
  }

  if (scheme.include_autre) {
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (covered[t] || tokens[t].kind != TokenClass::word) continue;
      if (options.stopwords.count(tokens[t].text)) continue;
      if (std::find(row.autre_terms.begin(), row.autre_terms.end(), tokens[t].text) == row.autre_terms.end())
        row.autre_terms.push_back(tokens[t].text);
    }
    if (!row.autre_terms.empty()) row.marks.back() = 1;
  }
  return row;
}

/// One annotation row per query event, in order.
inline AnnotationMatrix autolabel_session(const Session& session, const PropositionScheme& scheme,
                                          const AutolabelOptions& options = {}) {
  AnnotationMatrix m = make_matrix(scheme, session.session_id);
  for (const auto& text : session.query_texts()) {
    auto row = autolabel(text, scheme, options);
    row.query_index = m.rows.size();
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace sessiontypo
