#pragma once

// Seeded synthetic sessions and annotations drawn from archetype specs.
//
// Uniforms are drawn from std::mt19937_64 by hand, no std::*_distribution.
//
// Mark layouts per flag combination:
//   no persistence, no intermittence  every column is marked in one row only
//   persistence only                  each column covers one contiguous row range,
//                                     one of them at least two rows long
//   intermittence only                consecutive rows share no column; row 2
//                                     revisits a column of row 0
//   both                              a 3-row window {c,d},{d},{c} plus free rows

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sessiontypo/annotation.hpp"
#include "sessiontypo/corpus.hpp"
#include "sessiontypo/error.hpp"
#include "sessiontypo/io.hpp"

namespace sessiontypo {

struct IntRange {
  int lo = 1, hi = 1;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct RealRange {
  double lo = 0, hi = 0;
  friend bool operator==(const RealRange&, const RealRange&) = default;
};

struct ArchetypeSpec {
  std::string name;
  IntRange n_queries{1, 1};
  IntRange props_per_query{1, 1};
  IntRange distinct_props_target{1, 1};
  double persistence_prob = 0.0;
  double intermittence_prob = 0.0;
  double clicks_per_query = 0.0;  // Poisson mean
  RealRange inter_event_seconds{10.0, 30.0};
  IntRange tokens_per_query{1, 3};

  friend bool operator==(const ArchetypeSpec&, const ArchetypeSpec&) = default;
};

struct ArchetypeCount {
  ArchetypeSpec spec;
  int count = 1;
};

struct SyntheticCorpus {
  std::vector<Session> sessions;
  std::vector<AnnotationMatrix> annotations;
  std::vector<int> planted_labels;  // 1-based index into the spec list
  std::vector<std::string> archetype_names;
};

/// Deterministic uniform source over the standard-specified mt19937_64.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [lo, hi], unbiased by rejection.
  int uniform_int(int lo, int hi) {
    if (hi <= lo) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  /// Exact at the edges: p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

  /// Knuth's multiplicative method; adequate for the small means used here.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-std::min(mean, 600.0));
    double prod = uniform01();
    int k = 0;
    while (prod > limit) {
      ++k;
      prod *= uniform01();
    }
    return k;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(0, static_cast<int>(i - 1)))]);
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform_int(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 engine_;
};

/// Off-scheme vocabulary used for the PAutre column.
inline const std::vector<std::string>& autre_vocabulary() {
  static const std::vector<std::string> words = {"scholar", "wikipedia", "forum", "pdf",     "cours",
                                                 "memoire", "stage",     "exemple", "tutoriel", "python",
                                                 "universite", "article", "github",  "avis",   "gratuit"};
  return words;
}

/// Filler words drawn from the default stopword list.
inline const std::vector<std::string>& filler_vocabulary() {
  static const std::vector<std::string> words = {"de", "la", "les", "pour", "des", "du", "le", "en"};
  return words;
}

inline void validate_archetype(const ArchetypeSpec& s) {
  auto bad = [&](const std::string& what) { fail(ErrorCode::InvalidSpec, "archetype '" + s.name + "': " + what); };
  auto check = [&](const IntRange& r, int min_lo, const char* name) {
    if (r.lo > r.hi) bad(std::string(name) + " has lo > hi");
    if (r.lo < min_lo) bad(std::string(name) + " must be >= " + std::to_string(min_lo));
  };
  check(s.n_queries, 1, "n_queries");
  check(s.props_per_query, 1, "props_per_query");
  check(s.distinct_props_target, 1, "distinct_props_target");
  check(s.tokens_per_query, 1, "tokens_per_query");
  if (!(s.persistence_prob >= 0.0 && s.persistence_prob <= 1.0)) bad("persistence_prob outside [0,1]");
  if (!(s.intermittence_prob >= 0.0 && s.intermittence_prob <= 1.0)) bad("intermittence_prob outside [0,1]");
  if (!(s.clicks_per_query >= 0.0) || !std::isfinite(s.clicks_per_query)) bad("clicks_per_query must be >= 0");
  if (!(s.inter_event_seconds.lo >= 0.0 && s.inter_event_seconds.lo <= s.inter_event_seconds.hi) ||
      !std::isfinite(s.inter_event_seconds.hi))
    bad("inter_event_seconds must satisfy 0 <= lo <= hi");
}

namespace detail {

using MarkGrid = std::vector<std::vector<std::uint8_t>>;

inline std::vector<int> random_subset(SeededRng& rng, int columns, int size) {
  std::vector<int> all(static_cast<std::size_t>(columns));
  std::iota(all.begin(), all.end(), 0);
  rng.shuffle(all);
  all.resize(static_cast<std::size_t>(size));
  return all;
}

inline int row_count(const std::vector<std::uint8_t>& row) {
  return std::accumulate(row.begin(), row.end(), 0);
}

// Adds up to `want` columns from `pool` to `row`, skipping any in `forbid`.
inline void fill_row(SeededRng& rng, std::vector<std::uint8_t>& row, std::vector<int> pool, int want,
                     const std::set<int>& forbid = {}) {
  rng.shuffle(pool);
  for (int c : pool) {
    if (row_count(row) >= want) break;
    if (!forbid.count(c)) row[static_cast<std::size_t>(c)] = 1;
  }
}

inline MarkGrid layout_marks(SeededRng& rng, const ArchetypeSpec& spec, int columns, int& m) {
  const bool persist = m >= 2 && rng.bernoulli(spec.persistence_prob);
  const bool intermit = m >= 3 && rng.bernoulli(spec.intermittence_prob);
  const int kmin = std::clamp(spec.props_per_query.lo, 1, columns);
  const int kmax = std::clamp(spec.props_per_query.hi, kmin, columns);
  int distinct = std::clamp(rng.uniform_int(spec.distinct_props_target.lo, spec.distinct_props_target.hi), 1, columns);

  if (!persist && !intermit) {
    // Each column appears in one row: at most `columns` rows are possible.
    m = std::min(m, columns);
    distinct = std::max(distinct, m);
  } else if (!persist || intermit) {
    distinct = std::max(distinct, 2);
  }

  std::vector<int> subset = random_subset(rng, columns, distinct);
  MarkGrid grid(static_cast<std::size_t>(m), std::vector<std::uint8_t>(static_cast<std::size_t>(columns), 0));
  std::vector<int> target(static_cast<std::size_t>(m));
  for (auto& t : target) t = rng.uniform_int(kmin, kmax);

  if (!persist && !intermit) {
    std::vector<int> capacity(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
      grid[r][subset[r]] = 1;
      capacity[r] = target[r] - 1;
    }
    for (int c = m; c < distinct; ++c) {
      std::vector<int> open;
      for (int r = 0; r < m; ++r)
        if (capacity[r] > 0) open.push_back(r);
      if (open.empty()) break;
      int r = rng.pick(open);
      grid[r][subset[c]] = 1;
      --capacity[r];
    }
    return grid;
  }

  if (persist && !intermit) {
    const int max_blocks = std::min(distinct, m - 1);
    const int blocks = kmax == 1 ? max_blocks : rng.uniform_int(1, max_blocks);
    std::vector<int> cuts;
    {
      std::vector<int> candidates(static_cast<std::size_t>(m - 1));
      std::iota(candidates.begin(), candidates.end(), 1);
      rng.shuffle(candidates);
      cuts.assign(candidates.begin(), candidates.begin() + (blocks - 1));
      cuts.push_back(0);
      cuts.push_back(m);
      std::sort(cuts.begin(), cuts.end());
    }
    std::vector<int> capacity(static_cast<std::size_t>(m));
    for (int b = 0; b < blocks; ++b)
      for (int r = cuts[b]; r < cuts[b + 1]; ++r) grid[r][subset[b]] = 1;
    for (int r = 0; r < m; ++r) capacity[r] = target[r] - 1;
    for (int c = blocks; c < distinct; ++c) {
      std::vector<int> open;
      for (int r = 0; r < m; ++r)
        if (capacity[r] > 0) open.push_back(r);
      if (open.empty()) break;
      int r = rng.pick(open);
      do {
        grid[r][subset[c]] = 1;
        --capacity[r];
        ++r;
      } while (r < m && capacity[r] > 0 && rng.bernoulli(0.6));
    }
    return grid;
  }

  if (!persist && intermit) {
    // Adjacent rows are disjoint; row 2 returns to a column of row 0.
    for (int r = 0; r < m; ++r) {
      std::set<int> forbid;
      if (r > 0)
        for (int c = 0; c < columns; ++c)
          if (grid[r - 1][c]) forbid.insert(c);
      // Leave at least one subset column free for the next row.
      int want = std::min({target[r], distinct - 1, distinct - static_cast<int>(forbid.size())});
      if (r == 2) {
        std::vector<int> first;
        for (int c = 0; c < columns; ++c)
          if (grid[0][c]) first.push_back(c);
        grid[2][rng.pick(first)] = 1;
      }
      fill_row(rng, grid[r], subset, std::max(want, 1), forbid);
    }
    return grid;
  }

  // Both flags: window {c,d},{d},{c} at a random offset, free rows elsewhere.
  const int offset = rng.uniform_int(0, m - 3);
  const int c = subset[0], d = subset[1];
  for (int r = 0; r < m; ++r) {
    if (r == offset) {
      grid[r][c] = grid[r][d] = 1;
    } else if (r == offset + 1) {
      grid[r][d] = 1;
    } else if (r == offset + 2) {
      grid[r][c] = 1;
    }
    std::set<int> forbid;
    if (r == offset + 1) forbid.insert(c);
    fill_row(rng, grid[r], subset, target[r], forbid);
  }
  return grid;
}

inline std::string query_text_for(SeededRng& rng, const PropositionScheme& scheme, const std::vector<std::uint8_t>& marks,
                                  int token_target, std::vector<std::string>& autre_terms) {
  std::vector<std::string> terms;
  for (std::size_t c = 0; c < scheme.propositions.size(); ++c) {
    if (!marks[c]) continue;
    const auto& lexicon = scheme.propositions[c].lexicon;
    terms.push_back(lexicon.empty() ? fold_text(scheme.propositions[c].label) : rng.pick(lexicon));
  }
  if (scheme.include_autre && marks.back()) {
    std::string word = rng.pick(autre_vocabulary());
    autre_terms.push_back(word);
    terms.push_back(std::move(word));
  }
  rng.shuffle(terms);
  int tokens = 0;
  for (const auto& t : terms) tokens += static_cast<int>(split_words(t).size());
  while (tokens < token_target) {
    std::size_t pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(terms.size())));
    terms.insert(terms.begin() + static_cast<std::ptrdiff_t>(pos), rng.pick(filler_vocabulary()));
    ++tokens;
  }
  std::string text;
  for (const auto& t : terms) {
    if (!text.empty()) text.push_back(' ');
    text += t;
  }
  return text;
}

inline double round_centiseconds(double t) { return std::round(t * 100.0) / 100.0; }

}  // namespace detail

/// Pure function of (specs, scheme, seed).
inline SyntheticCorpus generate(const std::vector<ArchetypeCount>& specs, const PropositionScheme& scheme,
                                std::uint64_t seed) {
  validate_scheme(scheme);
  if (specs.empty()) fail(ErrorCode::InvalidSpec, "no archetypes given");
  const int columns = static_cast<int>(scheme.column_count());
  if (columns < 2) fail(ErrorCode::InvalidSpec, "the scheme needs at least two annotation columns");
  int total = 0;
  for (const auto& s : specs) {
    validate_archetype(s.spec);
    if (s.count < 1) fail(ErrorCode::InvalidSpec, "archetype '" + s.spec.name + "': count must be >= 1");
    total += s.count;
  }
  const int width = std::max(3, static_cast<int>(std::to_string(total).size()));

  SeededRng rng(seed);
  SyntheticCorpus out;
  int serial = 0;
  for (std::size_t a = 0; a < specs.size(); ++a) {
    const auto& spec = specs[a].spec;
    out.archetype_names.push_back(spec.name);
    for (int i = 0; i < specs[a].count; ++i) {
      ++serial;
      std::string digits = std::to_string(serial);
      digits.insert(0, static_cast<std::size_t>(width) - std::min(digits.size(), static_cast<std::size_t>(width)), '0');
      Session session;
      session.session_id = "s" + digits;
      session.user_id = "u" + digits;
      session.task_id = scheme.task_id;

      int m = rng.uniform_int(spec.n_queries.lo, spec.n_queries.hi);
      auto grid = detail::layout_marks(rng, spec, columns, m);

      AnnotationMatrix matrix = make_matrix(scheme, session.session_id);
      double t = 0.0;
      for (int r = 0; r < m; ++r) {
        if (r > 0) t = detail::round_centiseconds(t + rng.uniform(spec.inter_event_seconds.lo, spec.inter_event_seconds.hi));
        AnnotationRow row;
        row.query_index = static_cast<std::size_t>(r);
        row.marks = grid[r];
        const int token_target = rng.uniform_int(spec.tokens_per_query.lo, spec.tokens_per_query.hi);
        row.query_text = detail::query_text_for(rng, scheme, grid[r], token_target, row.autre_terms);
        session.events.push_back({EventKind::query, t, row.query_text, {}});
        const int clicks = rng.poisson(spec.clicks_per_query);
        for (int c = 0; c < clicks; ++c) {
          t = detail::round_centiseconds(t + rng.uniform(spec.inter_event_seconds.lo, spec.inter_event_seconds.hi));
          session.events.push_back({EventKind::click, t, {}, "https://example.org/" + session.session_id + "/" +
                                                                 std::to_string(r) + "/" + std::to_string(c + 1)});
        }
        matrix.rows.push_back(std::move(row));
      }
      validate_session(session);
      validate_matrix(matrix);
      out.sessions.push_back(std::move(session));
      out.annotations.push_back(std::move(matrix));
      out.planted_labels.push_back(static_cast<int>(a) + 1);
    }
  }
  return out;
}

/// Five archetypes after the qualitative group descriptions: (1) many
/// queries, few clicks, intermittent; (2) one or two queries; (3) very long,
/// click-heavy, intermittent; (4) long multi-proposition queries, no
/// intermittence; (5) longer sessions of short single-proposition queries,
/// no intermittence.
inline std::vector<ArchetypeSpec> default_archetypes(const PropositionScheme& scheme) {
  const int columns = std::max(2, static_cast<int>(scheme.column_count()));
  auto cap = [&](int v) { return std::min(v, columns); };
  std::vector<ArchetypeSpec> specs(5);

  specs[0].name = "long-queries-low-click-intermittent";
  specs[0].n_queries = {8, 13};
  specs[0].props_per_query = {2, 3};
  specs[0].distinct_props_target = {cap(3), cap(5)};
  specs[0].persistence_prob = 0.9;
  specs[0].intermittence_prob = 1.0;
  specs[0].clicks_per_query = 0.3;
  specs[0].inter_event_seconds = {15.0, 35.0};
  specs[0].tokens_per_query = {4, 6};

  specs[1].name = "minimal-effort";
  specs[1].n_queries = {1, 2};
  specs[1].props_per_query = {1, 2};
  specs[1].distinct_props_target = {1, cap(3)};
  specs[1].persistence_prob = 0.0;
  specs[1].intermittence_prob = 0.0;
  specs[1].clicks_per_query = 1.0;
  specs[1].inter_event_seconds = {10.0, 40.0};
  specs[1].tokens_per_query = {2, 4};

  specs[2].name = "intensive-long-duration";
  specs[2].n_queries = {14, 22};
  specs[2].props_per_query = {1, 3};
  specs[2].distinct_props_target = {cap(5), cap(6)};
  specs[2].persistence_prob = 1.0;
  specs[2].intermittence_prob = 1.0;
  specs[2].clicks_per_query = 1.3;
  specs[2].inter_event_seconds = {50.0, 110.0};
  specs[2].tokens_per_query = {3, 5};

  specs[3].name = "multi-proposition-queries";
  specs[3].n_queries = {3, 6};
  specs[3].props_per_query = {3, 4};
  specs[3].distinct_props_target = {cap(4), cap(6)};
  specs[3].persistence_prob = 1.0;
  specs[3].intermittence_prob = 0.0;
  specs[3].clicks_per_query = 0.6;
  specs[3].inter_event_seconds = {15.0, 40.0};
  specs[3].tokens_per_query = {7, 10};

  specs[4].name = "short-queries-narrow-focus";
  specs[4].n_queries = {5, 9};
  specs[4].props_per_query = {1, 1};
  specs[4].distinct_props_target = {2, cap(3)};
  specs[4].persistence_prob = 1.0;
  specs[4].intermittence_prob = 0.0;
  specs[4].clicks_per_query = 0.8;
  specs[4].inter_event_seconds = {35.0, 70.0};
  specs[4].tokens_per_query = {2, 3};
  return specs;
}

// --- archetype spec files --------------------------------------------------------------

inline constexpr int kArchetypeFormatVersion = 1;

inline nlohmann::ordered_json archetypes_to_json(const std::vector<ArchetypeCount>& specs) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kArchetypeFormatVersion;
  doc["archetypes"] = nlohmann::ordered_json::array();
  for (const auto& [s, count] : specs) {
    nlohmann::ordered_json item;
    item["name"] = s.name;
    item["count"] = count;
    item["n_queries"] = {s.n_queries.lo, s.n_queries.hi};
    item["props_per_query"] = {s.props_per_query.lo, s.props_per_query.hi};
    item["distinct_props_target"] = {s.distinct_props_target.lo, s.distinct_props_target.hi};
    item["persistence_prob"] = s.persistence_prob;
    item["intermittence_prob"] = s.intermittence_prob;
    item["clicks_per_query"] = s.clicks_per_query;
    item["inter_event_seconds"] = {s.inter_event_seconds.lo, s.inter_event_seconds.hi};
    item["tokens_per_query"] = {s.tokens_per_query.lo, s.tokens_per_query.hi};
    doc["archetypes"].push_back(std::move(item));
  }
  return doc;
}

inline std::vector<ArchetypeCount> archetypes_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format_version", 0) != kArchetypeFormatVersion)
      fail(ErrorCode::InvalidSpec, "unsupported archetype format_version");
    std::vector<ArchetypeCount> out;
    auto int_range = [](const nlohmann::json& j) {
      auto v = j.get<std::vector<int>>();
      if (v.size() != 2) fail(ErrorCode::InvalidSpec, "ranges are [lo, hi] pairs");
      return IntRange{v[0], v[1]};
    };
    for (const auto& item : doc.at("archetypes")) {
      ArchetypeCount ac;
      auto& s = ac.spec;
      s.name = item.at("name").get<std::string>();
      ac.count = item.at("count").get<int>();
      s.n_queries = int_range(item.at("n_queries"));
      s.props_per_query = int_range(item.at("props_per_query"));
      s.distinct_props_target = int_range(item.at("distinct_props_target"));
      s.persistence_prob = item.at("persistence_prob").get<double>();
      s.intermittence_prob = item.at("intermittence_prob").get<double>();
      s.clicks_per_query = item.at("clicks_per_query").get<double>();
      auto ie = item.at("inter_event_seconds").get<std::vector<double>>();
      if (ie.size() != 2) fail(ErrorCode::InvalidSpec, "ranges are [lo, hi] pairs");
      s.inter_event_seconds = {ie[0], ie[1]};
      s.tokens_per_query = int_range(item.at("tokens_per_query"));
      out.push_back(std::move(ac));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("archetype file: ") + e.what());
  }
}

inline std::vector<ArchetypeCount> load_archetypes(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidSpec, path.string() + ": " + e.what());
  }
  return archetypes_from_json(doc);
}

}  // namespace sessiontypo
