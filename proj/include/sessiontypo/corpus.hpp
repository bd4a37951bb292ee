#pragma once

// Task schemes, search sessions, and their on-disk formats.
//
//   scheme.json     {"task_id","statement","propositions":[{"label","description","lexicon":[..]}],
//                    "include_autre"}
//   sessions.jsonl  one {"session_id","user_id","task_id","events":[{"kind","t","text"?,"url"?}]}
//                   per line. Timestamps are seconds relative to the session start (t = 0).

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sessiontypo/error.hpp"
#include "sessiontypo/io.hpp"
#include "sessiontypo/text.hpp"

namespace sessiontypo {

inline constexpr std::string_view kAutreLabel = "PAutre";
inline constexpr int kSchemeFormatVersion = 1;

struct Proposition {
  std::string label;
  std::string description;
  std::vector<std::string> lexicon;  // normalized entries; may be empty
};

struct PropositionScheme {
  std::string task_id;
  std::string statement;
  std::vector<Proposition> propositions;
  bool include_autre = true;

  /// Annotation column labels: P1..Pn, then PAutre when enabled.
  std::vector<std::string> column_labels() const {
    std::vector<std::string> labels;
    labels.reserve(propositions.size() + 1);
    for (const auto& p : propositions) labels.push_back(p.label);
    if (include_autre) labels.emplace_back(kAutreLabel);
    return labels;
  }

  std::size_t column_count() const { return propositions.size() + (include_autre ? 1 : 0); }

  bool has_lexicons() const {
    for (const auto& p : propositions)
      if (!p.lexicon.empty()) return true;
    return false;
  }
};

enum class EventKind { query, click };

struct QueryEvent {
  EventKind kind = EventKind::query;
  double t = 0.0;
  std::string text;  // queries only
  std::string url;   // clicks only, optional
};

struct Session {
  std::string session_id;
  std::string user_id;
  std::string task_id;
  std::vector<QueryEvent> events;

  std::size_t query_count() const {
    std::size_t n = 0;
    for (const auto& e : events) n += e.kind == EventKind::query;
    return n;
  }
  std::size_t click_count() const { return events.size() - query_count(); }

  std::vector<std::string> query_texts() const {
    std::vector<std::string> out;
    for (const auto& e : events)
      if (e.kind == EventKind::query) out.push_back(e.text);
    return out;
  }
};

struct CorpusDiagnostic {
  std::string session_id;
  std::string issue;
};

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

template <typename T>
T json_field(const nlohmann::json& obj, const char* key, ErrorCode code, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(code, where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(code, where + ": field '" + key + "' has the wrong type");
  }
}

inline std::string normalize_lexicon_entry(std::string_view entry) {
  return join_tokens(normalize_tokens(entry));
}

}  // namespace detail

/// Checks the scheme invariants; throws MalformedScheme.
inline void validate_scheme(const PropositionScheme& scheme) {
  if (scheme.propositions.empty() && !scheme.include_autre)
    fail(ErrorCode::MalformedScheme, "scheme has no propositions and no Autre column");
  std::set<std::string> seen;
  for (const auto& p : scheme.propositions) {
    if (detail::trim(p.label).empty()) fail(ErrorCode::MalformedScheme, "empty proposition label");
    if (scheme.include_autre && p.label == kAutreLabel)
      fail(ErrorCode::MalformedScheme, "label 'PAutre' is reserved");
    if (!seen.insert(p.label).second)
      fail(ErrorCode::MalformedScheme, "duplicate proposition label '" + p.label + "'");
  }
}

inline PropositionScheme scheme_from_json(const nlohmann::json& doc) {
  constexpr auto code = ErrorCode::MalformedScheme;
  if (!doc.is_object()) fail(code, "scheme must be a JSON object");
  if (auto v = doc.find("format_version"); v != doc.end() && *v != kSchemeFormatVersion)
    fail(code, "unsupported scheme format_version " + v->dump());
  PropositionScheme scheme;
  scheme.task_id = detail::json_field<std::string>(doc, "task_id", code, "scheme");
  scheme.statement = doc.value("statement", std::string{});
  scheme.include_autre = doc.value("include_autre", true);
  auto props = doc.find("propositions");
  if (props == doc.end() || !props->is_array()) fail(code, "scheme: 'propositions' must be an array");
  for (const auto& item : *props) {
    if (!item.is_object()) fail(code, "scheme: proposition must be an object");
    Proposition p;
    p.label = detail::json_field<std::string>(item, "label", code, "proposition");
    p.description = item.value("description", std::string{});
    if (auto lex = item.find("lexicon"); lex != item.end()) {
      if (!lex->is_array()) fail(code, "proposition '" + p.label + "': lexicon must be an array");
      for (const auto& entry : *lex) {
        if (!entry.is_string()) fail(code, "proposition '" + p.label + "': lexicon entries must be strings");
        auto normalized = detail::normalize_lexicon_entry(entry.get<std::string>());
        if (!normalized.empty()) p.lexicon.push_back(std::move(normalized));
      }
    }
    scheme.propositions.push_back(std::move(p));
  }
  validate_scheme(scheme);
  return scheme;
}

inline nlohmann::ordered_json scheme_to_json(const PropositionScheme& scheme) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kSchemeFormatVersion;
  doc["task_id"] = scheme.task_id;
  doc["statement"] = scheme.statement;
  doc["propositions"] = nlohmann::ordered_json::array();
  for (const auto& p : scheme.propositions)
    doc["propositions"].push_back({{"label", p.label}, {"description", p.description}, {"lexicon", p.lexicon}});
  doc["include_autre"] = scheme.include_autre;
  return doc;
}

inline PropositionScheme load_scheme(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedScheme, path.string() + ": " + e.what());
  }
  return scheme_from_json(doc);
}

/// Checks the per-session invariants; throws MalformedSession.
inline void validate_session(const Session& s) {
  const std::string where = "session '" + s.session_id + "'";
  if (s.session_id.empty()) fail(ErrorCode::MalformedSession, "session with empty session_id");
  bool has_query = false;
  double last_t = 0.0;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    if (!std::isfinite(e.t) || e.t < 0.0)
      fail(ErrorCode::MalformedSession, where + ": event " + std::to_string(i) + " has negative or non-finite t");
    if (i > 0 && e.t < last_t)
      fail(ErrorCode::MalformedSession, where + ": timestamps decrease at event " + std::to_string(i));
    last_t = e.t;
    if (e.kind == EventKind::query) {
      if (detail::trim(e.text).empty())
        fail(ErrorCode::MalformedSession, where + ": query event " + std::to_string(i) + " has empty text");
      has_query = true;
    }
  }
  if (!has_query) fail(ErrorCode::MalformedSession, where + ": no query event");
}

inline Session session_from_json(const nlohmann::json& obj, std::size_t line_no) {
  constexpr auto code = ErrorCode::MalformedSession;
  const std::string where = "line " + std::to_string(line_no);
  if (!obj.is_object()) fail(code, where + ": expected a JSON object");
  Session s;
  s.session_id = detail::json_field<std::string>(obj, "session_id", code, where);
  s.user_id = obj.value("user_id", std::string{});
  s.task_id = obj.value("task_id", std::string{});
  auto events = obj.find("events");
  if (events == obj.end() || !events->is_array()) fail(code, where + ": 'events' must be an array");
  for (const auto& ev : *events) {
    if (!ev.is_object()) fail(code, where + ": event must be an object");
    QueryEvent e;
    auto kind = detail::json_field<std::string>(ev, "kind", code, where);
    if (kind == "query") {
      e.kind = EventKind::query;
    } else if (kind == "click") {
      e.kind = EventKind::click;
    } else {
      fail(code, where + ": unknown event kind '" + kind + "'");
    }
    auto t = ev.find("t");
    if (t == ev.end() || !t->is_number()) fail(code, where + ": event 't' must be a number");
    e.t = t->get<double>();
    if (e.kind == EventKind::query) {
      e.text = ev.value("text", std::string{});
    } else {
      e.url = ev.value("url", std::string{});
    }
    s.events.push_back(std::move(e));
  }
  validate_session(s);
  return s;
}

inline nlohmann::ordered_json session_to_json(const Session& s) {
  nlohmann::ordered_json obj;
  obj["session_id"] = s.session_id;
  obj["user_id"] = s.user_id;
  obj["task_id"] = s.task_id;
  obj["events"] = nlohmann::ordered_json::array();
  for (const auto& e : s.events) {
    nlohmann::ordered_json ev;
    ev["kind"] = e.kind == EventKind::query ? "query" : "click";
    ev["t"] = e.t;
    if (e.kind == EventKind::query) {
      ev["text"] = e.text;
    } else if (!e.url.empty()) {
      ev["url"] = e.url;
    }
    obj["events"].push_back(std::move(ev));
  }
  return obj;
}

inline std::vector<Session> parse_sessions(std::string_view text) {
  std::vector<Session> sessions;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::MalformedSession, "line " + std::to_string(line_no) + ": " + e.what());
    }
    sessions.push_back(session_from_json(obj, line_no));
  }
  return sessions;
}

inline std::vector<Session> load_sessions(const std::filesystem::path& path) {
  return parse_sessions(io::read_file(path));
}

inline std::string format_sessions(const std::vector<Session>& sessions) {
  std::string out;
  for (const auto& s : sessions) {
    out += session_to_json(s).dump();
    out.push_back('\n');
  }
  return out;
}

inline void save_sessions(const std::vector<Session>& sessions, const std::filesystem::path& path) {
  io::write_file(path, format_sessions(sessions));
}

/// Soft corpus checks: duplicate ids and task mismatches. Never throws.
inline std::vector<CorpusDiagnostic> validate_corpus(const std::vector<Session>& sessions,
                                                     const PropositionScheme& scheme) {
  std::vector<CorpusDiagnostic> out;
  std::map<std::string, int> seen;
  for (const auto& s : sessions) {
    if (++seen[s.session_id] == 2) out.push_back({s.session_id, "duplicate session_id"});
    if (s.task_id != scheme.task_id)
      out.push_back({s.session_id, "task_id '" + s.task_id + "' does not match scheme task '" + scheme.task_id + "'"});
  }
  return out;
}

}  // namespace sessiontypo
