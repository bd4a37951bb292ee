#include <catch2/catch_amalgamated.hpp>

#include "sessiontypo/corpus.hpp"
#include "support.hpp"

using namespace sessiontypo;
using testsupport::demo;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("demo scheme has P1..P5 plus Autre") {
  auto scheme = load_scheme(demo("scheme.json"));
  REQUIRE(scheme.propositions.size() == 5);
  CHECK(scheme.include_autre);
  CHECK(scheme.column_labels() == std::vector<std::string>{"P1", "P2", "P3", "P4", "P5", "PAutre"});
  CHECK(scheme.has_lexicons());
  // entries are stored normalized
  auto& p1 = scheme.propositions[0].lexicon;
  CHECK(std::find(p1.begin(), p1.end(), "detecteur") != p1.end());
}

TEST_CASE("malformed schemes") {
  CHECK(code_of([] { scheme_from_json(nlohmann::json::parse(R"({"task_id":"t","propositions":[],"include_autre":false})")); }) ==
        ErrorCode::MalformedScheme);
  CHECK(code_of([] {
          scheme_from_json(nlohmann::json::parse(R"({"task_id":"t","propositions":[{"label":"P1"},{"label":"P1"}]})"));
        }) == ErrorCode::MalformedScheme);
  CHECK(code_of([] { scheme_from_json(nlohmann::json::parse(R"({"propositions":[]})")); }) == ErrorCode::MalformedScheme);
  CHECK(code_of([] { scheme_from_json(nlohmann::json::parse(R"({"format_version":9,"task_id":"t","propositions":[]})")); }) ==
        ErrorCode::MalformedScheme);
  CHECK(code_of([] { load_scheme("/nonexistent/scheme.json"); }) == ErrorCode::IoError);
}

TEST_CASE("scheme round-trips through JSON") {
  auto scheme = load_scheme(demo("scheme.json"));
  auto again = scheme_from_json(nlohmann::json::parse(scheme_to_json(scheme).dump()));
  CHECK(again.task_id == scheme.task_id);
  CHECK(again.column_labels() == scheme.column_labels());
  for (std::size_t i = 0; i < scheme.propositions.size(); ++i)
    CHECK(again.propositions[i].lexicon == scheme.propositions[i].lexicon);
}

TEST_CASE("table1 session fixture loads") {
  auto sessions = load_sessions(demo("table1_sessions.jsonl"));
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].query_count() == 5);
  CHECK(sessions[0].click_count() == 3);
  // raw text is kept verbatim
  CHECK(sessions[0].query_texts()[2] == "fonctinonement programme plagiat");
  CHECK(sessions[0].query_texts()[0] == "programme plagiat AND morphologie AND \"word embeddings\"");
}

TEST_CASE("malformed sessions") {
  CHECK(code_of([] { parse_sessions(R"({"session_id":"a","events":[{"kind":"click","t":1}]})"); }) ==
        ErrorCode::MalformedSession);
  CHECK(code_of([] {
          parse_sessions(R"({"session_id":"a","events":[{"kind":"query","t":3.0,"text":"x"},{"kind":"query","t":1.0,"text":"y"}]})");
        }) == ErrorCode::MalformedSession);
  CHECK(code_of([] { parse_sessions("{not json"); }) == ErrorCode::MalformedSession);
  CHECK(code_of([] { parse_sessions(R"({"session_id":"a","events":[{"kind":"scroll","t":0}]})"); }) ==
        ErrorCode::MalformedSession);
  CHECK(code_of([] { parse_sessions(R"({"session_id":"a","events":[{"kind":"query","t":0,"text":"  "}]})"); }) ==
        ErrorCode::MalformedSession);
}

TEST_CASE("sessions round-trip through JSONL") {
  auto sessions = load_sessions(demo("table1_sessions.jsonl"));
  auto text = format_sessions(sessions);
  auto again = parse_sessions(text);
  REQUIRE(again.size() == 1);
  CHECK(format_sessions(again) == text);
  CHECK(again[0].events.size() == sessions[0].events.size());
  CHECK(again[0].events.back().t == 170.3);
}

TEST_CASE("validate_corpus diagnostics") {
  auto scheme = load_scheme(demo("scheme.json"));
  auto sessions = load_sessions(demo("table1_sessions.jsonl"));
  CHECK(validate_corpus(sessions, scheme).empty());

  auto dup = sessions;
  dup.push_back(sessions[0]);
  auto diags = validate_corpus(dup, scheme);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].issue == "duplicate session_id");

  auto other = sessions;
  other[0].task_id = "another-task";
  CHECK(validate_corpus(other, scheme).size() == 1);
}
