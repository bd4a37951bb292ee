#include <catch2/catch_amalgamated.hpp>

#include "sessiontypo/analysis.hpp"
#include "sessiontypo/synth.hpp"
#include "support.hpp"

using namespace sessiontypo;

namespace {

const PropositionScheme& demo_scheme() {
  static const auto scheme = load_scheme(testsupport::demo("scheme.json"));
  return scheme;
}

std::vector<ArchetypeCount> defaults(int count) {
  std::vector<ArchetypeCount> specs;
  for (auto& s : default_archetypes(demo_scheme())) specs.push_back({s, count});
  return specs;
}

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

TEST_CASE("generation is a pure function of the seed") {
  auto a = generate(defaults(5), demo_scheme(), 42);
  auto b = generate(defaults(5), demo_scheme(), 42);
  CHECK(format_sessions(a.sessions) == format_sessions(b.sessions));
  CHECK(format_annotations(a.annotations, demo_scheme()) == format_annotations(b.annotations, demo_scheme()));
  CHECK(a.planted_labels == b.planted_labels);
  auto c = generate(defaults(5), demo_scheme(), 43);
  CHECK(format_sessions(a.sessions) != format_sessions(c.sessions));
}

TEST_CASE("generated corpora are well formed") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto corpus = generate(defaults(6), demo_scheme(), seed);
    REQUIRE(corpus.sessions.size() == 30);
    CHECK(validate_corpus(corpus.sessions, demo_scheme()).empty());
    // survives a trip through the file formats
    auto sessions = parse_sessions(format_sessions(corpus.sessions));
    auto annotations = parse_annotations(format_annotations(corpus.annotations, demo_scheme()), demo_scheme());
    CHECK(annotations == corpus.annotations);
    auto fm = extract_all(sessions, annotations, demo_scheme());
    CHECK(fm.size() == 30);
  }
}

TEST_CASE("planted flags hold whenever the session is long enough") {
  ArchetypeSpec base;
  base.n_queries = {1, 12};
  base.props_per_query = {1, 3};
  base.distinct_props_target = {1, 6};
  base.clicks_per_query = 0.5;
  for (double pers : {0.0, 1.0}) {
    for (double inter : {0.0, 1.0}) {
      auto spec = base;
      spec.name = "p" + std::to_string(int(pers)) + "i" + std::to_string(int(inter));
      spec.persistence_prob = pers;
      spec.intermittence_prob = inter;
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto corpus = generate({{spec, 4}}, demo_scheme(), seed);
        for (const auto& m : corpus.annotations) {
          INFO(spec.name << " seed " << seed << " rows " << m.rows.size());
          const auto n = m.rows.size();
          CHECK(persistence_flag(m).flag == (pers == 1.0 && n >= 2 ? 1 : 0));
          CHECK(intermittence_flag(m).flag == (inter == 1.0 && n >= 3 ? 1 : 0));
          for (const auto& row : m.rows) CHECK(std::accumulate(row.marks.begin(), row.marks.end(), 0) >= 1);
        }
      }
    }
  }
}

TEST_CASE("single-query archetype") {
  ArchetypeSpec spec;
  spec.name = "one";
  spec.n_queries = {1, 1};
  spec.persistence_prob = 1.0;
  spec.intermittence_prob = 1.0;
  auto corpus = generate({{spec, 10}}, demo_scheme(), 7);
  auto fm = extract_all(corpus.sessions, corpus.annotations, demo_scheme());
  for (const auto& row : fm.rows) {
    CHECK(row[NbReq] == 1);
    CHECK(row[PersistanceP] == 0);
    CHECK(row[IntermittenceP] == 0);
  }
}

TEST_CASE("autolabel recovers the generated marks") {
  auto corpus = generate(defaults(10), demo_scheme(), 42);
  for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
    auto m = autolabel_session(corpus.sessions[i], demo_scheme());
    INFO(corpus.sessions[i].session_id);
    CHECK(m == corpus.annotations[i]);
  }
}

TEST_CASE("default archetypes") {
  auto specs = default_archetypes(demo_scheme());
  REQUIRE(specs.size() == 5);
  CHECK(specs[1].n_queries == IntRange{1, 2});
  CHECK(specs[3].intermittence_prob == 0.0);
  CHECK(specs[4].intermittence_prob == 0.0);
  for (const auto& s : specs) CHECK_NOTHROW(validate_archetype(s));
}

TEST_CASE("archetype spec files round-trip") {
  auto specs = defaults(3);
  auto back = archetypes_from_json(nlohmann::json::parse(archetypes_to_json(specs).dump()));
  REQUIRE(back.size() == specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(back[i].spec == specs[i].spec);
    CHECK(back[i].count == 3);
  }
  CHECK(code_of([] { archetypes_from_json(nlohmann::json::parse(R"({"format_version":2,"archetypes":[]})")); }) ==
        ErrorCode::InvalidSpec);
}

TEST_CASE("invalid archetypes") {
  auto bad = default_archetypes(demo_scheme())[0];
  bad.n_queries = {5, 2};
  CHECK(code_of([&] { generate({{bad, 1}}, demo_scheme(), 1); }) == ErrorCode::InvalidSpec);
  auto ok = default_archetypes(demo_scheme())[0];
  CHECK(code_of([&] { generate({{ok, 0}}, demo_scheme(), 1); }) == ErrorCode::InvalidSpec);
  ok.persistence_prob = 1.5;
  CHECK(code_of([&] { generate({{ok, 1}}, demo_scheme(), 1); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("default archetypes are recovered by the typology") {
  auto corpus = generate(defaults(14), demo_scheme(), 42);
  auto fm = extract_all(corpus.sessions, corpus.annotations, demo_scheme());
  auto report = analyze(fm);
  double ari = adjusted_rand_index(report.labels, corpus.planted_labels);
  INFO("ARI " << ari);
  CHECK(ari >= 0.9);
}
