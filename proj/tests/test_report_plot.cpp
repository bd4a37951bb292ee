#include <catch2/catch_amalgamated.hpp>

#include "sessiontypo/plot.hpp"
#include "sessiontypo/report.hpp"
#include "sessiontypo/synth.hpp"
#include "support.hpp"

using namespace sessiontypo;

namespace {

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

FeatureMatrix seed42_features() {
  static const auto scheme = load_scheme(testsupport::demo("scheme.json"));
  std::vector<ArchetypeCount> specs;
  for (auto& s : default_archetypes(scheme)) specs.push_back({s, 14});
  auto corpus = generate(specs, scheme, 42);
  return extract_all(corpus.sessions, corpus.annotations, scheme);
}

}  // namespace

TEST_CASE("report JSON carries the pipeline outputs") {
  auto report = analyze(seed42_features());
  auto doc = nlohmann::json::parse(format_report(report));
  CHECK(doc["format_version"] == 1);
  CHECK(doc["labels"].size() == 70);
  CHECK(doc["scores"].size() == 70);
  CHECK(doc["merges"].size() == 69);
  CHECK(doc["profiles"].size() == 5);
  CHECK(doc["ellipses"].size() == 5);
  CHECK(doc["variables"][0] == "NbReq");
  for (const auto& p : doc["profiles"]) CHECK(p["size"].get<int>() > 0);
  CHECK(format_report(report) == format_report(analyze(seed42_features())));
}

TEST_CASE("plane view reads back what the report wrote") {
  auto report = analyze(seed42_features());
  auto view = plane_view_from_json(nlohmann::json::parse(format_report(report)));
  CHECK(view.k == 5);
  CHECK(view.labels == report.labels);
  REQUIRE(view.points.size() == 70);
  CHECK(view.points[3][0] == report.pca.scores(3, 0));
  CHECK(view.points[3][1] == report.pca.scores(3, 1));

  auto broken = nlohmann::json::parse(format_report(report));
  broken["format_version"] = 7;
  CHECK_THROWS_AS(plane_view_from_json(broken), Error);
  broken = nlohmann::json::parse(format_report(report));
  broken["labels"].erase(0);
  try {
    plane_view_from_json(broken);
    FAIL("expected MalformedReport");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedReport);
  }
}

TEST_CASE("70-session plot has 70 points and 5 ellipses, byte-stable") {
  auto report = analyze(seed42_features());
  auto view = plane_view_from_json(nlohmann::json::parse(format_report(report)));
  auto svg = render_svg(view);
  CHECK(count_of(svg, "<circle ") == 70);
  CHECK(count_of(svg, "<ellipse ") == 5);
  CHECK(svg == render_svg(plane_view_from_json(nlohmann::json::parse(format_report(report)))));
  CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
  CHECK(svg.find("Dim 1 (") != std::string::npos);
}

TEST_CASE("a 2-point cluster is drawn without an ellipse") {
  PlaneView view;
  view.k = 2;
  view.explained = {0.6, 0.3};
  for (int i = 0; i < 6; ++i) {
    view.session_ids.push_back("s" + std::to_string(i));
    view.points.push_back({double(i), double(i * i % 5)});
    view.labels.push_back(i < 4 ? 1 : 2);
  }
  Matrix scores(6, 2);
  for (int i = 0; i < 6; ++i) scores.row(i) << view.points[i][0], view.points[i][1];
  view.ellipses = cluster_ellipses(scores, view.labels, 2, 0.95);
  REQUIRE(view.ellipses[0].ellipse);
  REQUIRE(!view.ellipses[1].ellipse);
  auto svg = render_svg(view);
  CHECK(count_of(svg, "<circle ") == 6);
  CHECK(count_of(svg, "<ellipse ") == 1);
  CHECK(svg.find("<!-- warning: cluster 2 drawn without ellipse") != std::string::npos);
}
