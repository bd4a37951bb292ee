#pragma once

// report.json serialization. Arrays follow the fixed variable order and the
// input session order; keys are emitted in a fixed order so identical
// reports serialize to identical bytes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sessiontypo/analysis.hpp"
#include "sessiontypo/error.hpp"
#include "sessiontypo/io.hpp"

namespace sessiontypo {

inline constexpr int kReportFormatVersion = 1;
inline constexpr const char* kEllipseMethod = "concentration ellipse (chi-square quantile, 2 d.o.f.)";

namespace detail {

inline nlohmann::ordered_json vector_json(const Vector& v) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline nlohmann::ordered_json matrix_json(const Matrix& m) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const TypologyReport& r) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kReportFormatVersion;
  doc["variables"] = r.variables;
  doc["session_ids"] = r.session_ids;
  doc["center"] = detail::vector_json(r.standardized.center);
  doc["scale"] = detail::vector_json(r.standardized.scale);
  doc["eigenvalues"] = detail::vector_json(r.pca.eigenvalues);
  doc["explained_ratio"] = detail::vector_json(r.pca.explained_ratio);
  doc["loadings"] = detail::matrix_json(r.pca.loadings);
  doc["scores"] = detail::matrix_json(r.pca.scores);
  doc["components"] = r.components;
  auto merges = nlohmann::ordered_json::array();
  for (const auto& m : r.dendrogram.merges)
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  doc["merges"] = std::move(merges);
  doc["k"] = r.k;
  doc["labels"] = r.labels;
  auto profiles = nlohmann::ordered_json::array();
  for (const auto& p : r.profiles) {
    nlohmann::ordered_json item;
    item["cluster"] = p.label;
    item["size"] = p.size;
    item["means"] = p.means;
    item["gaps"] = p.gaps;
    auto ranked = nlohmann::ordered_json::array();
    for (auto j : p.ranked) ranked.push_back(r.variables[j]);
    item["distinguishing"] = std::move(ranked);
    profiles.push_back(std::move(item));
  }
  doc["profiles"] = std::move(profiles);
  doc["level"] = r.level;
  doc["ellipse_method"] = kEllipseMethod;
  auto ellipses = nlohmann::ordered_json::array();
  for (const auto& ce : r.ellipses) {
    nlohmann::ordered_json item;
    item["cluster"] = ce.label;
    if (ce.ellipse) {
      item["center"] = ce.ellipse->center;
      item["semi_axes"] = ce.ellipse->semi_axes;
      item["angle"] = ce.ellipse->angle;
    } else {
      item["center"] = nullptr;
      item["semi_axes"] = nullptr;
      item["angle"] = nullptr;
      item["note"] = ce.note;
    }
    ellipses.push_back(std::move(item));
  }
  doc["ellipses"] = std::move(ellipses);
  return doc;
}

inline std::string format_report(const TypologyReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline void save_report(const TypologyReport& r, const std::filesystem::path& path) {
  io::write_file(path, format_report(r));
}

/// The subset of a report needed to draw the principal plane.
struct PlaneView {
  std::vector<std::string> session_ids;
  std::vector<std::array<double, 2>> points;
  std::array<double, 2> explained{};
  std::vector<int> labels;
  int k = 0;
  double level = 0.95;
  std::vector<ClusterEllipse> ellipses;
};

inline PlaneView plane_view_from_json(const nlohmann::json& doc) {
  auto bad = [](const std::string& what) { fail(ErrorCode::MalformedReport, what); };
  try {
    if (!doc.is_object()) bad("report must be a JSON object");
    if (doc.value("format_version", 0) != kReportFormatVersion) bad("unsupported report format_version");
    PlaneView v;
    v.k = doc.at("k").get<int>();
    v.level = doc.at("level").get<double>();
    v.labels = doc.at("labels").get<std::vector<int>>();
    v.session_ids = doc.at("session_ids").get<std::vector<std::string>>();
    auto ratio = doc.at("explained_ratio").get<std::vector<double>>();
    if (ratio.size() < 2) bad("report needs at least two principal components");
    v.explained = {ratio[0], ratio[1]};
    const auto& scores = doc.at("scores");
    if (!scores.is_array() || scores.size() != v.labels.size()) bad("scores and labels differ in length");
    if (v.session_ids.size() != v.labels.size()) bad("session_ids and labels differ in length");
    for (const auto& row : scores) {
      auto r = row.get<std::vector<double>>();
      if (r.size() < 2) bad("score rows need at least two columns");
      v.points.push_back({r[0], r[1]});
    }
    for (int l : v.labels)
      if (l < 1 || l > v.k) bad("label outside 1..k");
    for (const auto& item : doc.at("ellipses")) {
      ClusterEllipse ce;
      ce.label = item.at("cluster").get<int>();
      if (!item.at("center").is_null()) {
        Ellipse e;
        e.center = item.at("center").get<std::array<double, 2>>();
        e.semi_axes = item.at("semi_axes").get<std::array<double, 2>>();
        e.angle = item.at("angle").get<double>();
        ce.ellipse = e;
      } else {
        ce.note = item.value("note", std::string{});
      }
      v.ellipses.push_back(std::move(ce));
    }
    if (v.ellipses.size() != static_cast<std::size_t>(v.k)) bad("one ellipse entry per cluster is required");
    return v;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedReport, std::string("report field error: ") + e.what());
  }
}

inline PlaneView load_plane_view(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedReport, path.string() + ": " + e.what());
  }
  return plane_view_from_json(doc);
}

}  // namespace sessiontypo
