#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls the code path it is used to check.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <sys/wait.h>

#include <Eigen/Dense>

#include "sessiontypo/annotation.hpp"
#include "sessiontypo/corpus.hpp"
#include "sessiontypo/features.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(SESSIONTYPO_DATA_DIR); }
inline fs::path demo(const std::string& name) { return data_dir() / "demo" / name; }
inline fs::path cli_path() { return fs::path(SESSIONTYPO_CLI); }

/// Fresh scratch directory per call, removed by the OS temp cleaner only.
inline fs::path scratch_dir(const std::string& tag) {
  static int serial = 0;
  auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  fs::path dir = fs::temp_directory_path() /
                 ("sessiontypo_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(++serial));
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Runs the CLI binary with `args` (already shell-quoted).
inline CliResult run_cli(const std::string& args) {
  auto dir = scratch_dir("cli");
  auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  std::string cmd = "'" + cli_path().string() + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

inline std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

/// Builds a matrix from 0/1 rows; PAutre (if `with_autre`) is the last column.
inline sessiontypo::AnnotationMatrix matrix_from(const std::vector<std::vector<int>>& rows, bool with_autre = false,
                                                 std::string session_id = "s") {
  sessiontypo::AnnotationMatrix m;
  m.session_id = std::move(session_id);
  std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols; ++c)
    m.labels.push_back(with_autre && c + 1 == cols ? std::string(sessiontypo::kAutreLabel) : "P" + std::to_string(c + 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    sessiontypo::AnnotationRow row;
    row.query_index = r;
    row.query_text = "q" + std::to_string(r);
    for (int v : rows[r]) row.marks.push_back(static_cast<std::uint8_t>(v));
    if (with_autre && row.marks.back()) row.autre_terms = {"x"};
    m.rows.push_back(std::move(row));
  }
  return m;
}

inline sessiontypo::AnnotationMatrix random_matrix(std::mt19937_64& gen, std::size_t max_rows, std::size_t max_cols) {
  std::uniform_int_distribution<std::size_t> rows_d(1, max_rows), cols_d(1, max_cols);
  std::bernoulli_distribution bit(std::uniform_real_distribution<double>(0.1, 0.9)(gen));
  std::size_t rows = rows_d(gen), cols = cols_d(gen);
  std::vector<std::vector<int>> grid(rows, std::vector<int>(cols));
  for (auto& r : grid)
    for (auto& v : r) v = bit(gen);
  return matrix_from(grid);
}

// --- flag oracles: enumerate every (column, interval) pattern ---------------------

/// Maximal all-ones intervals of length >= 2, found by checking every [s, e].
inline std::vector<sessiontypo::PersistenceRun> oracle_runs(const sessiontypo::AnnotationMatrix& m) {
  std::vector<sessiontypo::PersistenceRun> runs;
  const std::size_t n = m.rows.size();
  for (std::size_t c = 0; c < m.labels.size(); ++c) {
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t e = s + 1; e < n; ++e) {
        bool ones = true;
        for (std::size_t r = s; r <= e; ++r) ones = ones && m.rows[r].marks[c] == 1;
        bool left_edge = s == 0 || m.rows[s - 1].marks[c] == 0;
        bool right_edge = e + 1 == n || m.rows[e + 1].marks[c] == 0;
        if (ones && left_edge && right_edge) runs.push_back({m.labels[c], s, e - s + 1});
      }
    }
  }
  return runs;
}

/// Every pair a < b with ones at both ends and only zeros strictly inside.
inline std::vector<sessiontypo::IntermittenceGap> oracle_gaps(const sessiontypo::AnnotationMatrix& m) {
  std::vector<sessiontypo::IntermittenceGap> gaps;
  const std::size_t n = m.rows.size();
  for (std::size_t c = 0; c < m.labels.size(); ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 2; b < n; ++b) {
        if (!m.rows[a].marks[c] || !m.rows[b].marks[c]) continue;
        bool zeros = true;
        for (std::size_t r = a + 1; r < b; ++r) zeros = zeros && m.rows[r].marks[c] == 0;
        if (zeros) gaps.push_back({m.labels[c], a + 1, b - a - 1});
      }
    }
  }
  return gaps;
}

// --- Ward oracle: recompute delta ESS from the raw points at every step --------------

struct OracleMerge {
  std::size_t left, right;
  double height;
  std::size_t size;
};

inline double ess(const Eigen::MatrixXd& pts, const std::vector<std::size_t>& members) {
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(pts.cols());
  for (auto i : members) mean += pts.row(static_cast<Eigen::Index>(i));
  mean /= static_cast<double>(members.size());
  double s = 0;
  for (auto i : members) s += (pts.row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
  return s;
}

inline std::vector<OracleMerge> naive_ward(const Eigen::MatrixXd& pts) {
  const std::size_t n = static_cast<std::size_t>(pts.rows());
  struct Cluster {
    std::size_t id;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i, {i}});
  std::vector<OracleMerge> merges;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::tuple<double, std::size_t, std::size_t> best{std::numeric_limits<double>::infinity(), 0, 0};
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        auto merged = clusters[i].members;
        merged.insert(merged.end(), clusters[j].members.begin(), clusters[j].members.end());
        double delta = ess(pts, merged) - ess(pts, clusters[i].members) - ess(pts, clusters[j].members);
        std::tuple<double, std::size_t, std::size_t> key{delta, std::min(clusters[i].id, clusters[j].id),
                                                         std::max(clusters[i].id, clusters[j].id)};
        if (key < best) {
          best = key;
          bi = i;
          bj = j;
        }
      }
    }
    auto merged = clusters[bi].members;
    merged.insert(merged.end(), clusters[bj].members.begin(), clusters[bj].members.end());
    merges.push_back({std::get<1>(best), std::get<2>(best), std::get<0>(best), merged.size()});
    clusters[bi] = {n + step, merged};
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return merges;
}

// --- ARI oracle by enumerating item pairs ------------------------------------------

inline double pair_count_ari(const std::vector<int>& a, const std::vector<int>& b) {
  double both = 0, same_a = 0, same_b = 0, pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      same_a += sa;
      same_b += sb;
      pairs += 1;
    }
  }
  double expected = same_a * same_b / pairs;
  double max_index = 0.5 * (same_a + same_b);
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

/// Jittered points: continuous coordinates so Ward never meets exact ties.
inline Eigen::MatrixXd random_points(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = normal(gen) * (1.0 + static_cast<double>(i % 3));
  return pts;
}

}  // namespace testsupport
