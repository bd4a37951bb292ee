#pragma once

// Descriptive statistics, z-scoring, correlation PCA, Ward agglomerative
// clustering, partition utilities and concentration ellipses.
//
// Conventions:
//  * standard deviations are sample (n - 1) deviations;
//  * PCA loadings are unit eigenvectors of the correlation matrix, each
//    oriented so that its largest-magnitude entry is positive;
//  * Ward merge heights are increases in within-cluster sum of squares
//    (delta ESS), not sqrt or doubled variants;
//  * merge ties go to the lowest (left, right) node-id pair, leaves being
//    0..n-1 and the i-th merge creating node n + i.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "sessiontypo/error.hpp"
#include "sessiontypo/features.hpp"

namespace sessiontypo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// --- descriptive statistics -----------------------------------------------------

struct VariableSummary {
  double min = 0, max = 0, mean = 0, sd = 0, median = 0;
};

struct DescriptiveTable {
  std::vector<std::string> variables;
  std::vector<VariableSummary> summaries;
};

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_sd(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline VariableSummary summarize(const std::vector<double>& xs) {
  if (xs.size() < 2) fail(ErrorCode::NotEnoughData, "at least two observations are needed");
  VariableSummary s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  s.mean = mean_of(xs);
  s.sd = sample_sd(xs, s.mean);
  s.median = median_of(xs);
  return s;
}

inline DescriptiveTable describe(const FeatureMatrix& fm) {
  if (fm.size() < 2) fail(ErrorCode::NotEnoughData, "describe needs at least two sessions");
  DescriptiveTable table;
  for (std::size_t j = 0; j < kVariableCount; ++j) {
    table.variables.emplace_back(kVariableNames[j]);
    table.summaries.push_back(summarize(fm.column(j)));
  }
  return table;
}

inline Matrix to_matrix(const FeatureMatrix& fm) {
  Matrix x(static_cast<Eigen::Index>(fm.size()), static_cast<Eigen::Index>(kVariableCount));
  for (std::size_t i = 0; i < fm.size(); ++i)
    for (std::size_t j = 0; j < kVariableCount; ++j) x(i, j) = fm.rows[i][j];
  return x;
}

// --- standardization --------------------------------------------------------------

struct Standardized {
  Matrix z;
  Vector center;
  Vector scale;
};

inline Standardized standardize(const Matrix& x, const std::vector<std::string>& names = {}) {
  const auto n = x.rows(), p = x.cols();
  if (n < 2) fail(ErrorCode::NotEnoughData, "standardization needs at least two rows");
  Standardized out{Matrix(n, p), Vector(p), Vector(p)};
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += x(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
      std::string name = j < static_cast<Eigen::Index>(names.size()) ? names[j] : "column " + std::to_string(j);
      fail(ErrorCode::ZeroVariance, "variable " + name + " has zero variance");
    }
    out.center(j) = mean;
    out.scale(j) = sd;
    for (Eigen::Index i = 0; i < n; ++i) out.z(i, j) = (x(i, j) - mean) / sd;
  }
  return out;
}

inline Standardized standardize(const FeatureMatrix& fm) {
  std::vector<std::string> names(kVariableNames.begin(), kVariableNames.end());
  return standardize(to_matrix(fm), names);
}

// --- PCA -----------------------------------------------------------------------------

struct PcaResult {
  Vector eigenvalues;      // descending, clamped at 0
  Vector explained_ratio;  // eigenvalue / p
  Matrix loadings;         // p x p, columns are components
  Matrix scores;           // n x p
};

/// Flips each column so its largest-magnitude entry is positive. Entries
/// within 1e-12 of the maximum magnitude count as tied; the lowest row wins.
inline void orient_columns(Matrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double max_abs = v.col(c).cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) >= max_abs - 1e-12) {
        pivot = r;
        break;
      }
    }
    if (v(pivot, c) < 0) v.col(c) = -v.col(c);
  }
}

/// PCA of an already standardized matrix via the correlation matrix
/// R = Z'Z / (n - 1).
inline PcaResult pca(const Matrix& z) {
  const auto n = z.rows(), p = z.cols();
  if (n < 2) fail(ErrorCode::NotEnoughData, "PCA needs at least two rows");
  if (!z.allFinite()) fail(ErrorCode::NonFiniteInput, "PCA input has non-finite values");
  const Matrix r = (z.transpose() * z) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(r);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NotEnoughData, "eigendecomposition did not converge");

  // Eigen returns ascending eigenvalues; reorder descending, stable on index.
  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), 0);
  const Vector& evals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return evals(a) > evals(b); });

  PcaResult out;
  out.eigenvalues.resize(p);
  out.loadings.resize(p, p);
  for (Eigen::Index c = 0; c < p; ++c) {
    out.eigenvalues(c) = std::max(0.0, evals(order[c]));
    out.loadings.col(c) = solver.eigenvectors().col(order[c]);
  }
  orient_columns(out.loadings);
  out.explained_ratio = out.eigenvalues / static_cast<double>(p);
  out.scores = z * out.loadings;
  return out;
}

// --- Ward clustering -------------------------------------------------------------------

struct Merge {
  std::size_t left = 0;   // smaller node id
  std::size_t right = 0;  // larger node id
  double height = 0.0;    // delta ESS
  std::size_t size = 0;

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::size_t n_leaves = 0;
  std::vector<Merge> merges;
};

/// Ward agglomerative clustering on Euclidean points (rows of `points`).
///
/// Pairwise merge costs are kept as delta-ESS values, initialized to half
/// the squared distance between singletons and updated by Lance-Williams:
///   d(i+j, k) = ((n_i + n_k) d(i,k) + (n_j + n_k) d(j,k) - n_k d(i,j)) / (n_i + n_j + n_k)
/// Each active cluster caches its cheapest partner, so a step costs O(n)
/// unless a cached partner disappears.
inline Dendrogram ward_cluster(const Matrix& points) {
  const std::size_t n = static_cast<std::size_t>(points.rows());
  if (n < 2) fail(ErrorCode::NotEnoughData, "Ward clustering needs at least two points");
  if (!points.allFinite()) fail(ErrorCode::NonFiniteInput, "clustering input has non-finite values");

  std::vector<double> cost(n * n, 0.0);
  auto at = [&](std::size_t a, std::size_t b) -> double& { return cost[a * n + b]; };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) at(a, b) = at(b, a) = 0.5 * (points.row(a) - points.row(b)).squaredNorm();

  std::vector<std::size_t> node(n), size(n, 1);
  std::iota(node.begin(), node.end(), 0);
  std::vector<bool> active(n, true);

  using Key = std::tuple<double, std::size_t, std::size_t>;
  auto key = [&](std::size_t a, std::size_t b) {
    return Key{at(a, b), std::min(node[a], node[b]), std::max(node[a], node[b])};
  };
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best(n, none);
  auto refresh = [&](std::size_t a) {
    best[a] = none;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || !active[b]) continue;
      if (best[a] == none || key(a, b) < key(a, best[a])) best[a] = b;
    }
  };
  for (std::size_t a = 0; a < n; ++a) refresh(a);

  Dendrogram out;
  out.n_leaves = n;
  out.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = none;
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a] || best[a] == none) continue;
      if (i == none || key(a, best[a]) < key(i, best[i])) i = a;
    }
    std::size_t j = best[i];
    const double dij = at(i, j);
    out.merges.push_back({std::min(node[i], node[j]), std::max(node[i], node[j]), dij, size[i] + size[j]});

    const double ni = static_cast<double>(size[i]), nj = static_cast<double>(size[j]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      const double nk = static_cast<double>(size[k]);
      const double d = ((ni + nk) * at(i, k) + (nj + nk) * at(j, k) - nk * dij) / (ni + nj + nk);
      at(i, k) = at(k, i) = d;
    }
    active[j] = false;
    size[i] += size[j];
    node[i] = n + step;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i) continue;
      if (best[k] == i || best[k] == j) {
        refresh(k);
      } else if (key(k, i) < key(k, best[k])) {
        best[k] = i;
      }
    }
    refresh(i);
  }
  return out;
}

/// Undoes the last k - 1 merges. Clusters are numbered 1..k in order of
/// their smallest member index.
inline std::vector<int> cut(const Dendrogram& d, int k) {
  const std::size_t n = d.n_leaves;
  if (k < 1 || static_cast<std::size_t>(k) > n)
    fail(ErrorCode::InvalidK, "k = " + std::to_string(k) + " is outside 1.." + std::to_string(n));
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const std::size_t applied = n - static_cast<std::size_t>(k);
  for (std::size_t s = 0; s < applied; ++s) {
    const auto& m = d.merges.at(s);
    parent[find(m.left)] = n + s;
    parent[find(m.right)] = n + s;
  }
  std::vector<int> labels(n, 0);
  std::map<std::size_t, int> label_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = label_of_root.try_emplace(find(i), static_cast<int>(label_of_root.size()) + 1);
    labels[i] = it->second;
  }
  return labels;
}

// --- partition comparison -----------------------------------------------------------------

inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "label vectors differ in length");
  if (a.size() < 2) fail(ErrorCode::NotEnoughData, "ARI needs at least two items");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto pairs = [](double x) { return x * (x - 1) / 2; };
  double index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [_, c] : joint) index += pairs(c);
  for (const auto& [_, c] : rows) sum_rows += pairs(c);
  for (const auto& [_, c] : cols) sum_cols += pairs(c);
  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both partitions trivial in the same way
  return (index - expected) / (max_index - expected);
}

// --- ellipses ---------------------------------------------------------------------------------

struct Ellipse {
  std::array<double, 2> center{};
  std::array<double, 2> semi_axes{};  // major, minor
  double angle = 0.0;                 // major-axis orientation, radians in (-pi/2, pi/2]
};

/// Chi-square quantile with two degrees of freedom.
inline double chi2_quantile_2dof(double level) { return -2.0 * std::log1p(-level); }

/// Concentration ellipse of a 2-D cloud: semi-axes sqrt(lambda_i * q) along
/// the eigenvectors of the sample covariance, q the chi-square(2) quantile.
inline Ellipse confidence_ellipse(const Matrix& points2d, double level = 0.95) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  if (points2d.cols() != 2) fail(ErrorCode::InvalidArgument, "ellipse input must have two columns");
  const auto m = points2d.rows();
  if (m < 3) fail(ErrorCode::NotEnoughData, "an ellipse needs at least three points");
  if (!points2d.allFinite()) fail(ErrorCode::NonFiniteInput, "ellipse input has non-finite values");

  double mx = 0, my = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    mx += points2d(i, 0);
    my += points2d(i, 1);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, syy = 0, sxy = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double dx = points2d(i, 0) - mx, dy = points2d(i, 1) - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double denom = static_cast<double>(m - 1);
  sxx /= denom;
  syy /= denom;
  sxy /= denom;

  const double half_trace = 0.5 * (sxx + syy);
  const double radius = std::hypot(0.5 * (sxx - syy), sxy);
  const double major = half_trace + radius;
  const double minor = std::max(0.0, half_trace - radius);
  const double scale = 1.0 + mx * mx + my * my;
  if (major <= 1e-14 * scale) fail(ErrorCode::DegenerateCluster, "cluster points coincide");

  const double q = chi2_quantile_2dof(level);
  Ellipse e;
  e.center = {mx, my};
  e.semi_axes = {std::sqrt(major * q), std::sqrt(minor * q)};
  double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  if (angle <= -std::numbers::pi / 2) angle += std::numbers::pi;
  e.angle = angle;
  return e;
}

// --- cluster profiles -------------------------------------------------------------------

struct ClusterProfile {
  int label = 0;
  std::size_t size = 0;
  std::array<double, kVariableCount> means{};
  std::array<double, kVariableCount> gaps{};          // (cluster mean - global mean) / global sd
  std::array<std::size_t, kVariableCount> ranked{};   // variable indices by |gap|, descending
};

inline std::vector<ClusterProfile> cluster_profiles(const FeatureMatrix& fm, const std::vector<int>& labels) {
  if (labels.size() != fm.size()) fail(ErrorCode::LengthMismatch, "one label per session is required");
  if (fm.size() == 0) fail(ErrorCode::NotEnoughData, "no sessions to profile");
  const int k = *std::max_element(labels.begin(), labels.end());
  if (*std::min_element(labels.begin(), labels.end()) < 1) fail(ErrorCode::InvalidK, "labels must be 1..k");

  std::array<double, kVariableCount> global_mean{}, global_sd{};
  for (std::size_t j = 0; j < kVariableCount; ++j) {
    auto col = fm.column(j);
    global_mean[j] = mean_of(col);
    global_sd[j] = col.size() > 1 ? sample_sd(col, global_mean[j]) : 0.0;
  }

  std::vector<ClusterProfile> out(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) out[c].label = c + 1;
  for (std::size_t i = 0; i < fm.size(); ++i) {
    auto& p = out[labels[i] - 1];
    ++p.size;
    for (std::size_t j = 0; j < kVariableCount; ++j) p.means[j] += fm.rows[i][j];
  }
  for (auto& p : out) {
    if (p.size == 0) fail(ErrorCode::EmptyCluster, "cluster " + std::to_string(p.label) + " has no members");
    for (std::size_t j = 0; j < kVariableCount; ++j) {
      p.means[j] /= static_cast<double>(p.size);
      p.gaps[j] = global_sd[j] > 0.0 ? (p.means[j] - global_mean[j]) / global_sd[j] : 0.0;
    }
    std::iota(p.ranked.begin(), p.ranked.end(), 0);
    std::stable_sort(p.ranked.begin(), p.ranked.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(p.gaps[a]) > std::abs(p.gaps[b]); });
  }
  return out;
}

// --- full pipeline ----------------------------------------------------------------------

struct AnalyzeOptions {
  int k = 5;
  std::optional<int> components;  // nullopt: all components
  double level = 0.95;
};

struct ClusterEllipse {
  int label = 0;
  std::optional<Ellipse> ellipse;
  std::string note;  // reason when the ellipse is absent
};

struct TypologyReport {
  std::vector<std::string> session_ids;
  std::vector<std::string> variables;
  Standardized standardized;
  PcaResult pca;
  int components = 0;
  double level = 0.95;
  Dendrogram dendrogram;
  int k = 0;
  std::vector<int> labels;
  std::vector<ClusterProfile> profiles;
  std::vector<ClusterEllipse> ellipses;
};

inline std::vector<ClusterEllipse> cluster_ellipses(const Matrix& scores, const std::vector<int>& labels, int k,
                                                    double level) {
  std::vector<ClusterEllipse> out;
  for (int c = 1; c <= k; ++c) {
    std::vector<Eigen::Index> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(static_cast<Eigen::Index>(i));
    ClusterEllipse ce{c, std::nullopt, {}};
    if (scores.cols() < 2) {
      ce.note = "fewer than two principal components";
    } else {
      Matrix pts(static_cast<Eigen::Index>(members.size()), 2);
      for (std::size_t r = 0; r < members.size(); ++r) pts.row(r) = scores.row(members[r]).head(2);
      try {
        ce.ellipse = confidence_ellipse(pts, level);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotEnoughData && e.code() != ErrorCode::DegenerateCluster) throw;
        ce.note = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
    out.push_back(std::move(ce));
  }
  return out;
}

inline TypologyReport analyze(const FeatureMatrix& fm, const AnalyzeOptions& options = {}) {
  const auto n = fm.size();
  if (options.k < 1 || static_cast<std::size_t>(options.k) > n)
    fail(ErrorCode::InvalidK, "k = " + std::to_string(options.k) + " is outside 1.." + std::to_string(n));
  if (!(options.level > 0.0 && options.level < 1.0)) fail(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  const int p = static_cast<int>(kVariableCount);
  const int components = options.components.value_or(p);
  if (components < 1 || components > p)
    fail(ErrorCode::InvalidArgument, "components must be 'all' or 1.." + std::to_string(p));

  TypologyReport report;
  report.session_ids = fm.session_ids;
  report.variables.assign(kVariableNames.begin(), kVariableNames.end());
  report.standardized = standardize(fm);
  report.pca = pca(report.standardized.z);
  report.components = components;
  report.level = options.level;
  report.dendrogram = ward_cluster(report.pca.scores.leftCols(components));
  report.k = options.k;
  report.labels = cut(report.dendrogram, options.k);
  report.profiles = cluster_profiles(fm, report.labels);
  report.ellipses = cluster_ellipses(report.pca.scores, report.labels, options.k, options.level);
  return report;
}

}  // namespace sessiontypo
