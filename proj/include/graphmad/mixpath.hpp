// Copyright 2026 The GraphMAD Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graphmad/cvxclust.hpp"
#include "graphmad/error.hpp"

namespace graphmad {

/// Which endpoint the label path starts from. kEndpointConsistent puts the
/// branch's own class mix at lambda = 0 (where the data path is the original
/// data); kRateOnOrigin applies the rate as the weight on the lambda = 0 label.
enum class LabelOrientation { kEndpointConsistent, kRateOnOrigin };

inline std::string to_string(LabelOrientation o) {
  return o == LabelOrientation::kRateOnOrigin ? "paper" : "endpoint-consistent";
}

inline LabelOrientation parse_orientation(const std::string& s) {
  if (s == "paper") return LabelOrientation::kRateOnOrigin;
  if (s == "endpoint-consistent") return LabelOrientation::kEndpointConsistent;
  throw Error(ErrorCode::kConfig, "unknown label orientation '" + s + "'");
}

template <typename Scalar>
struct BranchSelection {
  Scalar lambda_star = Scalar(0);
  std::vector<std::vector<int>> index_sets;
  bool refined = false;       // lambda_star found by bisection between grid points
  bool split_fallback = false;  // cells were split to reach the requested count
};

namespace detail {

/// Two-means split of `cell` using the rows of `points`. Seeds are the member
/// farthest from the cell mean and the member farthest from that one.
template <typename Scalar>
std::pair<std::vector<int>, std::vector<int>> bisect_cell(const std::vector<int>& cell,
                                                          const RowMatrix<Scalar>& points) {
  const auto p = points.cols();
  Vector<Scalar> mean = Vector<Scalar>::Zero(p);
  for (int i : cell) mean += points.row(i).transpose();
  mean /= static_cast<Scalar>(cell.size());
  auto farthest_from = [&](const Vector<Scalar>& x) {
    int best = cell.front();
    Scalar best_d(-1);
    for (int i : cell) {
      const Scalar d = (points.row(i).transpose() - x).squaredNorm();
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return std::pair{best, best_d};
  };
  const int a = farthest_from(mean).first;
  const auto [b, spread] = farthest_from(points.row(a).transpose());
  if (spread <= Scalar(0)) return {{}, {}};

  Vector<Scalar> ca = points.row(a).transpose(), cb = points.row(b).transpose();
  std::vector<int> left, right;
  for (int it = 0; it < 100; ++it) {
    std::vector<int> l, r;
    for (int i : cell) {
      const auto x = points.row(i).transpose();
      ((x - ca).squaredNorm() <= (x - cb).squaredNorm() ? l : r).push_back(i);
    }
    if (l == left && r == right) break;
    left = std::move(l);
    right = std::move(r);
    if (left.empty() || right.empty()) break;
    ca.setZero();
    cb.setZero();
    for (int i : left) ca += points.row(i).transpose();
    for (int i : right) cb += points.row(i).transpose();
    ca /= static_cast<Scalar>(left.size());
    cb /= static_cast<Scalar>(right.size());
  }
  return {left, right};
}

}  // namespace detail

/// Picks the branching point: the smallest grid lambda with exactly K
/// clusters. Otherwise bisects between the bracketing grid points (up to 20
/// re-solves); failing that, takes the first grid point with at most K
/// clusters and splits its largest cell by two-means on the previous grid
/// point's centroids until K cells exist.
template <typename Scalar>
BranchSelection<Scalar> select_branch_lambda(const ClusterPath<Scalar>& path, int k) {
  const auto t_count = static_cast<int>(path.sample_count());
  if (k < 1 || k > t_count) {
    throw Error(ErrorCode::kConfig, "branch count " + std::to_string(k) + " outside [1, T]");
  }
  BranchSelection<Scalar> out;
  for (std::size_t m = 0; m < path.grid.size(); ++m) {
    if (path.cluster_counts[m] == k) {
      out.lambda_star = path.grid[m];
      out.index_sets = cells_of(path.assignments[m]);
      return out;
    }
  }
  std::size_t first_below = 0;
  while (path.cluster_counts[first_below] > k) ++first_below;
  if (first_below > 0) {
    Scalar lo = path.grid[first_below - 1], hi = path.grid[first_below];
    for (int it = 0; it < 20; ++it) {
      const Scalar mid = (lo + hi) / Scalar(2);
      auto [u, cells] = centroids_at(path.descriptors, path.weights, mid, path.options, path.fuse_threshold);
      const int count = cell_count(cells);
      if (count == k) {
        out.lambda_star = mid;
        out.index_sets = cells_of(cells);
        out.refined = true;
        return out;
      }
      (count > k ? lo : hi) = mid;
    }
  }

  out.lambda_star = path.grid[first_below];
  out.split_fallback = true;
  out.index_sets = cells_of(path.assignments[first_below]);
  const auto& previous = path.centroids[first_below > 0 ? first_below - 1 : 0];
  while (static_cast<int>(out.index_sets.size()) < k) {
    auto largest = std::max_element(out.index_sets.begin(), out.index_sets.end(),
                                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    auto [left, right] = detail::bisect_cell(*largest, previous);
    if (left.empty() || right.empty()) std::tie(left, right) = detail::bisect_cell(*largest, path.descriptors);
    if (left.empty() || right.empty()) {
      // Indistinguishable members: split by index.
      const auto half = static_cast<std::ptrdiff_t>(largest->size() / 2);
      left.assign(largest->begin(), largest->begin() + half);
      right.assign(largest->begin() + half, largest->end());
    }
    *largest = std::move(left);
    out.index_sets.push_back(std::move(right));
  }
  for (auto& s : out.index_sets) std::sort(s.begin(), s.end());
  std::sort(out.index_sets.begin(), out.index_sets.end());
  return out;
}

/// K branch trajectories obtained by averaging the per-sample paths within
/// each index set, plus the label anchors at both ends.
template <typename Scalar>
struct ExtendedClusterPath {
  LambdaGrid<Scalar> grid;
  Scalar lambda_star = Scalar(0);
  std::vector<std::vector<int>> index_sets;
  // trajectories[k] holds one row per grid point.
  std::vector<RowMatrix<Scalar>> trajectories;
  std::vector<Vector<Scalar>> origin_labels;
  std::vector<Vector<Scalar>> fusion_labels;

  std::size_t branch_count() const { return index_sets.size(); }
};

template <typename Scalar>
ExtendedClusterPath<Scalar> collapse_branches(const ClusterPath<Scalar>& path,
                                              const std::vector<std::vector<int>>& index_sets,
                                              const std::vector<int>& classes, int class_count,
                                              Scalar lambda_star = Scalar(0)) {
  const auto t_count = path.sample_count();
  if (classes.size() != t_count) throw Error(ErrorCode::kShape, "label count does not match samples");
  std::vector<int> owner(t_count, -1);
  for (std::size_t k = 0; k < index_sets.size(); ++k) {
    if (index_sets[k].empty()) throw Error(ErrorCode::kPartition, "empty index set");
    for (int i : index_sets[k]) {
      if (i < 0 || static_cast<std::size_t>(i) >= t_count || owner[static_cast<std::size_t>(i)] >= 0) {
        throw Error(ErrorCode::kPartition, "index sets must be disjoint sample indices");
      }
      owner[static_cast<std::size_t>(i)] = static_cast<int>(k);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
    throw Error(ErrorCode::kPartition, "index sets do not cover every sample");
  }

  ExtendedClusterPath<Scalar> ext;
  ext.grid = path.grid;
  ext.lambda_star = lambda_star;
  ext.index_sets = index_sets;
  Vector<Scalar> global = Vector<Scalar>::Zero(class_count);
  for (int c : classes) global(c) += Scalar(1);
  global /= static_cast<Scalar>(t_count);

  const auto p = path.descriptors.cols();
  for (const auto& set : index_sets) {
    RowMatrix<Scalar> traj(static_cast<Eigen::Index>(path.grid.size()), p);
    for (std::size_t m = 0; m < path.grid.size(); ++m) {
      const auto& u = path.centroids[m];
      const bool fused = std::all_of(set.begin(), set.end(), [&](int i) { return u.row(i) == u.row(set.front()); });
      if (fused) {
        // Keeps fused branches bit-identical to their shared centroid.
        traj.row(static_cast<Eigen::Index>(m)) = u.row(set.front());
        continue;
      }
      Vector<Scalar> acc = Vector<Scalar>::Zero(p);
      for (int i : set) acc += u.row(i).transpose();
      traj.row(static_cast<Eigen::Index>(m)) = (acc / static_cast<Scalar>(set.size())).transpose();
    }
    ext.trajectories.push_back(std::move(traj));
    Vector<Scalar> origin = Vector<Scalar>::Zero(class_count);
    for (int i : set) origin(classes[static_cast<std::size_t>(i)]) += Scalar(1);
    ext.origin_labels.push_back(origin / static_cast<Scalar>(set.size()));
    ext.fusion_labels.push_back(global);
  }
  return ext;
}

/// Normalized progress of a branch from its origin to the fusion point,
/// measured through squared norms. Returns the clamped value and reports
/// through `clamped` whether clamping was needed.
template <typename Scalar>
Scalar rate_from_norms(Scalar norm0, Scalar norm1, Scalar norm_at, Scalar lambda, bool* clamped = nullptr) {
  const Scalar denom = norm1 - norm0;
  if (std::abs(denom) < Scalar(1e-12)) return lambda;
  const Scalar g = (norm_at - norm0) / denom;
  const Scalar c = std::clamp(g, Scalar(0), Scalar(1));
  if (clamped != nullptr && c != g) *clamped = true;
  return c;
}

template <typename Scalar>
struct RateCurve {
  std::vector<Scalar> values;
  bool clamped = false;
};

/// g_cp on every grid point of one branch trajectory. Endpoints are pinned to
/// 0 and 1.
template <typename Scalar>
RateCurve<Scalar> compute_rate(const RowMatrix<Scalar>& trajectory, const LambdaGrid<Scalar>& grid) {
  if (static_cast<std::size_t>(trajectory.rows()) != grid.size()) {
    throw Error(ErrorCode::kShape, "trajectory does not cover the grid");
  }
  const auto last = trajectory.rows() - 1;
  const Scalar n0 = trajectory.row(0).squaredNorm();
  const Scalar n1 = trajectory.row(last).squaredNorm();
  RateCurve<Scalar> curve;
  curve.values.resize(grid.size());
  for (Eigen::Index m = 0; m <= last; ++m) {
    curve.values[static_cast<std::size_t>(m)] =
        rate_from_norms(n0, n1, trajectory.row(m).squaredNorm(), grid[static_cast<std::size_t>(m)], &curve.clamped);
  }
  curve.values.front() = Scalar(0);
  curve.values.back() = Scalar(1);
  return curve;
}

/// weight * y0 + (1 - weight) * y1.
template <typename Scalar>
Vector<Scalar> label_at(const Vector<Scalar>& y0, const Vector<Scalar>& y1, Scalar weight) {
  return weight * y0 + (Scalar(1) - weight) * y1;
}

/// Weight placed on the lambda = 0 anchor for a given rate value.
template <typename Scalar>
Scalar origin_weight(Scalar rate, LabelOrientation orientation) {
  return orientation == LabelOrientation::kRateOnOrigin ? rate : Scalar(1) - rate;
}

template <typename Scalar>
struct LabelPath {
  LabelOrientation orientation = LabelOrientation::kEndpointConsistent;
  std::vector<RateCurve<Scalar>> rates;
  // labels[k][m]: soft label of branch k at grid point m.
  std::vector<std::vector<Vector<Scalar>>> labels;
};

template <typename Scalar>
LabelPath<Scalar> build_label_paths(const ExtendedClusterPath<Scalar>& ext, LabelOrientation orientation) {
  LabelPath<Scalar> lp;
  lp.orientation = orientation;
  for (std::size_t k = 0; k < ext.branch_count(); ++k) {
    auto curve = compute_rate(ext.trajectories[k], ext.grid);
    std::vector<Vector<Scalar>> labels;
    for (auto g : curve.values) {
      labels.push_back(label_at(ext.origin_labels[k], ext.fusion_labels[k], origin_weight(g, orientation)));
    }
    lp.rates.push_back(std::move(curve));
    lp.labels.push_back(std::move(labels));
  }
  return lp;
}

/// Branch position at any lambda in [0, 1], piecewise linear between grid
/// points and clipped to the segment's endpoint range.
template <typename Scalar>
Vector<Scalar> interpolate(const RowMatrix<Scalar>& trajectory, const LambdaGrid<Scalar>& grid, Scalar lambda) {
  lambda = std::clamp(lambda, Scalar(0), Scalar(1));
  auto it = std::upper_bound(grid.values.begin(), grid.values.end(), lambda);
  if (it == grid.values.end()) return trajectory.row(trajectory.rows() - 1).transpose();
  const auto hi = static_cast<Eigen::Index>(it - grid.values.begin());
  const auto lo = hi - 1;
  const Scalar t = (lambda - grid.values[static_cast<std::size_t>(lo)]) /
                   (grid.values[static_cast<std::size_t>(hi)] - grid.values[static_cast<std::size_t>(lo)]);
  const Vector<Scalar> a = trajectory.row(lo).transpose();
  const Vector<Scalar> b = trajectory.row(hi).transpose();
  Vector<Scalar> x = a + t * (b - a);
  return x.cwiseMax(a.cwiseMin(b)).cwiseMin(a.cwiseMax(b));
}

/// g_cp at an arbitrary lambda, from the interpolated branch position.
template <typename Scalar>
Scalar rate_at(const RowMatrix<Scalar>& trajectory, const LambdaGrid<Scalar>& grid, Scalar lambda) {
  if (lambda <= Scalar(0)) return Scalar(0);
  if (lambda >= Scalar(1)) return Scalar(1);
  return rate_from_norms(trajectory.row(0).squaredNorm(), trajectory.row(trajectory.rows() - 1).squaredNorm(),
                         interpolate(trajectory, grid, lambda).squaredNorm(), lambda);
}

template <typename Scalar>
nlohmann::json to_json(const ExtendedClusterPath<Scalar>& ext, const LabelPath<Scalar>& labels,
                       bool include_trajectories) {
  auto vec = [](const Vector<Scalar>& v) {
    std::vector<double> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(v(i));
    return out;
  };
  nlohmann::json j;
  j["lambda_star"] = static_cast<double>(ext.lambda_star);
  j["index_sets"] = ext.index_sets;
  j["label_orientation"] = to_string(labels.orientation);
  j["grid"] = nlohmann::json::array();
  for (auto v : ext.grid.values) j["grid"].push_back(static_cast<double>(v));
  j["branches"] = nlohmann::json::array();
  for (std::size_t k = 0; k < ext.branch_count(); ++k) {
    nlohmann::json b;
    b["index_set"] = ext.index_sets[k];
    b["origin_label"] = vec(ext.origin_labels[k]);
    b["fusion_label"] = vec(ext.fusion_labels[k]);
    std::vector<double> g;
    for (auto v : labels.rates[k].values) g.push_back(static_cast<double>(v));
    b["g_cp"] = g;
    b["g_cp_clamped"] = labels.rates[k].clamped;
    nlohmann::json lab = nlohmann::json::array();
    for (const auto& y : labels.labels[k]) lab.push_back(vec(y));
    b["labels"] = std::move(lab);
    if (include_trajectories) b["trajectory"] = matrix_to_json(ext.trajectories[k]);
    j["branches"].push_back(std::move(b));
  }
  return j;
}

}  // namespace graphmad
