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
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graphmad/error.hpp"
#include "graphmad/graphon.hpp"
#include "graphmad/maxflow.hpp"
#include "graphmad/parallel.hpp"

namespace graphmad {

/// Pairwise fusion weights: 1 between samples of the same class, epsilon
/// across classes, 0 on the diagonal. An explicit matrix can be supplied
/// instead (for testing or alternative weightings); it must be symmetric,
/// nonnegative and zero on the diagonal.
template <typename Scalar>
class FusionWeights {
 public:
  FusionWeights() = default;

  static FusionWeights from_labels(std::vector<int> classes, Scalar epsilon) {
    if (!(epsilon > Scalar(0) && epsilon < Scalar(1))) {
      throw Error(ErrorCode::kConfig, "epsilon must lie in (0, 1)");
    }
    FusionWeights w;
    w.classes_ = std::move(classes);
    w.epsilon_ = epsilon;
    return w;
  }

  static FusionWeights from_matrix(Matrix<Scalar> m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::kShape, "weight matrix must be square");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, i) != Scalar(0)) throw Error(ErrorCode::kValidity, "weight diagonal must be zero");
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) < Scalar(0) || m(i, j) != m(j, i)) {
          throw Error(ErrorCode::kValidity, "weights must be symmetric and nonnegative");
        }
      }
    }
    FusionWeights w;
    w.size_ = m.rows();
    w.custom_ = std::move(m);
    return w;
  }

  Eigen::Index size() const {
    return custom_ ? size_ : static_cast<Eigen::Index>(classes_.size());
  }
  Scalar epsilon() const { return epsilon_; }
  bool has_classes() const { return !custom_.has_value(); }
  const std::vector<int>& classes() const { return classes_; }

  Scalar operator()(Eigen::Index i, Eigen::Index j) const {
    if (custom_) return (*custom_)(i, j);
    if (i == j) return Scalar(0);
    return classes_[static_cast<std::size_t>(i)] == classes_[static_cast<std::size_t>(j)]
               ? Scalar(1)
               : epsilon_;
  }

  Matrix<Scalar> dense() const {
    const auto t = size();
    Matrix<Scalar> m(t, t);
    for (Eigen::Index i = 0; i < t; ++i) {
      for (Eigen::Index j = 0; j < t; ++j) m(i, j) = (*this)(i, j);
    }
    return m;
  }

 private:
  std::vector<int> classes_;
  Scalar epsilon_ = Scalar(0);
  Eigen::Index size_ = 0;
  std::optional<Matrix<Scalar>> custom_;
};

template <typename Scalar = double>
FusionWeights<Scalar> build_weights(const std::vector<int>& classes, Scalar epsilon) {
  return FusionWeights<Scalar>::from_labels(classes, epsilon);
}

/// Mixup-parameter grid. Always starts at 0 and ends at the analytic
/// total-fusion point 1.
template <typename Scalar>
struct LambdaGrid {
  std::vector<Scalar> values;

  /// `interior_points` values uniform on [0, upper], then 1.
  static LambdaGrid uniform(int interior_points, Scalar upper = Scalar(0.99)) {
    if (interior_points < 1) throw Error(ErrorCode::kConfig, "grid size must be >= 1");
    if (!(upper >= Scalar(0) && upper < Scalar(1))) {
      throw Error(ErrorCode::kConfig, "grid upper bound must lie in [0, 1)");
    }
    LambdaGrid g;
    for (int m = 0; m < interior_points; ++m) {
      g.values.push_back(interior_points == 1
                             ? Scalar(0)
                             : upper * static_cast<Scalar>(m) /
                                   static_cast<Scalar>(interior_points - 1));
    }
    g.values.push_back(Scalar(1));
    g.validate();
    return g;
  }

  void validate() const {
    if (values.size() < 2 || values.front() != Scalar(0) || values.back() != Scalar(1)) {
      throw Error(ErrorCode::kConfig, "grid must start at 0 and end at 1");
    }
    for (std::size_t m = 1; m < values.size(); ++m) {
      if (!(values[m] > values[m - 1])) {
        throw Error(ErrorCode::kConfig, "grid must be strictly increasing");
      }
    }
  }

  std::size_t size() const { return values.size(); }
  Scalar operator[](std::size_t m) const { return values[m]; }
};

/// Fusion scale attached to a mixup parameter: lambda / (1 - lambda).
template <typename Scalar>
Scalar fusion_scale(Scalar lambda) {
  return lambda / (Scalar(1) - lambda);
}

struct SolverOptions {
  double tol = 1e-6;
  // Upper bound on min-cut evaluations per coordinate.
  std::size_t max_iterations = 10000;
  // Certify each solution against the stationarity residual.
  bool verify = true;
};

/// sum_i ||u_i - theta_i||^2 + gamma * sum_{i<j} w_ij ||u_i - u_j||_1.
template <typename Scalar>
Scalar fusion_objective(const RowMatrix<Scalar>& theta, const FusionWeights<Scalar>& w,
                        Scalar lambda, const RowMatrix<Scalar>& u) {
  const Scalar gamma = fusion_scale(lambda);
  Scalar f = (u - theta).squaredNorm();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < u.rows(); ++j) {
      f += gamma * w(i, j) * (u.row(i) - u.row(j)).cwiseAbs().sum();
    }
  }
  return f;
}

namespace detail {

/// Exact minimizer of the scalar problem
///   sum_i (u_i - theta_i)^2 + gamma * sum_{i<j} w_ij |u_i - u_j|
/// by divide and conquer over level sets. For a block V whose outside
/// neighbours are already known to sit above or below it, `pull[i]` holds
/// sum_{j below} w_ij - sum_{j above} w_ij. The block's all-fused value t
/// zeroes the summed derivative; a minimum cut of
///   E(S) = sum_{i in S} f_i'(t) + gamma * w(S, V \ S)
/// either certifies that V is fused at t (min E = 0) or returns the members
/// strictly above t, and both halves recurse with the cut edges folded into
/// `pull`. Fused members receive bit-identical values.
template <typename Scalar>
Vector<Scalar> solve_scalar(const Vector<Scalar>& theta, const FusionWeights<Scalar>& w,
                            Scalar gamma, std::size_t max_cuts) {
  const auto t_count = theta.size();
  Vector<Scalar> u(t_count);
  std::vector<Scalar> pull(static_cast<std::size_t>(t_count), Scalar(0));
  std::vector<std::vector<Eigen::Index>> stack;
  stack.emplace_back(t_count);
  std::iota(stack.back().begin(), stack.back().end(), Eigen::Index(0));
  const Scalar slack_scale = std::sqrt(std::numeric_limits<Scalar>::epsilon()) * Scalar(1e-2);
  std::size_t cuts = 0;
  std::vector<Scalar> deriv;

  while (!stack.empty()) {
    std::vector<Eigen::Index> block = std::move(stack.back());
    stack.pop_back();
    const auto m = static_cast<Eigen::Index>(block.size());
    Scalar sum_theta(0), sum_pull(0);
    for (auto i : block) {
      sum_theta += theta(i);
      sum_pull += pull[static_cast<std::size_t>(i)];
    }
    const Scalar t = (sum_theta - gamma * sum_pull / Scalar(2)) / static_cast<Scalar>(m);
    auto fuse = [&] {
      for (auto i : block) u(i) = t;
    };
    if (m == 1) {
      fuse();
      continue;
    }
    deriv.resize(static_cast<std::size_t>(m));
    Scalar excess(0);
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto i = block[static_cast<std::size_t>(k)];
      deriv[static_cast<std::size_t>(k)] =
          Scalar(2) * (t - theta(i)) + gamma * pull[static_cast<std::size_t>(i)];
      excess += std::max(Scalar(0), -deriv[static_cast<std::size_t>(k)]);
    }
    const Scalar slack = slack_scale * (Scalar(1) + excess);
    if (excess <= slack) {
      fuse();
      continue;
    }
    if (++cuts > max_cuts) {
      throw SolverError("min-cut budget exhausted", static_cast<double>(excess));
    }

    std::vector<bool> above(static_cast<std::size_t>(m), false);
    if (m == 2) {
      const Scalar link = gamma * w(block[0], block[1]);
      if (excess <= link + slack) {
        fuse();
        continue;
      }
      above[deriv[0] < Scalar(0) ? 0 : 1] = true;
    } else {
      const Eigen::Index source = m, sink = m + 1;
      DenseMaxFlow<Scalar> flow(m + 2);
      for (Eigen::Index a = 0; a < m; ++a) {
        const Scalar da = deriv[static_cast<std::size_t>(a)];
        if (da < Scalar(0)) flow.add_edge(source, a, -da);
        if (da > Scalar(0)) flow.add_edge(a, sink, da);
        for (Eigen::Index b = a + 1; b < m; ++b) {
          const Scalar c = gamma * w(block[static_cast<std::size_t>(a)],
                                     block[static_cast<std::size_t>(b)]);
          if (c > Scalar(0)) flow.add_undirected(a, b, c);
        }
      }
      const Scalar cut = flow.solve(source, sink);
      if (cut >= excess - slack) {
        fuse();
        continue;
      }
      const auto side = flow.source_side();
      for (Eigen::Index a = 0; a < m; ++a) above[static_cast<std::size_t>(a)] = side[static_cast<std::size_t>(a)];
    }

    std::vector<Eigen::Index> upper, lower;
    for (Eigen::Index a = 0; a < m; ++a) {
      (above[static_cast<std::size_t>(a)] ? upper : lower).push_back(block[static_cast<std::size_t>(a)]);
    }
    if (upper.empty() || lower.empty()) {
      // Round-off made the cut degenerate; the block is fused to within slack.
      fuse();
      continue;
    }
    for (auto i : upper) {
      for (auto j : lower) {
        const Scalar wij = w(i, j);
        pull[static_cast<std::size_t>(i)] += wij;
        pull[static_cast<std::size_t>(j)] -= wij;
      }
    }
    stack.push_back(std::move(lower));
    stack.push_back(std::move(upper));
  }
  // The exact minimizer lies in [min theta, max theta]; clip round-off.
  if (t_count > 0) u = u.cwiseMax(theta.minCoeff()).cwiseMin(theta.maxCoeff());
  return u;
}

/// Per-sample stationarity terms with every strictly ordered pair resolved:
/// 2 (u_i - theta_i) + gamma * sum_{j : u_j != u_i} w_ij sign(u_i - u_j).
template <typename Scalar>
std::vector<Scalar> resolved_gradient(const Vector<Scalar>& theta, const Vector<Scalar>& u,
                                      const FusionWeights<Scalar>& w, Scalar gamma) {
  const auto t_count = theta.size();
  std::vector<Scalar> d(static_cast<std::size_t>(t_count));
  for (Eigen::Index i = 0; i < t_count; ++i) {
    Scalar s(0);
    for (Eigen::Index j = 0; j < t_count; ++j) {
      if (u(j) < u(i)) {
        s += w(i, j);
      } else if (u(j) > u(i)) {
        s -= w(i, j);
      }
    }
    d[static_cast<std::size_t>(i)] = Scalar(2) * (u(i) - theta(i)) + gamma * s;
  }
  return d;
}

/// Whether a tied group admits subgradient selections s_ij in [-1, 1]
/// (antisymmetric) leaving every member residual within `r`. Flow on the
/// group plus a hub node: pair edges carry gamma * w_ij, hub edges carry r.
template <typename Scalar>
bool group_feasible(const std::vector<Eigen::Index>& members, const std::vector<Scalar>& d,
                    const FusionWeights<Scalar>& w, Scalar gamma, Scalar r) {
  const auto m = static_cast<Eigen::Index>(members.size());
  const Eigen::Index hub = m, source = m + 1, sink = m + 2;
  DenseMaxFlow<Scalar> flow(m + 3);
  Scalar demand(0), total(0);
  auto attach = [&](Eigen::Index node, Scalar outflow) {
    if (outflow > Scalar(0)) {
      flow.add_edge(source, node, outflow);
      demand += outflow;
    } else if (outflow < Scalar(0)) {
      flow.add_edge(node, sink, -outflow);
    }
  };
  for (Eigen::Index a = 0; a < m; ++a) {
    const Scalar da = d[static_cast<std::size_t>(members[static_cast<std::size_t>(a)])];
    attach(a, -da);
    total += da;
    if (r > Scalar(0)) flow.add_undirected(a, hub, r);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const Scalar c = gamma * w(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
      if (c > Scalar(0)) flow.add_undirected(a, b, c);
    }
  }
  attach(hub, total);
  const Scalar pushed = flow.solve(source, sink);
  const Scalar slack = std::sqrt(std::numeric_limits<Scalar>::epsilon()) * Scalar(1e-3) * (Scalar(1) + demand);
  return pushed >= demand - slack;
}

/// Tied groups (bit-identical values) of one coordinate, by sorting.
template <typename Scalar>
std::vector<std::vector<Eigen::Index>> tied_groups(const Vector<Scalar>& u) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(u.size()));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return u(a) < u(b); });
  std::vector<std::vector<Eigen::Index>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || u(order[k]) != u(order[k - 1])) groups.emplace_back();
    groups.back().push_back(order[k]);
  }
  return groups;
}

/// Smallest achievable max-residual for one coordinate (bisection per group).
template <typename Scalar>
Scalar coordinate_residual(const Vector<Scalar>& theta, const Vector<Scalar>& u,
                           const FusionWeights<Scalar>& w, Scalar gamma) {
  const auto d = resolved_gradient(theta, u, w, gamma);
  Scalar worst(0);
  for (const auto& group : tied_groups(u)) {
    Scalar hi(0), sum(0);
    for (auto i : group) {
      hi = std::max(hi, std::abs(d[static_cast<std::size_t>(i)]));
      sum += d[static_cast<std::size_t>(i)];
    }
    if (group.size() == 1) {
      worst = std::max(worst, hi);
      continue;
    }
    Scalar lo = std::abs(sum) / static_cast<Scalar>(group.size());
    if (hi <= worst) continue;
    if (group_feasible(group, d, w, gamma, lo)) {
      worst = std::max(worst, lo);
      continue;
    }
    for (int it = 0; it < 100 && hi - lo > std::numeric_limits<Scalar>::epsilon() * Scalar(64) * (Scalar(1) + hi); ++it) {
      const Scalar mid = (lo + hi) / Scalar(2);
      (group_feasible(group, d, w, gamma, mid) ? hi : lo) = mid;
    }
    worst = std::max(worst, hi);
  }
  return worst;
}

/// Whether the residual of one coordinate is at most `bound` (one flow per group).
template <typename Scalar>
bool coordinate_residual_within(const Vector<Scalar>& theta, const Vector<Scalar>& u,
                                const FusionWeights<Scalar>& w, Scalar gamma, Scalar bound) {
  const auto d = resolved_gradient(theta, u, w, gamma);
  for (const auto& group : tied_groups(u)) {
    if (group.size() == 1) {
      if (std::abs(d[static_cast<std::size_t>(group[0])]) > bound) return false;
    } else if (!group_feasible(group, d, w, gamma, bound)) {
      return false;
    }
  }
  return true;
}

/// Maps each column to the first column with identical contents.
template <typename Scalar>
std::vector<Eigen::Index> column_representatives(const RowMatrix<Scalar>& x) {
  std::vector<Eigen::Index> rep(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    rep[static_cast<std::size_t>(c)] = c;
    for (Eigen::Index k = 0; k < c; ++k) {
      if (rep[static_cast<std::size_t>(k)] == k && x.col(k) == x.col(c)) {
        rep[static_cast<std::size_t>(c)] = k;
        break;
      }
    }
  }
  return rep;
}

}  // namespace detail

/// Stationarity residual of the fusion objective at `centroids`: the
/// max over samples and coordinates of |2 (u - theta) + gamma * sum_j w_ij s_ij|
/// with s_ij = sign(u_i - u_j) for distinct values and s_ij in [-1, 1]
/// chosen optimally (jointly per tied group) for bit-identical values.
template <typename Scalar>
Scalar optimality_residual(const RowMatrix<Scalar>& theta, const FusionWeights<Scalar>& w,
                           Scalar lambda, const RowMatrix<Scalar>& centroids) {
  if (theta.rows() != centroids.rows() || theta.cols() != centroids.cols() ||
      theta.rows() != w.size()) {
    throw Error(ErrorCode::kShape, "residual: inconsistent shapes");
  }
  const Scalar gamma = fusion_scale(lambda);
  std::vector<Scalar> per_column(static_cast<std::size_t>(theta.cols()), Scalar(0));
  parallel_for(static_cast<std::size_t>(theta.cols()), [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    per_column[c] = detail::coordinate_residual<Scalar>(theta.col(col), centroids.col(col), w, gamma);
  });
  Scalar worst(0);
  for (auto r : per_column) worst = std::max(worst, r);
  return worst;
}

/// Minimizer of the fusion objective at one lambda in (0, 1). The objective
/// separates over coordinates; identical descriptor columns are solved once.
template <typename Scalar>
RowMatrix<Scalar> solve_at(const RowMatrix<Scalar>& theta, const FusionWeights<Scalar>& w,
                           Scalar lambda, const SolverOptions& options = {}) {
  if (!(lambda > Scalar(0) && lambda < Scalar(1))) {
    throw Error(ErrorCode::kConfig, "solve_at needs lambda in (0, 1)");
  }
  if (theta.rows() != w.size()) throw Error(ErrorCode::kShape, "weights do not match sample count");
  if (!theta.allFinite()) throw Error(ErrorCode::kValidity, "descriptors must be finite");

  const Scalar gamma = fusion_scale(lambda);
  const Scalar bound = static_cast<Scalar>(options.tol) *
                       (Scalar(1) + (theta.size() ? theta.cwiseAbs().maxCoeff() : Scalar(0)));
  const auto rep = detail::column_representatives(theta);
  std::vector<Eigen::Index> unique_cols;
  for (Eigen::Index c = 0; c < theta.cols(); ++c) {
    if (rep[static_cast<std::size_t>(c)] == c) unique_cols.push_back(c);
  }

  RowMatrix<Scalar> u(theta.rows(), theta.cols());
  Matrix<Scalar> solved(theta.rows(), static_cast<Eigen::Index>(unique_cols.size()));
  parallel_for(unique_cols.size(), [&](std::size_t k) {
    const Vector<Scalar> col = theta.col(unique_cols[k]);
    Vector<Scalar> sol = detail::solve_scalar(col, w, gamma, options.max_iterations);
    if (options.verify && !detail::coordinate_residual_within(col, sol, w, gamma, bound)) {
      const Scalar r = detail::coordinate_residual(col, sol, w, gamma);
      throw SolverError("stationarity residual " + std::to_string(static_cast<double>(r)) +
                            " above tolerance at lambda " + std::to_string(static_cast<double>(lambda)),
                        static_cast<double>(r));
    }
    solved.col(static_cast<Eigen::Index>(k)) = sol;
  });
  for (std::size_t k = 0; k < unique_cols.size(); ++k) {
    u.col(unique_cols[k]) = solved.col(static_cast<Eigen::Index>(k));
  }
  for (Eigen::Index c = 0; c < theta.cols(); ++c) {
    const auto r = rep[static_cast<std::size_t>(c)];
    if (r != c) u.col(c) = u.col(r);
  }
  return u;
}

/// Cell id per sample; cells are numbered by first appearance.
using Partition = std::vector<int>;

inline int cell_count(const Partition& p) {
  return p.empty() ? 0 : *std::max_element(p.begin(), p.end()) + 1;
}

inline std::vector<std::vector<int>> cells_of(const Partition& p) {
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(cell_count(p)));
  for (std::size_t i = 0; i < p.size(); ++i) cells[static_cast<std::size_t>(p[i])].push_back(static_cast<int>(i));
  return cells;
}

/// Connected components of the graph linking samples whose centroids are
/// within `threshold` in max-norm.
template <typename Scalar>
Partition fuse_components(const RowMatrix<Scalar>& u, Scalar threshold) {
  const auto t_count = u.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(t_count));
  std::iota(parent.begin(), parent.end(), Eigen::Index(0));
  auto find = [&](Eigen::Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (Eigen::Index i = 0; i < t_count; ++i) {
    for (Eigen::Index j = i + 1; j < t_count; ++j) {
      if (find(i) == find(j)) continue;
      bool close = true;
      for (Eigen::Index c = 0; c < u.cols() && close; ++c) close = std::abs(u(i, c) - u(j, c)) <= threshold;
      if (close) parent[static_cast<std::size_t>(find(j))] = find(i);
    }
  }
  Partition p(static_cast<std::size_t>(t_count), -1);
  std::vector<int> label(static_cast<std::size_t>(t_count), -1);
  int next = 0;
  for (Eigen::Index i = 0; i < t_count; ++i) {
    auto& l = label[static_cast<std::size_t>(find(i))];
    if (l < 0) l = next++;
    p[static_cast<std::size_t>(i)] = l;
  }
  return p;
}

struct FusionEvent {
  std::size_t grid_index = 0;
  double lambda = 0.0;
  // Cells of the previous grid point that merged into one.
  std::vector<std::vector<int>> merged;
};

struct TraceOptions {
  SolverOptions solver;
  // Fusion threshold relative to the descriptor range.
  double delta_fuse = 1e-4;
};

/// Centroid trajectories over a lambda grid with cluster assignments.
template <typename Scalar>
struct ClusterPath {
  LambdaGrid<Scalar> grid;
  std::vector<RowMatrix<Scalar>> centroids;
  std::vector<Partition> assignments;
  std::vector<int> cluster_counts;
  std::vector<FusionEvent> fusion_events;
  // Grid indices where the cluster count went up.
  std::vector<std::size_t> count_increases;

  // Problem data, kept so callers can re-solve between grid points.
  RowMatrix<Scalar> descriptors;
  FusionWeights<Scalar> weights;
  TraceOptions options;
  Scalar fuse_threshold = Scalar(0);

  std::size_t sample_count() const { return static_cast<std::size_t>(descriptors.rows()); }
};

/// Absolute fusion threshold: delta_fuse scaled by the descriptor range.
template <typename Scalar>
Scalar fuse_threshold(const RowMatrix<Scalar>& theta, double delta_fuse) {
  if (theta.size() == 0) return static_cast<Scalar>(delta_fuse);
  const Scalar range = theta.maxCoeff() - theta.minCoeff();
  return static_cast<Scalar>(delta_fuse) * (range > Scalar(0) ? range : Scalar(1));
}

/// Replaces each multi-member cell by its mean centroid.
template <typename Scalar>
void snap_cells(RowMatrix<Scalar>& u, const Partition& p) {
  for (const auto& cell : cells_of(p)) {
    if (cell.size() < 2) continue;
    Vector<Scalar> mean = Vector<Scalar>::Zero(u.cols());
    for (int i : cell) mean += u.row(i).transpose();
    mean /= static_cast<Scalar>(cell.size());
    for (int i : cell) u.row(i) = mean.transpose();
  }
}

/// Centroids and assignment at a single lambda, endpoints included.
template <typename Scalar>
std::pair<RowMatrix<Scalar>, Partition> centroids_at(const RowMatrix<Scalar>& theta,
                                                     const FusionWeights<Scalar>& w, Scalar lambda,
                                                     const TraceOptions& options,
                                                     Scalar threshold) {
  RowMatrix<Scalar> u;
  if (lambda == Scalar(0)) {
    u = theta;
  } else if (lambda == Scalar(1)) {
    const RowMatrix<Scalar> mean = theta.colwise().mean();
    u = mean.replicate(theta.rows(), 1);
  } else {
    u = solve_at(theta, w, lambda, options.solver);
  }
  Partition p = fuse_components(u, threshold);
  if (lambda != Scalar(0) && lambda != Scalar(1)) snap_cells(u, p);
  return {std::move(u), std::move(p)};
}

/// Solves the fusion problem along `grid` in increasing lambda. lambda = 0
/// copies the descriptors and lambda = 1 is the grand mean; interior points
/// are solved exactly per coordinate.
template <typename Scalar>
ClusterPath<Scalar> trace_clusterpath(const RowMatrix<Scalar>& theta, const FusionWeights<Scalar>& w,
                                      const LambdaGrid<Scalar>& grid, const TraceOptions& options = {}) {
  grid.validate();
  if (theta.rows() < 1) throw Error(ErrorCode::kShape, "no descriptors");
  ClusterPath<Scalar> path;
  path.grid = grid;
  path.descriptors = theta;
  path.weights = w;
  path.options = options;
  path.fuse_threshold = fuse_threshold(theta, options.delta_fuse);

  for (std::size_t m = 0; m < grid.size(); ++m) {
    const Scalar lambda = grid[m];
    std::pair<RowMatrix<Scalar>, Partition> step;
    try {
      step = centroids_at(theta, w, lambda, options, path.fuse_threshold);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (grid point " + std::to_string(m) + ", lambda " +
                            std::to_string(static_cast<double>(lambda)) + ")",
                        e.residual());
    }
    const int count = cell_count(step.second);
    if (m > 0) {
      const Partition& prev = path.assignments.back();
      if (count > path.cluster_counts.back()) path.count_increases.push_back(m);
      for (const auto& cell : cells_of(step.second)) {
        std::vector<int> prev_ids;
        for (int i : cell) prev_ids.push_back(prev[static_cast<std::size_t>(i)]);
        std::sort(prev_ids.begin(), prev_ids.end());
        prev_ids.erase(std::unique(prev_ids.begin(), prev_ids.end()), prev_ids.end());
        if (prev_ids.size() < 2) continue;
        const auto prev_cells = cells_of(prev);
        FusionEvent ev{m, static_cast<double>(lambda), {}};
        for (int id : prev_ids) ev.merged.push_back(prev_cells[static_cast<std::size_t>(id)]);
        path.fusion_events.push_back(std::move(ev));
      }
    }
    path.centroids.push_back(std::move(step.first));
    path.assignments.push_back(std::move(step.second));
    path.cluster_counts.push_back(count);
  }
  return path;
}

template <typename Scalar>
nlohmann::json matrix_to_json(const RowMatrix<Scalar>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(static_cast<double>(m(i, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Scalar>
nlohmann::json to_json(const ClusterPath<Scalar>& path, bool include_centroids) {
  nlohmann::json j;
  j["grid"] = nlohmann::json::array();
  for (auto v : path.grid.values) j["grid"].push_back(static_cast<double>(v));
  j["cluster_counts"] = path.cluster_counts;
  j["fuse_threshold"] = static_cast<double>(path.fuse_threshold);
  j["count_increases"] = path.count_increases;
  j["fusion_events"] = nlohmann::json::array();
  for (const auto& ev : path.fusion_events) {
    j["fusion_events"].push_back({{"grid_index", ev.grid_index}, {"lambda", ev.lambda}, {"merged", ev.merged}});
  }
  j["assignments"] = path.assignments;
  if (include_centroids) {
    j["centroids"] = nlohmann::json::array();
    for (const auto& u : path.centroids) j["centroids"].push_back(matrix_to_json(u));
  }
  return j;
}

}  // namespace graphmad
