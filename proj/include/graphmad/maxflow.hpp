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
#include <vector>

#include <Eigen/Dense>

namespace graphmad {

/// Dinic max-flow on a dense residual-capacity matrix. The fusion subproblems
/// it serves are complete graphs, so an adjacency matrix is the natural layout.
template <typename Scalar>
class DenseMaxFlow {
  using CapacityMatrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

 public:
  explicit DenseMaxFlow(Eigen::Index nodes)
      : cap_(CapacityMatrix::Zero(nodes, nodes)),
        level_(static_cast<std::size_t>(nodes)),
        next_(static_cast<std::size_t>(nodes)) {}

  Eigen::Index size() const { return cap_.rows(); }

  void add_edge(Eigen::Index from, Eigen::Index to, Scalar capacity) {
    cap_(from, to) += capacity;
    max_cap_ = std::max(max_cap_, cap_(from, to));
  }

  void add_undirected(Eigen::Index a, Eigen::Index b, Scalar capacity) {
    add_edge(a, b, capacity);
    add_edge(b, a, capacity);
  }

  /// Maximum flow from `source` to `sink`. Residual capacities at or below
  /// a relative round-off floor count as saturated.
  Scalar solve(Eigen::Index source, Eigen::Index sink) {
    source_ = source;
    floor_ = std::numeric_limits<Scalar>::epsilon() * Scalar(16) * std::max(Scalar(1), max_cap_);
    Scalar total(0);
    while (build_levels(source, sink)) {
      std::fill(next_.begin(), next_.end(), Eigen::Index(0));
      for (;;) {
        const Scalar pushed = augment(source, sink, std::numeric_limits<Scalar>::infinity());
        if (pushed <= Scalar(0)) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from the source in the final residual graph: the
  /// smallest source side among all minimum cuts.
  std::vector<bool> source_side() const {
    const auto n = size();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> queue{source_};
    seen[static_cast<std::size_t>(source_)] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = queue[head];
      for (Eigen::Index v = 0; v < n; ++v) {
        if (!seen[static_cast<std::size_t>(v)] && cap_(u, v) > floor_) {
          seen[static_cast<std::size_t>(v)] = true;
          queue.push_back(v);
        }
      }
    }
    return seen;
  }

 private:
  bool build_levels(Eigen::Index source, Eigen::Index sink) {
    const auto n = size();
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<Eigen::Index> queue{source};
    level_[static_cast<std::size_t>(source)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = queue[head];
      for (Eigen::Index v = 0; v < n; ++v) {
        if (level_[static_cast<std::size_t>(v)] < 0 && cap_(u, v) > floor_) {
          level_[static_cast<std::size_t>(v)] = level_[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  Scalar augment(Eigen::Index u, Eigen::Index sink, Scalar limit) {
    if (u == sink) return limit;
    const auto n = size();
    for (auto& v = next_[static_cast<std::size_t>(u)]; v < n; ++v) {
      if (cap_(u, v) <= floor_ ||
          level_[static_cast<std::size_t>(v)] != level_[static_cast<std::size_t>(u)] + 1) {
        continue;
      }
      const Scalar pushed = augment(v, sink, std::min(limit, cap_(u, v)));
      if (pushed > Scalar(0)) {
        cap_(u, v) -= pushed;
        cap_(v, u) += pushed;
        return pushed;
      }
    }
    return Scalar(0);
  }

  CapacityMatrix cap_;
  std::vector<int> level_;
  std::vector<Eigen::Index> next_;
  Eigen::Index source_ = 0;
  Scalar max_cap_ = Scalar(0);
  Scalar floor_ = Scalar(0);
};

}  // namespace graphmad
