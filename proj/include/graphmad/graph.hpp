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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphmad/error.hpp"

namespace graphmad {

using Edge = std::pair<int, int>;

/// Undirected simple graph. Edges are stored once, as (i, j) with i < j,
/// sorted lexicographically.
struct Graph {
  int node_count = 0;
  std::vector<Edge> edges;

  /// Builds a graph from an arbitrary edge list: orientation is normalized,
  /// duplicates collapse, self-loops are dropped. Returns the number of
  /// self-loops dropped through `dropped_self_loops` when non-null.
  static Graph from_edges(int node_count, std::vector<Edge> raw,
                          std::size_t* dropped_self_loops = nullptr) {
    Graph g;
    g.node_count = node_count;
    std::size_t loops = 0;
    g.edges.reserve(raw.size());
    for (auto [a, b] : raw) {
      if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
        throw Error(ErrorCode::kFormat, "edge (" + std::to_string(a) + ", " +
                                            std::to_string(b) + ") outside node range");
      }
      if (a == b) {
        ++loops;
        continue;
      }
      g.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    if (dropped_self_loops != nullptr) *dropped_self_loops = loops;
    return g;
  }

  std::size_t edge_count() const { return edges.size(); }

  std::vector<int> degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(node_count), 0);
    for (auto [a, b] : edges) {
      ++deg[static_cast<std::size_t>(a)];
      ++deg[static_cast<std::size_t>(b)];
    }
    return deg;
  }

  friend bool operator==(const Graph&, const Graph&) = default;
};

/// Graph with a hard class label. The one-hot vector is derived on demand.
struct LabeledGraph {
  Graph graph;
  int label = 0;
  int class_count = 1;

  Eigen::VectorXd one_hot() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(class_count);
    y(label) = 1.0;
    return y;
  }

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

struct SoftLabeledGraph {
  Graph graph;
  Eigen::VectorXd soft_label;
};

struct Dataset {
  std::string name;
  int class_count = 0;
  std::vector<LabeledGraph> graphs;
  // raw_labels[k] is the on-disk label that maps to class k.
  std::vector<long long> raw_labels;

  std::size_t size() const { return graphs.size(); }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(graphs.size());
    for (const auto& g : graphs) out.push_back(g.label);
    return out;
  }

  std::vector<int> node_counts() const {
    std::vector<int> out;
    out.reserve(graphs.size());
    for (const auto& g : graphs) out.push_back(g.graph.node_count);
    return out;
  }

  /// Fraction of graphs per class.
  Eigen::VectorXd class_proportions() const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(class_count);
    for (const auto& g : graphs) p(g.label) += 1.0;
    if (!graphs.empty()) p /= static_cast<double>(graphs.size());
    return p;
  }
};

/// Checks the Dataset invariants; throws kFormat on violation.
inline void validate(const Dataset& d) {
  if (d.class_count < 1) throw Error(ErrorCode::kFormat, "dataset has no classes");
  std::vector<bool> seen(static_cast<std::size_t>(d.class_count), false);
  for (const auto& g : d.graphs) {
    if (g.class_count != d.class_count || g.label < 0 || g.label >= d.class_count) {
      throw Error(ErrorCode::kFormat, "graph label outside [0, K)");
    }
    if (g.graph.node_count < 1) throw Error(ErrorCode::kFormat, "graph with 0 nodes");
    seen[static_cast<std::size_t>(g.label)] = true;
  }
  for (int k = 0; k < d.class_count; ++k) {
    if (!seen[static_cast<std::size_t>(k)]) {
      throw Error(ErrorCode::kFormat, "class " + std::to_string(k) + " has no graphs");
    }
  }
}

}  // namespace graphmad
