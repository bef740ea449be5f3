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
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graphmad/error.hpp"
#include "graphmad/graph.hpp"
#include "graphmad/rng.hpp"

namespace graphmad {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
// Descriptors and centroids are stored one sample per row.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Piecewise-constant (stochastic block model) graphon on a D x D grid.
/// Always symmetric with entries in [0, 1].
template <typename Scalar>
class Graphon {
 public:
  Graphon() = default;

  /// Takes ownership of `w` after checking the invariants exactly.
  explicit Graphon(Matrix<Scalar> w) : w_(std::move(w)) {
    if (w_.rows() != w_.cols() || w_.rows() < 1) {
      throw Error(ErrorCode::kShape, "graphon matrix must be square and non-empty");
    }
    for (Eigen::Index a = 0; a < w_.rows(); ++a) {
      for (Eigen::Index b = 0; b < w_.cols(); ++b) {
        const Scalar v = w_(a, b);
        if (!(v >= Scalar(0) && v <= Scalar(1))) {
          throw Error(ErrorCode::kValidity, "graphon entry outside [0, 1]");
        }
        if (v != w_(b, a)) throw Error(ErrorCode::kValidity, "graphon is not symmetric");
      }
    }
  }

  static Graphon constant(Eigen::Index resolution, Scalar value) {
    return Graphon(Matrix<Scalar>::Constant(resolution, resolution, value));
  }

  Eigen::Index resolution() const { return w_.rows(); }
  const Matrix<Scalar>& matrix() const { return w_; }
  Scalar operator()(Eigen::Index a, Eigen::Index b) const { return w_(a, b); }

  /// Block index of a latent position; zeta == 1 falls in the last block.
  Eigen::Index block_of(Scalar zeta) const {
    const auto d = resolution();
    auto b = static_cast<Eigen::Index>(std::floor(zeta * static_cast<Scalar>(d)));
    return std::clamp<Eigen::Index>(b, 0, d - 1);
  }

 private:
  Matrix<Scalar> w_;
};

/// Sizes of `bins` contiguous bins over `n` items; sizes differ by at most one,
/// larger bins first.
inline std::vector<int> bin_sizes(int n, int bins) {
  std::vector<int> sizes(static_cast<std::size_t>(bins), n / bins);
  for (int b = 0; b < n % bins; ++b) ++sizes[static_cast<std::size_t>(b)];
  return sizes;
}

/// Sorting-and-block-averaging estimate. Nodes are ordered by degree
/// (descending, ties by index), cut into `resolution` near-equal contiguous
/// bins, and each block holds the edge density between its two bins.
/// Diagonal blocks count unordered pairs without self-pairs; a single-node
/// bin has no admissible pairs and gets density 0.
template <typename Scalar = double>
Graphon<Scalar> estimate_graphon(const Graph& graph, int resolution) {
  if (resolution < 1) throw Error(ErrorCode::kEstimation, "resolution must be >= 1");
  if (graph.node_count < 1) throw Error(ErrorCode::kEstimation, "graph has no nodes");
  if (resolution > graph.node_count) {
    throw Error(ErrorCode::kEstimation,
                "resolution " + std::to_string(resolution) + " exceeds node count " +
                    std::to_string(graph.node_count));
  }
  const int n = graph.node_count;
  const auto deg = graph.degrees();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return deg[static_cast<std::size_t>(a)] > deg[static_cast<std::size_t>(b)];
  });

  const auto sizes = bin_sizes(n, resolution);
  std::vector<int> bin(static_cast<std::size_t>(n));
  for (int b = 0, pos = 0; b < resolution; ++b) {
    for (int k = 0; k < sizes[static_cast<std::size_t>(b)]; ++k, ++pos) {
      bin[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = b;
    }
  }

  Matrix<Scalar> counts = Matrix<Scalar>::Zero(resolution, resolution);
  for (auto [i, j] : graph.edges) {
    const int a = bin[static_cast<std::size_t>(i)];
    const int b = bin[static_cast<std::size_t>(j)];
    counts(a, b) += Scalar(1);
    if (a != b) counts(b, a) += Scalar(1);
  }
  Matrix<Scalar> w(resolution, resolution);
  for (int a = 0; a < resolution; ++a) {
    for (int b = 0; b < resolution; ++b) {
      const Scalar sa = sizes[static_cast<std::size_t>(a)];
      const Scalar sb = sizes[static_cast<std::size_t>(b)];
      const Scalar pairs = (a == b) ? sa * (sa - Scalar(1)) / Scalar(2) : sa * sb;
      w(a, b) = pairs > Scalar(0) ? counts(a, b) / pairs : Scalar(0);
    }
  }
  return Graphon<Scalar>(std::move(w));
}

/// Draws a graph from `graphon`: one uniform latent position per node, then
/// each pair i < j independently with the probability of their block pair.
/// The block of every node is written to `blocks` when non-null.
template <typename Scalar>
Graph sample_graph(const Graphon<Scalar>& graphon, int node_count, Rng& rng,
                   std::vector<Eigen::Index>* blocks = nullptr) {
  if (node_count < 1) throw Error(ErrorCode::kConfig, "node count must be >= 1");
  std::vector<Eigen::Index> local;
  std::vector<Eigen::Index>& block = blocks != nullptr ? *blocks : local;
  block.assign(static_cast<std::size_t>(node_count), 0);
  for (auto& b : block) b = graphon.block_of(static_cast<Scalar>(uniform01(rng)));
  Graph g;
  g.node_count = node_count;
  for (int i = 0; i < node_count; ++i) {
    for (int j = i + 1; j < node_count; ++j) {
      const auto p = static_cast<double>(
          graphon(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]));
      if (bernoulli(rng, p)) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

/// Row-major flattening.
template <typename Scalar>
Vector<Scalar> vectorize(const Graphon<Scalar>& graphon) {
  const auto d = graphon.resolution();
  Vector<Scalar> v(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) v(a * d + b) = graphon(a, b);
  }
  return v;
}

/// Inverse of vectorize. Asymmetry up to 1e-6 is averaged away; larger is a
/// validity error. Entries are clamped into [0, 1] only within the same
/// tolerance.
template <typename Derived>
Graphon<typename Derived::Scalar> devectorize(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const auto len = v.size();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (len < 1 || d * d != len) {
    throw Error(ErrorCode::kShape, "descriptor length " + std::to_string(len) + " is not a square");
  }
  constexpr double kTol = 1e-6;
  Matrix<Scalar> w(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      const Scalar x = v(a * d + b);
      const Scalar y = v(b * d + a);
      if (std::abs(static_cast<double>(x - y)) > kTol) {
        throw Error(ErrorCode::kValidity, "descriptor is not symmetric");
      }
      Scalar m = (x == y) ? x : (x + y) / Scalar(2);
      if (m < Scalar(-kTol) || m > Scalar(1 + kTol)) {
        throw Error(ErrorCode::kValidity, "descriptor entry outside [0, 1]");
      }
      m = std::clamp(m, Scalar(0), Scalar(1));
      w(a, b) = m;
      w(b, a) = m;
    }
  }
  return Graphon<Scalar>(std::move(w));
}

template <typename Scalar>
nlohmann::json to_json(const Graphon<Scalar>& graphon) {
  nlohmann::json w = nlohmann::json::array();
  const auto v = vectorize(graphon);
  for (Eigen::Index i = 0; i < v.size(); ++i) w.push_back(static_cast<double>(v(i)));
  return {{"D", graphon.resolution()}, {"W", std::move(w)}};
}

inline Graphon<double> graphon_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("D") || !j.contains("W")) {
    throw Error(ErrorCode::kFormat, "graphon JSON needs keys \"D\" and \"W\"");
  }
  const auto d = j.at("D").get<long long>();
  const auto& w = j.at("W");
  if (d < 1 || !w.is_array() || static_cast<long long>(w.size()) != d * d) {
    throw Error(ErrorCode::kShape, "graphon JSON: W must hold D*D values");
  }
  Vector<double> v(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) v(static_cast<Eigen::Index>(i)) = w[i].get<double>();
  return devectorize(v);
}

}  // namespace graphmad
