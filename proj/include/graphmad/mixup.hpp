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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphmad/error.hpp"
#include "graphmad/graph.hpp"
#include "graphmad/graphon.hpp"
#include "graphmad/mixpath.hpp"
#include "graphmad/parallel.hpp"
#include "graphmad/rng.hpp"

namespace graphmad {

enum class DataMix { kClusterpath, kLinear };
enum class LabelMix { kLinear, kSigmoid, kLogit, kClusterpath };

inline std::string to_string(DataMix d) { return d == DataMix::kLinear ? "linear" : "clusterpath"; }

inline std::string to_string(LabelMix l) {
  switch (l) {
    case LabelMix::kLinear: return "linear";
    case LabelMix::kSigmoid: return "sigmoid";
    case LabelMix::kLogit: return "logit";
    case LabelMix::kClusterpath: return "clusterpath";
  }
  return "?";
}

inline DataMix parse_data_mix(const std::string& s) {
  if (s == "clusterpath") return DataMix::kClusterpath;
  if (s == "linear") return DataMix::kLinear;
  throw Error(ErrorCode::kConfig, "unknown data mixup '" + s + "'");
}

inline LabelMix parse_label_mix(const std::string& s) {
  if (s == "linear") return LabelMix::kLinear;
  if (s == "sigmoid") return LabelMix::kSigmoid;
  if (s == "logit") return LabelMix::kLogit;
  if (s == "clusterpath") return LabelMix::kClusterpath;
  throw Error(ErrorCode::kConfig, "unknown label mixup '" + s + "'");
}

/// Where mixup parameters come from. `fixed` pins every draw to `value`.
struct LambdaSource {
  enum class Kind { kUniform, kFixed } kind = Kind::kUniform;
  double value = 0.0;

  double draw(Rng& rng) const { return kind == Kind::kFixed ? value : uniform01(rng); }
};

struct MixupSpec {
  DataMix data = DataMix::kClusterpath;
  LabelMix label = LabelMix::kClusterpath;
  double a = 5.0;
  LambdaSource lambda_source;
  LabelOrientation orientation = LabelOrientation::kEndpointConsistent;

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::kConfig, "sharpness a must be > 0");
    if (lambda_source.kind == LambdaSource::Kind::kFixed &&
        !(lambda_source.value >= 0.0 && lambda_source.value <= 1.0)) {
      throw Error(ErrorCode::kConfig, "fixed lambda must lie in [0, 1]");
    }
  }
};

/// 1 / (1 + exp(-a (2 lambda - 1))).
template <typename Scalar>
Scalar sigmoid_weight(Scalar lambda, Scalar a) {
  return Scalar(1) / (Scalar(1) + std::exp(-a * (Scalar(2) * lambda - Scalar(1))));
}

/// log(lambda / (1 - lambda)) / (2a) + 1/2, clamped to [0, 1]; the endpoints
/// take their limits 0 and 1.
template <typename Scalar>
Scalar logit_weight(Scalar lambda, Scalar a) {
  if (lambda <= Scalar(0)) return Scalar(0);
  if (lambda >= Scalar(1)) return Scalar(1);
  const Scalar raw = std::log(lambda / (Scalar(1) - lambda)) / (Scalar(2) * a) + Scalar(0.5);
  return std::clamp(raw, Scalar(0), Scalar(1));
}

/// Mixing weight on the first label for the closed-form label functions.
template <typename Scalar>
Scalar mixing_weight(LabelMix fn, Scalar lambda, Scalar a) {
  switch (fn) {
    case LabelMix::kLinear: return lambda;
    case LabelMix::kSigmoid: return sigmoid_weight(lambda, a);
    case LabelMix::kLogit: return logit_weight(lambda, a);
    case LabelMix::kClusterpath: break;
  }
  throw Error(ErrorCode::kConfig, "clusterpath labels have no closed-form weight");
}

template <typename Scalar>
Vector<Scalar> linear_label_mix(const Vector<Scalar>& yi, const Vector<Scalar>& yj, Scalar lambda) {
  return lambda * yi + (Scalar(1) - lambda) * yj;
}

template <typename Scalar>
Vector<Scalar> sigmoid_label_mix(const Vector<Scalar>& yi, const Vector<Scalar>& yj, Scalar lambda, Scalar a) {
  const Scalar s = sigmoid_weight(lambda, a);
  return s * yi + (Scalar(1) - s) * yj;
}

template <typename Scalar>
Vector<Scalar> logit_label_mix(const Vector<Scalar>& yi, const Vector<Scalar>& yj, Scalar lambda, Scalar a) {
  const Scalar s = logit_weight(lambda, a);
  return s * yi + (Scalar(1) - s) * yj;
}

template <typename Scalar>
struct ClassGraphonSet {
  std::vector<Graphon<Scalar>> graphons;

  std::size_t size() const { return graphons.size(); }
  const Graphon<Scalar>& operator[](std::size_t k) const { return graphons[k]; }
};

/// Entry-wise mean of the per-graph estimates within each class.
template <typename Scalar = double>
ClassGraphonSet<Scalar> estimate_class_graphons(const Dataset& dataset, int resolution) {
  std::vector<Matrix<Scalar>> sums(static_cast<std::size_t>(dataset.class_count),
                                   Matrix<Scalar>::Zero(resolution, resolution));
  std::vector<int> counts(static_cast<std::size_t>(dataset.class_count), 0);
  for (const auto& g : dataset.graphs) {
    sums[static_cast<std::size_t>(g.label)] += estimate_graphon<Scalar>(g.graph, resolution).matrix();
    ++counts[static_cast<std::size_t>(g.label)];
  }
  ClassGraphonSet<Scalar> set;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (counts[k] == 0) throw Error(ErrorCode::kConfig, "class " + std::to_string(k) + " has no graphs");
    set.graphons.emplace_back(Matrix<Scalar>(sums[k] / static_cast<Scalar>(counts[k])));
  }
  return set;
}

/// lambda * W_k + (1 - lambda) * W_k'.
template <typename Scalar>
Graphon<Scalar> linear_graphon_mix(const ClassGraphonSet<Scalar>& set, std::size_t k, std::size_t k_prime,
                                   Scalar lambda) {
  if (k == k_prime) throw Error(ErrorCode::kConfig, "linear graphon mixup needs two distinct classes");
  if (k >= set.size() || k_prime >= set.size()) throw Error(ErrorCode::kConfig, "class index out of range");
  if (!(lambda >= Scalar(0) && lambda <= Scalar(1))) throw Error(ErrorCode::kConfig, "lambda outside [0, 1]");
  Matrix<Scalar> w = lambda * set[k].matrix() + (Scalar(1) - lambda) * set[k_prime].matrix();
  // Each entry is a convex combination; clip the last-bit overshoot.
  w = w.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  return Graphon<Scalar>(std::move(w));
}

/// One generated sample's provenance.
struct DrawRecord {
  double lambda = 0.0;
  int branch = -1;       // clusterpath data
  int class_k = -1;      // linear data
  int class_k_prime = -1;
  int label_branch = -1;  // branch used by clusterpath labels
  int node_count = 0;
};

struct Generation {
  std::vector<SoftLabeledGraph> graphs;
  std::vector<DrawRecord> draws;
};

/// For each class, the branch holding most of its samples (lowest index on ties).
template <typename Scalar>
std::vector<int> majority_branches(const ExtendedClusterPath<Scalar>& ext, const std::vector<int>& classes,
                                   int class_count) {
  std::vector<int> best(static_cast<std::size_t>(class_count), 0);
  std::vector<std::size_t> best_count(static_cast<std::size_t>(class_count), 0);
  for (std::size_t b = 0; b < ext.branch_count(); ++b) {
    std::vector<std::size_t> per_class(static_cast<std::size_t>(class_count), 0);
    for (int i : ext.index_sets[b]) ++per_class[static_cast<std::size_t>(classes[static_cast<std::size_t>(i)])];
    for (std::size_t k = 0; k < per_class.size(); ++k) {
      if (per_class[k] > best_count[k]) {
        best_count[k] = per_class[k];
        best[k] = static_cast<int>(b);
      }
    }
  }
  return best;
}

struct GenerationInputs {
  const Dataset* dataset = nullptr;
  const ExtendedClusterPath<double>* extended = nullptr;
  const LabelPath<double>* label_paths = nullptr;
  const ClassGraphonSet<double>* class_graphons = nullptr;
};

/// Generates `count` soft-labeled graphs. Draw i uses its own random stream
/// derived from (seed, i): lambda first, then the branch or class pair, the
/// node count (from `node_counts`, with replacement), and finally the graph.
inline Generation generate(const GenerationInputs& in, const MixupSpec& spec, std::size_t count,
                           const std::vector<int>& node_counts, std::uint64_t seed) {
  spec.validate();
  if (in.dataset == nullptr) throw Error(ErrorCode::kConfig, "generation needs the source dataset");
  const int class_count = in.dataset->class_count;
  const bool needs_path = spec.data == DataMix::kClusterpath || spec.label == LabelMix::kClusterpath;
  if (needs_path && (in.extended == nullptr || in.label_paths == nullptr)) {
    throw Error(ErrorCode::kConfig, "clusterpath mixup requested but no extended clusterpath available");
  }
  if (spec.data == DataMix::kLinear) {
    if (in.class_graphons == nullptr) throw Error(ErrorCode::kConfig, "linear mixup needs class graphons");
    if (class_count < 2) throw Error(ErrorCode::kConfig, "linear mixup needs at least two classes");
  }
  if (count > 0 && node_counts.empty()) throw Error(ErrorCode::kConfig, "no node counts to draw from");

  std::vector<int> majority;
  if (spec.data == DataMix::kLinear && spec.label == LabelMix::kClusterpath) {
    majority = majority_branches(*in.extended, in.dataset->labels(), class_count);
  }
  auto one_hot = [&](int k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(class_count);
    e(k) = 1.0;
    return e;
  };
  auto path_label = [&](int branch, double lambda) {
    const auto& ext = *in.extended;
    const double g = rate_at(ext.trajectories[static_cast<std::size_t>(branch)], ext.grid, lambda);
    return label_at(ext.origin_labels[static_cast<std::size_t>(branch)],
                    ext.fusion_labels[static_cast<std::size_t>(branch)], origin_weight(g, spec.orientation));
  };

  Generation out;
  out.graphs.resize(count);
  out.draws.resize(count);
  parallel_for(count, [&](std::size_t i) {
    Rng rng = derive_rng(seed, i);
    DrawRecord rec;
    rec.lambda = spec.lambda_source.draw(rng);
    const double lambda = rec.lambda;
    std::optional<Graphon<double>> graphon;
    Eigen::VectorXd label;

    if (spec.data == DataMix::kClusterpath) {
      const auto& ext = *in.extended;
      rec.branch = static_cast<int>(uniform_index(rng, ext.branch_count()));
      const auto b = static_cast<std::size_t>(rec.branch);
      graphon = devectorize(interpolate(ext.trajectories[b], ext.grid, lambda));
      if (spec.label == LabelMix::kClusterpath) {
        rec.label_branch = rec.branch;
        label = path_label(rec.branch, lambda);
      } else {
        // Closed-form functions run between the branch's two label anchors.
        const double arg = spec.orientation == LabelOrientation::kRateOnOrigin ? lambda : 1.0 - lambda;
        const double wgt = mixing_weight(spec.label, arg, spec.a);
        label = label_at<double>(ext.origin_labels[b], ext.fusion_labels[b], wgt);
      }
    } else {
      const auto k = uniform_index(rng, static_cast<std::uint64_t>(class_count));
      auto kp = uniform_index(rng, static_cast<std::uint64_t>(class_count - 1));
      if (kp >= k) ++kp;
      rec.class_k = static_cast<int>(k);
      rec.class_k_prime = static_cast<int>(kp);
      graphon = linear_graphon_mix(*in.class_graphons, k, kp, lambda);
      if (spec.label == LabelMix::kClusterpath) {
        rec.label_branch = majority[k];
        label = path_label(rec.label_branch, lambda);
      } else {
        label = label_at<double>(one_hot(rec.class_k), one_hot(rec.class_k_prime),
                                 mixing_weight(spec.label, lambda, spec.a));
      }
    }

    rec.node_count = node_counts[uniform_index(rng, node_counts.size())];
    out.graphs[i].graph = sample_graph(*graphon, rec.node_count, rng);
    out.graphs[i].soft_label = std::move(label);
    out.draws[i] = rec;
  });
  return out;
}

}  // namespace graphmad
