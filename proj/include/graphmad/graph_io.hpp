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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graphmad/graph.hpp"

namespace graphmad {

struct LoadStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges_collapsed = 0;
};

/// Reads `{name}_A.txt`, `{name}_graph_indicator.txt` and
/// `{name}_graph_labels.txt` from `data_dir/name`. Raw labels are remapped to
/// 0..K-1 in sorted order; node attribute files are ignored.
Dataset load_tudataset(const std::filesystem::path& data_dir, const std::string& name,
                       LoadStats* stats = nullptr);

/// Reads `{name}_graph_soft_labels.txt` if present.
std::optional<std::vector<Eigen::VectorXd>> load_soft_labels(const std::filesystem::path& data_dir,
                                                             const std::string& name);

/// Writes originals followed by `new_graphs` to `out_dir/name` in the same
/// format, with a soft-label sidecar (originals as one-hot) and
/// `manifest.json`. Hard labels of new graphs are the arg-max class.
/// `manifest` is merged into the written manifest.
void write_augmented_dataset(const std::filesystem::path& out_dir, const std::string& name,
                             const Dataset& originals, const std::vector<SoftLabeledGraph>& new_graphs,
                             const nlohmann::json& manifest = nlohmann::json::object());

/// Formats a value with 9 significant digits, as used by the sidecar file.
std::string format_soft_value(double v);

}  // namespace graphmad
