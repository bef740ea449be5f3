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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphmad/mixpath.hpp"
#include "graphmad/mixup.hpp"

namespace graphmad {

/// Every knob of a pipeline run.
struct AugmentationConfig {
  std::filesystem::path data_dir = ".";
  std::string name;
  std::filesystem::path out_dir = "out";
  int resolution = 12;
  double epsilon = 0.01;
  double a = 5.0;
  int grid_size = 101;
  double tol = 1e-6;
  double delta_fuse = 1e-4;
  std::optional<long long> num_new;  // default: ceil(0.2 * T)
  DataMix data = DataMix::kClusterpath;
  LabelMix label = LabelMix::kClusterpath;
  LabelOrientation orientation = LabelOrientation::kEndpointConsistent;
  std::uint64_t seed = 0;
  bool export_centroids = false;

  // `sample` only.
  std::filesystem::path graphon_path;
  int nodes = 0;
  int count = 1;

  void validate() const;
  nlohmann::json to_json() const;
};

// Each command returns the process exit status. Failures print one line,
// `error[E_CODE]: message`, to `err` and leave no partial output behind.
int cmd_augment(const AugmentationConfig& config, std::ostream& out, std::ostream& err);
int cmd_clusterpath(const AugmentationConfig& config, std::ostream& out, std::ostream& err);
int cmd_estimate(const AugmentationConfig& config, std::ostream& out, std::ostream& err);
int cmd_sample(const AugmentationConfig& config, std::ostream& out, std::ostream& err);

/// Parses `graphmad <command> [flags]` and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace graphmad
