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

#include <iostream>

#include <CLI11.hpp>

#include "graphmad/pipeline.hpp"

namespace graphmad {
namespace {

struct RawFlags {
  std::string gfeat = "clusterpath";
  std::string glabel = "clusterpath";
  std::string orientation = "endpoint-consistent";
  std::string data_dir = ".";
  std::string out_dir = "out";
  std::string graphon;
  long long num_new = -1;
};

void add_common(CLI::App* cmd, AugmentationConfig& c, RawFlags& raw) {
  cmd->add_option("--data-dir", raw.data_dir, "Directory holding <name>/ in TUDataset format");
  cmd->add_option("--name", c.name, "Dataset name")->required();
  cmd->add_option("--out", raw.out_dir, "Output directory");
  cmd->add_option("--resolution", c.resolution, "Graphon resolution D")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Random seed");
}

void add_path_flags(CLI::App* cmd, AugmentationConfig& c, RawFlags& raw) {
  cmd->add_option("--epsilon", c.epsilon, "Cross-class fusion weight in (0,1)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--a", c.a, "Sigmoid/logit sharpness")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-size", c.grid_size, "Lambda grid points on [0, 0.99]")->check(CLI::Range(2, 1000000));
  cmd->add_option("--tol", c.tol, "Solver stationarity tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--delta-fuse", c.delta_fuse, "Fusion threshold relative to descriptor range")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--label-orientation", raw.orientation, "Label path orientation")
      ->check(CLI::IsMember({"paper", "endpoint-consistent"}));
  cmd->add_option("--num-new", raw.num_new, "Number of generated graphs (default ceil(0.2 T))")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--gfeat", raw.gfeat, "Data mixup")->check(CLI::IsMember({"clusterpath", "linear"}));
  cmd->add_option("--glabel", raw.glabel, "Label mixup")
      ->check(CLI::IsMember({"linear", "sigmoid", "logit", "clusterpath"}));
  cmd->add_flag("--export-centroids", c.export_centroids, "Include centroid matrices in exports");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph data augmentation by convex-clustering mixup", "graphmad"};
  app.require_subcommand(1);
  AugmentationConfig c;
  RawFlags raw;

  auto* augment = app.add_subcommand("augment", "Generate an augmented dataset");
  auto* clusterpath = app.add_subcommand("clusterpath", "Export the clusterpath and branch curves");
  auto* estimate = app.add_subcommand("estimate", "Write one graphon JSON per graph");
  auto* sample = app.add_subcommand("sample", "Sample graphs from a graphon JSON");
  for (auto* cmd : {augment, clusterpath, estimate}) add_common(cmd, c, raw);
  for (auto* cmd : {augment, clusterpath}) add_path_flags(cmd, c, raw);
  sample->add_option("--name", c.name, "Output dataset name")->required();
  sample->add_option("--out", raw.out_dir, "Output directory");
  sample->add_option("--graphon", raw.graphon, "Graphon JSON {\"D\", \"W\"}")->required();
  sample->add_option("--nodes", c.nodes, "Nodes per graph")->required()->check(CLI::PositiveNumber);
  sample->add_option("--count", c.count, "Number of graphs")->check(CLI::PositiveNumber);
  sample->add_option("--seed", c.seed, "Random seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[E_USAGE]: " << e.what() << std::endl;
    return 2;
  }

  try {
    c.data = parse_data_mix(raw.gfeat);
    c.label = parse_label_mix(raw.glabel);
    c.orientation = parse_orientation(raw.orientation);
  } catch (const Error& e) {
    err << "error[" << error_code_name(e.code()) << "]: " << e.what() << std::endl;
    return 2;
  }
  c.data_dir = raw.data_dir;
  c.out_dir = raw.out_dir;
  c.graphon_path = raw.graphon;
  if (raw.num_new >= 0) c.num_new = raw.num_new;

  if (augment->parsed()) return cmd_augment(c, out, err);
  if (clusterpath->parsed()) return cmd_clusterpath(c, out, err);
  if (estimate->parsed()) return cmd_estimate(c, out, err);
  return cmd_sample(c, out, err);
}

}  // namespace graphmad
