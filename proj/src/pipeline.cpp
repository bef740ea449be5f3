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

#include "graphmad/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "graphmad/cvxclust.hpp"
#include "graphmad/graph_io.hpp"
#include "graphmad/graphon.hpp"

namespace graphmad {
namespace {

namespace fs = std::filesystem;

// Exclusive lock on the output directory plus a staging area that is
// renamed into place on commit and removed otherwise.
class OutputTransaction {
 public:
  OutputTransaction(fs::path out_dir, std::string name)
      : out_dir_(std::move(out_dir)), name_(std::move(name)) {
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    if (ec) throw Error(ErrorCode::kWrite, "cannot create " + out_dir_.string() + ": " + ec.message());
    lock_ = out_dir_ / ".graphmad.lock";
    std::FILE* f = std::fopen(lock_.c_str(), "wx");
    if (f == nullptr) throw Error(ErrorCode::kLocked, "output directory is locked: " + lock_.string());
    std::fclose(f);
    staging_ = out_dir_ / (".staging-" + name_);
    fs::remove_all(staging_, ec);
    fs::create_directories(staging_ / name_, ec);
    if (ec) {
      fs::remove(lock_, ec);
      throw Error(ErrorCode::kWrite, "cannot create staging directory: " + ec.message());
    }
  }

  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;

  ~OutputTransaction() {
    std::error_code ec;
    if (!committed_) fs::remove_all(staging_, ec);
    fs::remove(lock_, ec);
  }

  // Parent directory to hand to writers that append `name`.
  const fs::path& staging_root() const { return staging_; }
  fs::path staging_dir() const { return staging_ / name_; }
  fs::path final_dir() const { return out_dir_ / name_; }

  void commit() {
    std::error_code ec;
    fs::remove_all(final_dir(), ec);
    fs::rename(staging_dir(), final_dir(), ec);
    if (ec) throw Error(ErrorCode::kWrite, "cannot move output into place: " + ec.message());
    fs::remove_all(staging_, ec);
    committed_ = true;
  }

 private:
  fs::path out_dir_;
  std::string name_;
  fs::path lock_;
  fs::path staging_;
  bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kWrite, "cannot write " + path.string());
  f << content;
  if (!f.flush()) throw Error(ErrorCode::kWrite, "write failed for " + path.string());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct PipelineState {
  Dataset dataset;
  int resolution = 0;
  RowMatrix<double> descriptors;
  std::optional<ClusterPath<double>> path;
  std::optional<BranchSelection<double>> selection;
  std::optional<ExtendedClusterPath<double>> extended;
  std::optional<LabelPath<double>> labels;
};

int effective_resolution(const Dataset& d, int requested, std::ostream& out) {
  int smallest = d.graphs.front().graph.node_count;
  for (const auto& g : d.graphs) smallest = std::min(smallest, g.graph.node_count);
  if (requested > smallest) {
    out << "note: resolution " << requested << " exceeds the smallest graph (" << smallest
        << " nodes); using " << smallest << "\n";
    return smallest;
  }
  return requested;
}

RowMatrix<double> estimate_descriptors(const Dataset& d, int resolution) {
  RowMatrix<double> theta(static_cast<Eigen::Index>(d.size()),
                          static_cast<Eigen::Index>(resolution) * resolution);
  parallel_for(d.size(), [&](std::size_t i) {
    theta.row(static_cast<Eigen::Index>(i)) =
        vectorize(estimate_graphon<double>(d.graphs[i].graph, resolution)).transpose();
  });
  return theta;
}

PipelineState prepare(const AugmentationConfig& c, bool need_path, std::ostream& out) {
  PipelineState s;
  LoadStats stats;
  s.dataset = load_tudataset(c.data_dir, c.name, &stats);
  if (stats.self_loops_dropped > 0) {
    out << "warning: dropped " << stats.self_loops_dropped << " self-loop(s)\n";
  }
  s.resolution = effective_resolution(s.dataset, c.resolution, out);
  if (!need_path) return s;

  s.descriptors = estimate_descriptors(s.dataset, s.resolution);
  const auto weights = build_weights(s.dataset.labels(), c.epsilon);
  TraceOptions opts;
  opts.solver.tol = c.tol;
  opts.delta_fuse = c.delta_fuse;
  s.path = trace_clusterpath(s.descriptors, weights, LambdaGrid<double>::uniform(c.grid_size), opts);
  s.selection = select_branch_lambda(*s.path, s.dataset.class_count);
  s.extended = collapse_branches(*s.path, s.selection->index_sets, s.dataset.labels(), s.dataset.class_count,
                                 s.selection->lambda_star);
  s.labels = build_label_paths(*s.extended, c.orientation);
  return s;
}

void print_summary(const PipelineState& s, std::ostream& out) {
  out << "dataset " << s.dataset.name << ": T=" << s.dataset.size() << " K=" << s.dataset.class_count
      << " resolution=" << s.resolution << "\n";
  if (!s.path) return;
  const auto& p = *s.path;
  out << "cluster counts:";
  const std::size_t last = p.grid.size() - 1;
  for (std::size_t m : {std::size_t(0), last / 4, last / 2, 3 * last / 4, last - 1, last}) {
    out << " [lambda=" << fmt(p.grid[m]) << "] " << p.cluster_counts[m];
  }
  out << "\n";
  if (!p.count_increases.empty()) {
    out << "warning: cluster count increased at " << p.count_increases.size() << " grid point(s)\n";
  }
  out << "lambda*=" << fmt(s.selection->lambda_star) << " branches=" << s.extended->branch_count()
      << (s.selection->refined ? " (refined)" : "") << (s.selection->split_fallback ? " (split fallback)" : "")
      << "\n";
}

nlohmann::json path_manifest(const PipelineState& s) {
  nlohmann::json j;
  j["resolution_effective"] = s.resolution;
  if (s.selection) {
    j["lambda_star"] = s.selection->lambda_star;
    j["index_sets"] = s.selection->index_sets;
    j["lambda_star_refined"] = s.selection->refined;
    j["branch_split_fallback"] = s.selection->split_fallback;
    std::vector<bool> clamped;
    for (const auto& r : s.labels->rates) clamped.push_back(r.clamped);
    j["g_cp_clamped"] = clamped;
    j["cluster_counts"] = s.path->cluster_counts;
  }
  return j;
}

void do_augment(const AugmentationConfig& c, std::ostream& out) {
  c.validate();
  const bool need_path = c.data == DataMix::kClusterpath || c.label == LabelMix::kClusterpath;
  PipelineState s = prepare(c, need_path, out);
  const auto t_count = s.dataset.size();
  const auto num_new = static_cast<std::size_t>(
      c.num_new ? *c.num_new : static_cast<long long>(std::ceil(0.2 * static_cast<double>(t_count))));

  std::optional<ClassGraphonSet<double>> class_graphons;
  if (c.data == DataMix::kLinear) class_graphons = estimate_class_graphons<double>(s.dataset, s.resolution);

  MixupSpec spec;
  spec.data = c.data;
  spec.label = c.label;
  spec.a = c.a;
  spec.orientation = c.orientation;
  GenerationInputs in;
  in.dataset = &s.dataset;
  in.extended = s.extended ? &*s.extended : nullptr;
  in.label_paths = s.labels ? &*s.labels : nullptr;
  in.class_graphons = class_graphons ? &*class_graphons : nullptr;
  const Generation gen = generate(in, spec, num_new, s.dataset.node_counts(), c.seed);

  nlohmann::json manifest;
  manifest["config"] = c.to_json();
  manifest["seed"] = c.seed;
  manifest["clusterpath"] = path_manifest(s);
  nlohmann::json draws = nlohmann::json::array();
  for (const auto& d : gen.draws) {
    draws.push_back({{"lambda", d.lambda},
                     {"branch", d.branch},
                     {"class_k", d.class_k},
                     {"class_k_prime", d.class_k_prime},
                     {"label_branch", d.label_branch},
                     {"node_count", d.node_count}});
  }
  manifest["draws"] = std::move(draws);

  OutputTransaction tx(c.out_dir, c.name);
  write_augmented_dataset(tx.staging_root(), c.name, s.dataset, gen.graphs, manifest);
  tx.commit();
  print_summary(s, out);
  out << "generated T'=" << num_new << " graphs (gfeat=" << to_string(c.data) << ", glabel=" << to_string(c.label)
      << ")\nwrote " << tx.final_dir().string() << "\n";
}

void do_clusterpath(const AugmentationConfig& c, std::ostream& out) {
  c.validate();
  PipelineState s = prepare(c, true, out);
  OutputTransaction tx(c.out_dir, c.name);
  const fs::path dir = tx.staging_dir();

  nlohmann::json cp = to_json(*s.path, c.export_centroids);
  cp["config"] = c.to_json();
  cp["resolution_effective"] = s.resolution;
  write_text(dir / "clusterpath.json", cp.dump(2) + "\n");
  write_text(dir / "extended_clusterpath.json", to_json(*s.extended, *s.labels, c.export_centroids).dump(2) + "\n");

  std::ostringstream csv;
  csv << "lambda,branch,g_cp,cluster_count\n";
  for (std::size_t m = 0; m < s.path->grid.size(); ++m) {
    for (std::size_t k = 0; k < s.extended->branch_count(); ++k) {
      csv << fmt(s.path->grid[m]) << ',' << k << ',' << fmt(s.labels->rates[k].values[m]) << ','
          << s.path->cluster_counts[m] << '\n';
    }
  }
  write_text(dir / "clusterpath.csv", csv.str());
  tx.commit();
  print_summary(s, out);
  out << "wrote " << tx.final_dir().string() << "\n";
}

void do_estimate(const AugmentationConfig& c, std::ostream& out) {
  c.validate();
  PipelineState s = prepare(c, false, out);
  OutputTransaction tx(c.out_dir, c.name);
  const fs::path dir = tx.staging_dir() / "graphons";
  fs::create_directories(dir);
  std::vector<std::string> docs(s.dataset.size());
  parallel_for(s.dataset.size(), [&](std::size_t i) {
    docs[i] = to_json(estimate_graphon<double>(s.dataset.graphs[i].graph, s.resolution)).dump() + "\n";
  });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    char file[32];
    std::snprintf(file, sizeof file, "graph_%06zu.json", i);
    write_text(dir / file, docs[i]);
  }
  tx.commit();
  out << "estimated " << docs.size() << " graphons at resolution " << s.resolution << " into "
      << (tx.final_dir() / "graphons").string() << "\n";
}

void do_sample(const AugmentationConfig& c, std::ostream& out) {
  if (c.name.empty()) throw Error(ErrorCode::kConfig, "--name is required");
  if (c.nodes < 1) throw Error(ErrorCode::kConfig, "--nodes must be >= 1");
  if (c.count < 1) throw Error(ErrorCode::kConfig, "--count must be >= 1");
  std::ifstream in(c.graphon_path);
  if (!in) throw Error(ErrorCode::kLoad, "cannot open " + c.graphon_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, c.graphon_path.string() + ": " + e.what());
  }
  const auto graphon = graphon_from_json(j);

  Dataset d;
  d.name = c.name;
  d.class_count = 1;
  d.raw_labels = {0};
  d.graphs.resize(static_cast<std::size_t>(c.count));
  for (std::size_t i = 0; i < d.graphs.size(); ++i) {
    Rng rng = derive_rng(c.seed, i);
    d.graphs[i].graph = sample_graph(graphon, c.nodes, rng);
  }
  nlohmann::json manifest;
  manifest["seed"] = c.seed;
  manifest["graphon"] = j;
  manifest["nodes"] = c.nodes;
  OutputTransaction tx(c.out_dir, c.name);
  write_augmented_dataset(tx.staging_root(), c.name, d, {}, manifest);
  tx.commit();
  out << "sampled " << c.count << " graph(s) with " << c.nodes << " nodes into " << tx.final_dir().string() << "\n";
}

template <typename Fn>
int guarded(Fn&& fn, const AugmentationConfig& c, std::ostream& out, std::ostream& err) {
  try {
    fn(c, out);
    return 0;
  } catch (const Error& e) {
    err << "error[" << error_code_name(e.code()) << "]: " << e.what() << std::endl;
  } catch (const std::exception& e) {
    err << "error[E_INTERNAL]: " << e.what() << std::endl;
  }
  return 1;
}

}  // namespace

void AugmentationConfig::validate() const {
  if (name.empty()) throw Error(ErrorCode::kConfig, "--name is required");
  if (resolution < 1) throw Error(ErrorCode::kConfig, "--resolution must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::kConfig, "--epsilon must lie in (0, 1)");
  if (!(a > 0.0)) throw Error(ErrorCode::kConfig, "--a must be > 0");
  if (grid_size < 2) throw Error(ErrorCode::kConfig, "--grid-size must be >= 2");
  if (!(tol > 0.0)) throw Error(ErrorCode::kConfig, "--tol must be > 0");
  if (!(delta_fuse > 0.0)) throw Error(ErrorCode::kConfig, "--delta-fuse must be > 0");
  if (num_new && *num_new < 0) throw Error(ErrorCode::kConfig, "--num-new must be >= 0");
}

nlohmann::json AugmentationConfig::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["resolution"] = resolution;
  j["epsilon"] = epsilon;
  j["a"] = a;
  j["grid_size"] = grid_size;
  j["tol"] = tol;
  j["delta_fuse"] = delta_fuse;
  j["num_new"] = num_new ? nlohmann::json(*num_new) : nlohmann::json("default");
  j["gfeat"] = graphmad::to_string(data);
  j["glabel"] = graphmad::to_string(label);
  j["label_orientation"] = graphmad::to_string(orientation);
  j["seed"] = seed;
  return j;
}

int cmd_augment(const AugmentationConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(do_augment, c, out, err);
}
int cmd_clusterpath(const AugmentationConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(do_clusterpath, c, out, err);
}
int cmd_estimate(const AugmentationConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(do_estimate, c, out, err);
}
int cmd_sample(const AugmentationConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(do_sample, c, out, err);
}

}  // namespace graphmad
