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

#include "graphmad/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "graphmad/error.hpp"

namespace graphmad {
namespace {

namespace fs = std::filesystem;

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kLoad, "cannot open " + path.string());
  return in;
}

// Splits a line on commas and whitespace into integers. Blank lines yield
// an empty vector.
std::vector<long long> parse_ints(const std::string& line, const fs::path& file, std::size_t line_no) {
  std::vector<long long> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    long long v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) {
      throw Error(ErrorCode::kFormat,
                  file.filename().string() + ":" + std::to_string(line_no) + ": expected an integer");
    }
    out.push_back(v);
    p = next;
  }
  return out;
}

std::vector<long long> read_column(const fs::path& file) {
  auto in = open_input(file);
  std::vector<long long> values;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    auto v = parse_ints(line, file, no);
    if (v.empty()) continue;
    if (v.size() != 1) {
      throw Error(ErrorCode::kFormat, file.filename().string() + ":" + std::to_string(no) + ": expected one value");
    }
    values.push_back(v[0]);
  }
  return values;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kWrite, "cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::kWrite, "write failed for " + path.string());
}

}  // namespace

Dataset load_tudataset(const fs::path& data_dir, const std::string& name, LoadStats* stats) {
  const fs::path dir = data_dir / name;
  const fs::path a_file = dir / (name + "_A.txt");
  const fs::path ind_file = dir / (name + "_graph_indicator.txt");
  const fs::path lab_file = dir / (name + "_graph_labels.txt");
  for (const auto& f : {a_file, ind_file, lab_file}) {
    if (!fs::exists(f)) throw Error(ErrorCode::kLoad, "missing file " + f.string());
  }

  const auto indicator = read_column(ind_file);
  const auto raw_labels = read_column(lab_file);
  const auto graph_count = raw_labels.size();
  if (graph_count == 0) throw Error(ErrorCode::kFormat, lab_file.filename().string() + ": no graphs");

  // Local node index within its graph, in order of appearance.
  std::vector<int> local(indicator.size());
  std::vector<int> sizes(graph_count, 0);
  for (std::size_t n = 0; n < indicator.size(); ++n) {
    const long long g = indicator[n];
    if (g < 1 || static_cast<std::size_t>(g) > graph_count) {
      throw Error(ErrorCode::kFormat, ind_file.filename().string() + ":" + std::to_string(n + 1) +
                                          ": graph id " + std::to_string(g) + " has no label");
    }
    local[n] = sizes[static_cast<std::size_t>(g - 1)]++;
  }
  for (std::size_t g = 0; g < graph_count; ++g) {
    if (sizes[g] == 0) throw Error(ErrorCode::kFormat, "graph " + std::to_string(g + 1) + " has 0 nodes");
  }

  std::vector<std::vector<Edge>> edges(graph_count);
  std::size_t directed_entries = 0;
  {
    auto in = open_input(a_file);
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
      auto v = parse_ints(line, a_file, no);
      if (v.empty()) continue;
      if (v.size() != 2) {
        throw Error(ErrorCode::kFormat, a_file.filename().string() + ":" + std::to_string(no) + ": expected 'i, j'");
      }
      for (auto x : v) {
        if (x < 1 || static_cast<std::size_t>(x) > indicator.size()) {
          throw Error(ErrorCode::kFormat, a_file.filename().string() + ":" + std::to_string(no) + ": node " +
                                              std::to_string(x) + " is absent from the graph indicator");
        }
      }
      const auto i = static_cast<std::size_t>(v[0] - 1), j = static_cast<std::size_t>(v[1] - 1);
      if (indicator[i] != indicator[j]) {
        throw Error(ErrorCode::kFormat, a_file.filename().string() + ":" + std::to_string(no) +
                                            ": edge joins two different graphs");
      }
      edges[static_cast<std::size_t>(indicator[i] - 1)].emplace_back(local[i], local[j]);
      ++directed_entries;
    }
  }

  std::vector<long long> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::map<long long, int> class_of;
  for (std::size_t k = 0; k < distinct.size(); ++k) class_of[distinct[k]] = static_cast<int>(k);

  Dataset d;
  d.name = name;
  d.class_count = static_cast<int>(distinct.size());
  d.raw_labels = distinct;
  std::size_t loops = 0, kept = 0;
  for (std::size_t g = 0; g < graph_count; ++g) {
    std::size_t dropped = 0;
    LabeledGraph lg;
    lg.graph = Graph::from_edges(sizes[g], std::move(edges[g]), &dropped);
    lg.label = class_of[raw_labels[g]];
    lg.class_count = d.class_count;
    loops += dropped;
    kept += lg.graph.edge_count();
    d.graphs.push_back(std::move(lg));
  }
  if (stats != nullptr) {
    stats->self_loops_dropped = loops;
    stats->duplicate_edges_collapsed = directed_entries - loops - kept;
  }
  validate(d);
  return d;
}

std::optional<std::vector<Eigen::VectorXd>> load_soft_labels(const fs::path& data_dir, const std::string& name) {
  const fs::path file = data_dir / name / (name + "_graph_soft_labels.txt");
  if (!fs::exists(file)) return std::nullopt;
  auto in = open_input(file);
  std::vector<Eigen::VectorXd> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(tok, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kFormat, file.filename().string() + ":" + std::to_string(no) + ": bad number");
      }
    }
    if (!out.empty() && static_cast<std::size_t>(out.front().size()) != vals.size()) {
      throw Error(ErrorCode::kFormat, file.filename().string() + ":" + std::to_string(no) + ": ragged row");
    }
    out.push_back(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  return out;
}

std::string format_soft_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_augmented_dataset(const fs::path& out_dir, const std::string& name, const Dataset& originals,
                             const std::vector<SoftLabeledGraph>& new_graphs, const nlohmann::json& manifest) {
  const int k_count = originals.class_count;
  if (static_cast<int>(originals.raw_labels.size()) != k_count) {
    throw Error(ErrorCode::kConfig, "dataset raw label table does not match its class count");
  }
  for (const auto& g : new_graphs) {
    if (g.soft_label.size() != k_count) throw Error(ErrorCode::kShape, "soft label length differs from K");
    if ((g.soft_label.array() < 0.0).any() || (g.soft_label.array() > 1.0).any() ||
        std::abs(g.soft_label.sum() - 1.0) > 1e-9) {
      throw Error(ErrorCode::kValidity, "soft label is not a probability vector");
    }
  }

  const fs::path dir = out_dir / name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kWrite, "cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream a_txt, ind_txt, lab_txt, soft_txt;
  long long offset = 0;
  std::size_t graph_id = 0;
  auto emit = [&](const Graph& g, int hard_label, const Eigen::VectorXd& soft) {
    ++graph_id;
    std::vector<Edge> directed;
    directed.reserve(2 * g.edges.size());
    for (auto [i, j] : g.edges) {
      directed.emplace_back(i, j);
      directed.emplace_back(j, i);
    }
    std::sort(directed.begin(), directed.end());
    for (auto [i, j] : directed) a_txt << (offset + i + 1) << ", " << (offset + j + 1) << '\n';
    for (int n = 0; n < g.node_count; ++n) ind_txt << graph_id << '\n';
    offset += g.node_count;
    lab_txt << originals.raw_labels[static_cast<std::size_t>(hard_label)] << '\n';
    for (Eigen::Index c = 0; c < soft.size(); ++c) {
      if (c > 0) soft_txt << ", ";
      soft_txt << format_soft_value(soft(c));
    }
    soft_txt << '\n';
  };
  for (const auto& g : originals.graphs) emit(g.graph, g.label, g.one_hot());
  for (const auto& g : new_graphs) {
    Eigen::Index arg = 0;
    g.soft_label.maxCoeff(&arg);
    emit(g.graph, static_cast<int>(arg), g.soft_label);
  }

  write_file(dir / (name + "_A.txt"), a_txt.str());
  write_file(dir / (name + "_graph_indicator.txt"), ind_txt.str());
  write_file(dir / (name + "_graph_labels.txt"), lab_txt.str());
  write_file(dir / (name + "_graph_soft_labels.txt"), soft_txt.str());

  nlohmann::json m = manifest.is_object() ? manifest : nlohmann::json::object();
  m["toolkit_version"] = GRAPHMAD_VERSION;
  m["name"] = name;
  m["counts"] = {{"original_graphs", originals.graphs.size()},
                 {"new_graphs", new_graphs.size()},
                 {"classes", k_count}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace graphmad
