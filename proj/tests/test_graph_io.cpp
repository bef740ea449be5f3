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

#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "graphmad/graph_io.hpp"
#include "graphmad/rng.hpp"
#include "tempdir.hpp"

using namespace graphmad;
using testing_util::read_text;
using testing_util::TempDir;
using testing_util::write_tu;

namespace {

ErrorCode load_error(const std::filesystem::path& dir, const std::string& name) {
  try {
    load_tudataset(dir, name);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a load failure");
  return ErrorCode::kConfig;
}

Dataset toy_dataset() {
  Dataset d;
  d.name = "TOY";
  d.class_count = 2;
  d.raw_labels = {-1, 1};
  d.graphs = {
      {Graph::from_edges(3, {{0, 1}, {1, 2}}), 0, 2},
      {Graph::from_edges(2, {}), 1, 2},
      {Graph::from_edges(4, {{0, 3}, {1, 2}, {0, 2}}), 1, 2},
  };
  return d;
}

}  // namespace

TEST_CASE("smallest valid dataset") {
  TempDir tmp;
  write_tu(tmp.path(), "S", "1, 2\n2, 1\n", "1\n1\n", "1\n");
  LoadStats stats;
  const auto d = load_tudataset(tmp.path(), "S", &stats);
  REQUIRE(d.size() == 1);
  CHECK(d.class_count == 1);
  CHECK(d.graphs[0].graph.node_count == 2);
  CHECK(d.graphs[0].graph.edges == std::vector<Edge>{{0, 1}});
  CHECK(stats.duplicate_edges_collapsed == 1);
  CHECK(d.graphs[0].one_hot() == Eigen::VectorXd::Ones(1));
}

TEST_CASE("whitespace and trailing newlines are tolerated") {
  TempDir tmp;
  write_tu(tmp.path(), "W", "  1 ,2\r\n2,3\n\n3 , 1\n\n", "1\n1\n1", "7\n\n");
  const auto d = load_tudataset(tmp.path(), "W");
  REQUIRE(d.size() == 1);
  CHECK(d.graphs[0].graph.edge_count() == 3);
}

TEST_CASE("raw labels remap in sorted order and self-loops are dropped") {
  TempDir tmp;
  write_tu(tmp.path(), "R", "1, 1\n1, 2\n3, 4\n", "1\n1\n2\n2\n3\n", "1\n-1\n5\n");
  LoadStats stats;
  const auto d = load_tudataset(tmp.path(), "R", &stats);
  CHECK(d.class_count == 3);
  CHECK(d.raw_labels == std::vector<long long>{-1, 1, 5});
  CHECK(d.labels() == std::vector<int>{1, 0, 2});
  CHECK(stats.self_loops_dropped == 1);
  CHECK(d.graphs[0].graph.edge_count() == 1);
  CHECK(d.graphs[2].graph.node_count == 1);
  // Node ids are local to each graph.
  CHECK(d.graphs[1].graph.edges == std::vector<Edge>{{0, 1}});
}

TEST_CASE("load errors") {
  TempDir tmp;
  CHECK(load_error(tmp.path(), "NOPE") == ErrorCode::kLoad);
  try {
    load_tudataset(tmp.path(), "NOPE");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("NOPE_A.txt") != std::string::npos);
  }
  // Node 3 is referenced but the indicator lists two nodes.
  write_tu(tmp.path(), "F1", "1, 3\n", "1\n1\n", "0\n");
  CHECK(load_error(tmp.path(), "F1") == ErrorCode::kFormat);
  // Graph 2 has no nodes.
  write_tu(tmp.path(), "F2", "1, 2\n", "1\n1\n3\n", "0\n1\n0\n");
  CHECK(load_error(tmp.path(), "F2") == ErrorCode::kFormat);
  // Edge across graphs.
  write_tu(tmp.path(), "F3", "1, 2\n", "1\n2\n", "0\n1\n");
  CHECK(load_error(tmp.path(), "F3") == ErrorCode::kFormat);
  // Non-numeric content.
  write_tu(tmp.path(), "F4", "1, x\n", "1\n1\n", "0\n");
  CHECK(load_error(tmp.path(), "F4") == ErrorCode::kFormat);
  // Label count differs from graph count.
  write_tu(tmp.path(), "F5", "1, 2\n", "1\n1\n", "0\n1\n");
  CHECK(load_error(tmp.path(), "F5") == ErrorCode::kFormat);
}

TEST_CASE("round trip of a hand-built dataset") {
  TempDir tmp;
  const auto d = toy_dataset();
  write_augmented_dataset(tmp.path(), "TOY", d, {});
  const auto back = load_tudataset(tmp.path(), "TOY");
  CHECK(back.class_count == d.class_count);
  CHECK(back.raw_labels == d.raw_labels);
  CHECK(back.graphs == d.graphs);
  const auto soft = load_soft_labels(tmp.path(), "TOY");
  REQUIRE(soft.has_value());
  REQUIRE(soft->size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK((*soft)[i] == d.graphs[i].one_hot());
  const auto manifest = nlohmann::json::parse(read_text(tmp / "TOY/manifest.json"));
  CHECK(manifest.contains("toolkit_version"));
}

TEST_CASE("identity augmentation equals a round trip") {
  TempDir tmp;
  write_augmented_dataset(tmp / "a", "TOY", toy_dataset(), {});
  const auto loaded = load_tudataset(tmp / "a", "TOY");
  write_augmented_dataset(tmp / "b", "TOY", loaded, {});
  for (const char* f : {"TOY_A.txt", "TOY_graph_indicator.txt", "TOY_graph_labels.txt", "TOY_graph_soft_labels.txt",
                        "manifest.json"}) {
    CHECK(read_text(tmp / "a" / "TOY" / f) == read_text(tmp / "b" / "TOY" / f));
  }
}

TEST_CASE("indicator covers originals and new graphs contiguously") {
  TempDir tmp;
  Dataset d;
  d.name = "ONE";
  d.class_count = 2;
  d.raw_labels = {0, 1};
  d.graphs = {{Graph::from_edges(2, {{0, 1}}), 0, 2}};
  SoftLabeledGraph extra{Graph::from_edges(3, {{0, 2}}), Eigen::Vector2d(0.25, 0.75)};
  write_augmented_dataset(tmp.path(), "ONE", d, {extra});
  CHECK(read_text(tmp / "ONE/ONE_graph_indicator.txt") == "1\n1\n2\n2\n2\n");
  CHECK(read_text(tmp / "ONE/ONE_A.txt") == "1, 2\n2, 1\n3, 5\n5, 3\n");
  CHECK(read_text(tmp / "ONE/ONE_graph_labels.txt") == "0\n1\n");
  CHECK(read_text(tmp / "ONE/ONE_graph_soft_labels.txt") == "1, 0\n0.25, 0.75\n");
}

TEST_CASE("soft labels survive at nine significant digits") {
  TempDir tmp;
  Dataset d;
  d.name = "SL";
  d.class_count = 3;
  d.raw_labels = {0, 1, 2};
  d.graphs = {{Graph::from_edges(1, {}), 0, 3}, {Graph::from_edges(1, {}), 1, 3}, {Graph::from_edges(1, {}), 2, 3}};
  graphmad::Rng rng(3);
  std::vector<SoftLabeledGraph> extra;
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector3d y(uniform01(rng), uniform01(rng), uniform01(rng));
    y /= y.sum();
    extra.push_back({Graph::from_edges(2, {{0, 1}}), y});
  }
  write_augmented_dataset(tmp.path(), "SL", d, extra);
  const auto soft = load_soft_labels(tmp.path(), "SL");
  REQUIRE(soft.has_value());
  REQUIRE(soft->size() == 53);
  for (std::size_t i = 0; i < extra.size(); ++i) {
    const auto& got = (*soft)[i + 3];
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(got(c) - extra[i].soft_label(c)) <= 5e-9 * std::abs(extra[i].soft_label(c)));
      CHECK(format_soft_value(got(c)) == format_soft_value(extra[i].soft_label(c)));
    }
  }
  const auto hard = load_tudataset(tmp.path(), "SL");
  for (std::size_t i = 0; i < extra.size(); ++i) {
    Eigen::Index arg = 0;
    extra[i].soft_label.maxCoeff(&arg);
    CHECK(hard.graphs[i + 3].label == arg);
  }
}

TEST_CASE("invalid soft labels are rejected") {
  TempDir tmp;
  const auto d = toy_dataset();
  CHECK_THROWS_AS(write_augmented_dataset(tmp.path(), "TOY", d, {{Graph::from_edges(1, {}), Eigen::Vector2d(0.6, 0.6)}}),
                  Error);
  CHECK_THROWS_AS(write_augmented_dataset(tmp.path(), "TOY", d, {{Graph::from_edges(1, {}), Eigen::Vector3d(1, 0, 0)}}),
                  Error);
}

TEST_CASE("soft labels are absent for plain datasets") {
  TempDir tmp;
  write_tu(tmp.path(), "P", "1, 2\n", "1\n1\n", "0\n");
  CHECK_FALSE(load_soft_labels(tmp.path(), "P").has_value());
}

TEST_CASE("graph normalization") {
  std::size_t loops = 0;
  const auto g = Graph::from_edges(3, {{2, 0}, {0, 2}, {1, 1}, {1, 0}}, &loops);
  CHECK(g.edges == std::vector<Edge>{{0, 1}, {0, 2}});
  CHECK(loops == 1);
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 2}}), Error);
  Dataset d = toy_dataset();
  CHECK_NOTHROW(validate(d));
  d.graphs.pop_back();
  d.graphs.pop_back();
  CHECK_THROWS_AS(validate(d), Error);
}

TEST_CASE("optional TUDataset counts") {
  // Real benchmark files are not shipped; point GRAPHMAD_TUDATASET_DIR at a
  // directory holding MUTAG/ and PROTEINS/ to enable these checks.
  const char* dir = std::getenv("GRAPHMAD_TUDATASET_DIR");
  if (dir == nullptr) return;
  const std::filesystem::path root(dir);
  if (std::filesystem::exists(root / "MUTAG")) {
    const auto d = load_tudataset(root, "MUTAG");
    CHECK(d.size() == 188);
    CHECK(d.class_count == 2);
  }
  if (std::filesystem::exists(root / "PROTEINS")) {
    const auto d = load_tudataset(root, "PROTEINS");
    CHECK(d.size() == 1113);
    CHECK(d.class_count == 2);
  }
}
