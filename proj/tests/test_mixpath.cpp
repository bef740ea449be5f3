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

#include "graphmad/mixpath.hpp"
#include "graphmad/rng.hpp"

using namespace graphmad;

namespace {

RowMatrix<double> column(std::initializer_list<double> v) {
  RowMatrix<double> m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

FusionWeights<double> uniform(Eigen::Index t) {
  Matrix<double> m = Matrix<double>::Ones(t, t);
  m.diagonal().setZero();
  return FusionWeights<double>::from_matrix(m);
}

RowMatrix<double> random_theta(Rng& rng, int t, int p) {
  RowMatrix<double> theta(t, p);
  for (int i = 0; i < t; ++i)
    for (int c = 0; c < p; ++c) theta(i, c) = uniform01(rng);
  return theta;
}

bool on_simplex(const Eigen::VectorXd& y, double tol) {
  return y.minCoeff() >= -tol && std::abs(y.sum() - 1.0) <= tol;
}

}  // namespace

TEST_CASE("branch selection on the three-point instance") {
  const auto path = trace_clusterpath(column({0.0, 1.0, 5.0}), uniform(3), LambdaGrid<double>::uniform(101));
  const auto k2 = select_branch_lambda(path, 2);
  CHECK(k2.index_sets == std::vector<std::vector<int>>{{0, 1}, {2}});
  CHECK(k2.lambda_star > 0.5);
  CHECK(k2.lambda_star < 0.51);
  CHECK_FALSE(k2.refined);
  CHECK_FALSE(k2.split_fallback);

  const auto k3 = select_branch_lambda(path, 3);
  CHECK(k3.lambda_star == 0.0);
  CHECK(k3.index_sets == std::vector<std::vector<int>>{{0}, {1}, {2}});

  const auto k1 = select_branch_lambda(path, 1);
  CHECK(k1.index_sets == std::vector<std::vector<int>>{{0, 1, 2}});
  std::size_t first_full = 0;
  while (path.cluster_counts[first_full] != 1) ++first_full;
  CHECK(k1.lambda_star == path.grid[first_full]);
  CHECK(k1.lambda_star < 0.76);

  CHECK_THROWS_AS(select_branch_lambda(path, 4), Error);
  CHECK_THROWS_AS(select_branch_lambda(path, 0), Error);
}

TEST_CASE("branch selection refines between coarse grid points") {
  // The pair fuses at 1/2 and all three at 3/4; this grid jumps from 3
  // clusters to 1, so 2 is only found by bisection.
  LambdaGrid<double> grid{{0.0, 0.45, 0.8, 1.0}};
  const auto path = trace_clusterpath(column({0.0, 1.0, 5.0}), uniform(3), grid);
  CHECK(path.cluster_counts == std::vector<int>{3, 3, 1, 1});
  const auto sel = select_branch_lambda(path, 2);
  CHECK(sel.refined);
  CHECK(sel.lambda_star > 0.5);
  CHECK(sel.lambda_star < 0.75);
  CHECK(sel.index_sets == std::vector<std::vector<int>>{{0, 1}, {2}});
}

TEST_CASE("branch selection falls back to splitting when fusion is simultaneous") {
  // Symmetric instance: 0 and 2 join 1 at the same lambda, so 2 clusters are
  // never observed.
  LambdaGrid<double> grid = LambdaGrid<double>::uniform(101);
  const auto path = trace_clusterpath(column({0.0, 1.0, 2.0}), uniform(3), grid);
  for (int c : path.cluster_counts) CHECK(c != 2);
  const auto sel = select_branch_lambda(path, 2);
  CHECK(sel.split_fallback);
  REQUIRE(sel.index_sets.size() == 2);
  std::vector<int> all;
  for (const auto& s : sel.index_sets) {
    CHECK_FALSE(s.empty());
    all.insert(all.end(), s.begin(), s.end());
  }
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<int>{0, 1, 2});
}

TEST_CASE("collapse examples") {
  Rng rng(4);
  const auto theta = random_theta(rng, 4, 3);
  RowMatrix<double> dup = theta;
  dup.row(3) = dup.row(2);
  const auto path = trace_clusterpath(dup, build_weights<double>({0, 0, 1, 1}, 0.1), LambdaGrid<double>::uniform(11));
  const auto ext = collapse_branches(path, {{0}, {1}, {2, 3}}, {0, 0, 1, 1}, 2);
  REQUIRE(ext.branch_count() == 3);
  for (std::size_t m = 0; m < path.grid.size(); ++m) {
    CHECK(ext.trajectories[0].row(m) == path.centroids[m].row(0));
    CHECK((ext.trajectories[2].row(m) - path.centroids[m].row(2)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK(ext.origin_labels[2] == Eigen::Vector2d(0.0, 1.0));
  CHECK(ext.fusion_labels[0] == Eigen::Vector2d(0.5, 0.5));

  const auto path3 = trace_clusterpath(random_theta(rng, 4, 2), uniform(4), LambdaGrid<double>::uniform(5));
  const auto e3 = collapse_branches(path3, {{0, 1, 2}, {3}}, {0, 0, 1, 1}, 2);
  CHECK(e3.origin_labels[0](0) == doctest::Approx(2.0 / 3.0));
  CHECK(e3.origin_labels[0](1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("collapse rejects bad partitions") {
  const auto path = trace_clusterpath(column({0.0, 1.0, 2.0}), uniform(3), LambdaGrid<double>::uniform(5));
  auto code_of = [&](const std::vector<std::vector<int>>& sets) {
    try {
      collapse_branches(path, sets, {0, 0, 1}, 2);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kConfig;
  };
  CHECK(code_of({{0, 1, 2}, {}}) == ErrorCode::kPartition);
  CHECK(code_of({{0, 1}}) == ErrorCode::kPartition);
  CHECK(code_of({{0, 1}, {1, 2}}) == ErrorCode::kPartition);
}

TEST_CASE("mass conservation, simplex labels and fusion endpoint") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const int t = 9;
    const auto theta = random_theta(rng, t, 4);
    std::vector<int> cls(t);
    for (int i = 0; i < t; ++i) cls[i] = i % 3;
    const auto path = trace_clusterpath(theta, build_weights<double>(cls, 0.05), LambdaGrid<double>::uniform(31));
    const RowMatrix<double> grand_mean = theta.colwise().mean();
    const auto sel = select_branch_lambda(path, 3);
    const auto ext = collapse_branches(path, sel.index_sets, cls, 3, sel.lambda_star);
    for (std::size_t m = 0; m < path.grid.size(); ++m) {
      Eigen::RowVectorXd lhs = Eigen::RowVectorXd::Zero(4);
      for (std::size_t k = 0; k < ext.branch_count(); ++k)
        lhs += static_cast<double>(ext.index_sets[k].size()) * ext.trajectories[k].row(m);
      const Eigen::RowVectorXd rhs = path.centroids[m].colwise().sum();
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
    for (auto orientation : {LabelOrientation::kEndpointConsistent, LabelOrientation::kRateOnOrigin}) {
      const auto lp = build_label_paths(ext, orientation);
      for (std::size_t k = 0; k < ext.branch_count(); ++k) {
        CHECK(lp.rates[k].values.front() == 0.0);
        CHECK(lp.rates[k].values.back() == 1.0);
        for (const auto& y : lp.labels[k]) CHECK(on_simplex(y, 1e-12));
        CHECK(ext.trajectories[k].row(ext.grid.size() - 1) == grand_mean);
      }
      if (orientation == LabelOrientation::kEndpointConsistent) {
        for (std::size_t k = 0; k < ext.branch_count(); ++k) {
          CHECK(lp.labels[k].front() == ext.origin_labels[k]);
          CHECK(lp.labels[k].back() == ext.fusion_labels[k]);
        }
      } else {
        for (std::size_t k = 0; k < ext.branch_count(); ++k) {
          CHECK(lp.labels[k].front() == ext.fusion_labels[k]);
          CHECK(lp.labels[k].back() == ext.origin_labels[k]);
        }
      }
    }
  }
}

TEST_CASE("rate of a linear one-dimensional branch") {
  // u(lambda) = 2 + 2 lambda: g = (lambda^2 + 2 lambda) / 3.
  LambdaGrid<double> grid = LambdaGrid<double>::uniform(11, 0.9);
  RowMatrix<double> traj(static_cast<Eigen::Index>(grid.size()), 1);
  for (std::size_t m = 0; m < grid.size(); ++m) traj(m, 0) = 2 + 2 * grid[m];
  const auto curve = compute_rate(traj, grid);
  CHECK(curve.values.front() == 0.0);
  CHECK(curve.values.back() == 1.0);
  CHECK_FALSE(curve.clamped);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double l = grid[m];
    CHECK(curve.values[m] == doctest::Approx((l * l + 2 * l) / 3).epsilon(1e-12));
  }
  CHECK(std::abs(rate_from_norms(4.0, 16.0, 9.0, 0.5) - 5.0 / 12.0) <= 1e-12);
  CHECK(std::abs(rate_at(traj, grid, 0.5) - 5.0 / 12.0) <= 1e-12);
}

TEST_CASE("constant branch uses lambda as its rate") {
  LambdaGrid<double> grid = LambdaGrid<double>::uniform(6);
  RowMatrix<double> traj = RowMatrix<double>::Constant(static_cast<Eigen::Index>(grid.size()), 2, 0.3);
  const auto curve = compute_rate(traj, grid);
  for (std::size_t m = 0; m < grid.size(); ++m) CHECK(curve.values[m] == grid[m]);
}

TEST_CASE("non-monotone norms are clamped and reported") {
  LambdaGrid<double> grid{{0.0, 0.5, 1.0}};
  RowMatrix<double> traj(3, 1);
  traj << 1.0, 3.0, 2.0;
  const auto curve = compute_rate(traj, grid);
  CHECK(curve.clamped);
  CHECK(curve.values[1] == 1.0);
}

TEST_CASE("rate depends only on norms") {
  Rng rng(2);
  LambdaGrid<double> grid = LambdaGrid<double>::uniform(8);
  RowMatrix<double> traj(static_cast<Eigen::Index>(grid.size()), 4);
  for (Eigen::Index m = 0; m < traj.rows(); ++m)
    for (int c = 0; c < 4; ++c) traj(m, c) = uniform01(rng) + static_cast<double>(m);
  RowMatrix<double> perm(traj.rows(), 4);
  perm.col(0) = traj.col(2);
  perm.col(1) = traj.col(0);
  perm.col(2) = traj.col(3);
  perm.col(3) = traj.col(1);
  const auto a = compute_rate(traj, grid), b = compute_rate(perm, grid);
  for (std::size_t m = 0; m < grid.size(); ++m) CHECK(a.values[m] == doctest::Approx(b.values[m]).epsilon(1e-14));
}

TEST_CASE("label_at examples") {
  const Eigen::Vector2d y0(1.0, 0.0), y1(0.5, 0.5);
  CHECK(label_at<double>(y0, y1, 1.0) == y0);
  CHECK(label_at<double>(y0, y1, 0.0) == y1);
  CHECK(label_at<double>(y0, y1, 0.5) == Eigen::Vector2d(0.75, 0.25));
  CHECK(origin_weight(0.25, LabelOrientation::kEndpointConsistent) == 0.75);
  CHECK(origin_weight(0.25, LabelOrientation::kRateOnOrigin) == 0.25);
  CHECK(parse_orientation("paper") == LabelOrientation::kRateOnOrigin);
  CHECK(parse_orientation("endpoint-consistent") == LabelOrientation::kEndpointConsistent);
  CHECK_THROWS_AS(parse_orientation("sideways"), Error);
}

TEST_CASE("interpolation between grid points") {
  LambdaGrid<double> grid{{0.0, 0.5, 1.0}};
  RowMatrix<double> traj(3, 2);
  traj << 0, 1, 1, 1, 3, 0;
  CHECK(interpolate(traj, grid, 0.25) == Eigen::Vector2d(0.5, 1.0));
  CHECK(interpolate(traj, grid, 0.75) == Eigen::Vector2d(2.0, 0.5));
  CHECK(interpolate(traj, grid, 1.0) == Eigen::Vector2d(3.0, 0.0));
  CHECK(interpolate(traj, grid, 0.0) == Eigen::Vector2d(0.0, 1.0));
}

TEST_CASE("extended clusterpath JSON") {
  const auto path = trace_clusterpath(column({0.0, 1.0, 5.0}), uniform(3), LambdaGrid<double>::uniform(21));
  const auto sel = select_branch_lambda(path, 2);
  const auto ext = collapse_branches(path, sel.index_sets, {0, 0, 1}, 2, sel.lambda_star);
  const auto lp = build_label_paths(ext, LabelOrientation::kEndpointConsistent);
  const auto j = to_json(ext, lp, true);
  CHECK(j["lambda_star"].get<double>() == sel.lambda_star);
  CHECK(j["branches"].size() == 2);
  CHECK(j["branches"][0].contains("trajectory"));
  CHECK_FALSE(to_json(ext, lp, false)["branches"][0].contains("trajectory"));
}
