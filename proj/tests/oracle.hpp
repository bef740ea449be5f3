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

// Test-only reference solvers. Nothing here calls into the library's solver.

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

/// sum_i (u_i - x_i)^2 + gamma * sum_{i<j} w_ij |u_i - u_j| in one dimension.
inline double objective_1d(const std::vector<double>& x, const Mat& w, double gamma, const std::vector<double>& u) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    f += (u[i] - x[i]) * (u[i] - x[i]);
    for (std::size_t j = i + 1; j < x.size(); ++j) f += gamma * w[i][j] * std::abs(u[i] - u[j]);
  }
  return f;
}

/// Exact 1-D minimizer by enumerating weak orderings. On the cone of a fixed
/// weak ordering the objective is a smooth quadratic whose minimizer has a
/// closed form; the global minimizer is the best order-consistent candidate.
/// Exponential in T, meant for T <= 5.
inline std::vector<double> solve_1d(const std::vector<double>& x, const Mat& w, double gamma) {
  const std::size_t n = x.size();
  std::vector<std::size_t> rank(n, 0);
  std::vector<double> best;
  double best_f = std::numeric_limits<double>::infinity();
  for (;;) {
    std::size_t levels = 0;
    for (auto r : rank) levels = std::max(levels, r + 1);
    std::vector<bool> used(levels, false);
    for (auto r : rank) used[r] = true;
    bool surjective = true;
    for (bool b : used) surjective = surjective && b;
    if (surjective) {
      std::vector<double> value(levels, 0.0), count(levels, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        value[rank[i]] += x[i];
        count[rank[i]] += 1.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (rank[j] < rank[i]) value[rank[i]] -= gamma * w[i][j] / 2.0;
          if (rank[j] > rank[i]) value[rank[i]] += gamma * w[i][j] / 2.0;
        }
      }
      bool consistent = true;
      for (std::size_t l = 0; l < levels; ++l) value[l] /= count[l];
      for (std::size_t l = 1; l < levels; ++l) consistent = consistent && value[l] > value[l - 1];
      if (consistent) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = value[rank[i]];
        const double f = objective_1d(x, w, gamma, u);
        if (f < best_f) {
          best_f = f;
          best = u;
        }
      }
    }
    std::size_t k = 0;
    while (k < n && ++rank[k] == n) rank[k++] = 0;
    if (k == n) break;
  }
  return best;
}

/// Two points, one weight: each moves gamma * w / 2 toward the other until
/// they meet at the midpoint.
inline std::pair<double, double> two_point(double a, double b, double w, double gamma) {
  const double shift = gamma * w / 2.0;
  const double mid = (a + b) / 2.0;
  if (2.0 * shift >= std::abs(b - a)) return {mid, mid};
  const double dir = b > a ? 1.0 : -1.0;
  return {a + dir * shift, b - dir * shift};
}

/// Smallest gamma on `gammas` (ascending) at which the oracle fuses i and j.
inline double first_fusion(const std::vector<double>& x, const Mat& w, const std::vector<double>& gammas,
                           std::size_t i, std::size_t j) {
  for (double g : gammas) {
    auto u = solve_1d(x, w, g);
    if (std::abs(u[i] - u[j]) <= 1e-12) return g;
  }
  return std::numeric_limits<double>::infinity();
}

inline Mat uniform_weights(std::size_t n) {
  Mat w(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) w[i][i] = 0.0;
  return w;
}

inline Mat class_weights(const std::vector<int>& cls, double eps) {
  Mat w(cls.size(), std::vector<double>(cls.size(), 0.0));
  for (std::size_t i = 0; i < cls.size(); ++i) {
    for (std::size_t j = 0; j < cls.size(); ++j) {
      if (i != j) w[i][j] = cls[i] == cls[j] ? 1.0 : eps;
    }
  }
  return w;
}

}  // namespace oracle
