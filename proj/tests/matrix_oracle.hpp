// Copyright 2026 The GSG-I Lab Authors.
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

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace gsgi::testing {

/// Value of a zero-sum matrix game by support enumeration. Independent of
/// the simplex solver; only meant for small nondegenerate matrices.
inline std::optional<double> support_enumeration_value(const Eigen::MatrixXd& G, double tol = 1e-9) {
  const int m = static_cast<int>(G.rows()), n = static_cast<int>(G.cols());
  auto subsets = [](int size, int k) {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << size); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
      std::vector<int> s;
      for (int i = 0; i < size; ++i) {
        if (mask & (1 << i)) s.push_back(i);
      }
      out.push_back(std::move(s));
    }
    return out;
  };
  for (int k = 1; k <= std::min(m, n); ++k) {
    for (const auto& rows : subsets(m, k)) {
      for (const auto& cols : subsets(n, k)) {
        // Unknowns (y_T, v): G_ST y = v 1, 1'y = 1; likewise for x_S.
        Eigen::MatrixXd Ay = Eigen::MatrixXd::Zero(k + 1, k + 1), Ax = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) {
            Ay(a, b) = G(rows[std::size_t(a)], cols[std::size_t(b)]);
            Ax(a, b) = G(rows[std::size_t(b)], cols[std::size_t(a)]);
          }
          Ay(a, k) = -1.0;
          Ax(a, k) = -1.0;
          Ay(k, a) = 1.0;
          Ax(k, a) = 1.0;
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
        rhs(k) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> ly(Ay), lx(Ax);
        if (!ly.isInvertible() || !lx.isInvertible()) continue;
        const Eigen::VectorXd sy = ly.solve(rhs), sx = lx.solve(rhs);
        if (sy.head(k).minCoeff() < -tol || sx.head(k).minCoeff() < -tol) continue;
        if (std::abs(sy(k) - sx(k)) > 1e-7) continue;
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n), x = Eigen::VectorXd::Zero(m);
        for (int a = 0; a < k; ++a) {
          y(cols[std::size_t(a)]) = sy(a);
          x(rows[std::size_t(a)]) = sx(a);
        }
        const double v = sy(k);
        if ((G * y).maxCoeff() <= v + 1e-7 && (x.transpose() * G).minCoeff() >= v - 1e-7) return v;
      }
    }
  }
  return std::nullopt;
}

}  // namespace gsgi::testing
