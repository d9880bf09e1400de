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

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

namespace gsgi {

enum class LpStatus { kOptimal, kUnbounded, kIterationLimit };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::kOptimal;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;     // primal solution
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dual;  // one per constraint row
  Scalar objective = 0;
  long pivots = 0;
};

/// maximize c'x subject to A x <= b, x >= 0, with b >= 0 so the slack basis is
/// feasible. Dense tableau simplex with Bland's rule.
template <typename DerivedA, typename DerivedB, typename DerivedC>
LpResult<typename DerivedA::Scalar> simplex_max(const Eigen::MatrixBase<DerivedA>& A,
                                                const Eigen::MatrixBase<DerivedB>& b,
                                                const Eigen::MatrixBase<DerivedC>& c,
                                                typename DerivedA::Scalar tol = 1e-12,
                                                long max_pivots = 100000) {
  using Scalar = typename DerivedA::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = A.rows(), n = A.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("LP dimension mismatch");
  if ((b.array() < 0).any()) throw std::invalid_argument("simplex_max needs b >= 0");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite()) throw std::domain_error("non-finite LP data");

  // Rows 0..m-1 are constraints, row m is the objective (reduced costs).
  Mat T = Mat::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.topRightCorner(m, 1) = b;
  T.bottomLeftCorner(1, n) = -c.transpose();
  Eigen::VectorXi basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis(i) = static_cast<int>(n + i);

  LpResult<Scalar> res;
  const Eigen::Index rhs = n + m;
  while (true) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (T(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) <= tol) continue;
      const Scalar ratio = T(i, rhs) / T(i, enter);
      if (ratio < best - tol || (std::abs(ratio - best) <= tol && basis(i) < basis(leave))) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      res.status = LpStatus::kUnbounded;
      return res;
    }
    if (++res.pivots > max_pivots) {
      res.status = LpStatus::kIterationLimit;
      return res;
    }
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basis(leave) = static_cast<int>(enter);
  }
  res.x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis(i) < n) res.x(basis(i)) = T(i, rhs);
  }
  res.dual = T.block(m, n, 1, m).transpose();
  res.objective = T(m, rhs);
  return res;
}

}  // namespace gsgi
