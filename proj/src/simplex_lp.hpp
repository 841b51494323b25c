#pragma once

// Dense tableau simplex for   max obj^T y  s.t.  A y <= b,  y >= 0,
// with b >= 0 so the origin is feasible. Bland's rule; sized for the
// handful of variables that equilibrium geometry needs.

#include <Eigen/Dense>

namespace hyperchain::detail {

struct LpResult {
  bool optimal = false;  // false: unbounded or iteration cap hit
  Eigen::VectorXd y;
  double value = 0.0;
};

inline LpResult maximize_from_origin(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& obj, int max_iterations = 10000) {
  const Eigen::Index m = a.rows(), nv = a.cols();
  const Eigen::Index cols = nv + m + 1;
  constexpr double eps = 1e-12;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  t.topLeftCorner(m, nv) = a;
  t.block(0, nv, m, m).setIdentity();
  t.col(cols - 1).head(m) = b;
  t.row(m).head(nv) = obj.transpose();
  Eigen::VectorXi basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = static_cast<int>(nv + i);

  LpResult result;
  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols - 1; ++j) {
      if (t(m, j) > eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      result.optimal = true;
      break;
    }
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) <= eps) continue;
      const double ratio = t(i, cols - 1) / t(i, enter);
      if (leave < 0 || ratio < best - eps ||
          (ratio <= best + eps && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return result;  // unbounded
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave || t(i, enter) == 0.0) continue;
      t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[leave] = static_cast<int>(enter);
  }
  if (!result.optimal) return result;

  result.y = Eigen::VectorXd::Zero(nv);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < nv) result.y[basis[i]] = t(i, cols - 1);
  result.value = obj.dot(result.y);
  return result;
}

}  // namespace hyperchain::detail
