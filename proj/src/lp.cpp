#include "lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hilbert::lp {
namespace {

constexpr double kPivotEps = 1e-11;

struct Tableau {
  // Rows 0..m-1 are constraints, row m is the objective (reduced costs, stored
  // as -c so that a negative entry marks an improving column).
  Eigen::MatrixXd t;
  std::vector<int> basis;
  int m = 0;
  int cols = 0;  // structural + slack + artificial columns, rhs is column `cols`

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int r = 0; r <= m; ++r) {
      if (r != row && t(r, col) != 0.0) {
        t.row(r) -= t(r, col) * t.row(row);
      }
    }
    basis[row] = col;
  }

  // Returns false when the objective is unbounded on the allowed columns.
  bool optimize(int allowed_cols) {
    for (int guard = 0; guard < 100000; ++guard) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (t(m, j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) > kPivotEps) {
          const double ratio = t(i, cols) / t(i, enter);
          if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave >= 0 &&
                                       basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }
};

}  // namespace

Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(A.rows());
  const int k = static_cast<int>(A.cols());
  int artificial = 0;
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) ++artificial;
  }
  const int structural = 2 * k;
  const int art_begin = structural + m;
  const int cols = art_begin + artificial;

  Tableau tab;
  tab.m = m;
  tab.cols = cols;
  tab.t = Eigen::MatrixXd::Zero(m + 1, cols + 1);
  tab.basis.assign(m, -1);

  int next_art = art_begin;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.block(i, 0, 1, k) = sign * A.row(i);
    tab.t.block(i, k, 1, k) = -sign * A.row(i);
    tab.t(i, structural + i) = sign;
    tab.t(i, cols) = sign * b(i);
    if (sign > 0.0) {
      tab.basis[i] = structural + i;
    } else {
      tab.t(i, next_art) = 1.0;
      tab.basis[i] = next_art++;
    }
  }

  Result result;
  if (artificial > 0) {
    // Phase 1: maximize -sum(artificials).
    tab.t.row(m).setZero();
    for (int j = art_begin; j < cols; ++j) tab.t(m, j) = 1.0;
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] >= art_begin) tab.t.row(m) -= tab.t.row(i);
    }
    tab.optimize(cols);
    if (tab.t(m, cols) < -1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
      result.status = Status::Infeasible;
      return result;
    }
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < art_begin) continue;
      for (int j = 0; j < art_begin; ++j) {
        if (std::abs(tab.t(i, j)) > kPivotEps) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  tab.t.row(m).setZero();
  tab.t.block(m, 0, 1, k) = -c.transpose();
  tab.t.block(m, k, 1, k) = c.transpose();
  for (int i = 0; i < m; ++i) {
    const int j = tab.basis[i];
    if (j < art_begin && tab.t(m, j) != 0.0) tab.t.row(m) -= tab.t(m, j) * tab.t.row(i);
  }
  if (!tab.optimize(art_begin)) {
    result.status = Status::Unbounded;
    return result;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < m; ++i) z(tab.basis[i]) = tab.t(i, cols);
  result.x = z.head(k) - z.segment(k, k);
  result.value = c.dot(result.x);
  result.status = Status::Optimal;
  return result;
}

}  // namespace hilbert::lp
