#pragma once

#include <Eigen/Dense>

namespace hilbert::lp {

enum class Status { Optimal, Unbounded, Infeasible };

struct Result {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
};

// maximize c.x subject to A x <= b, x free. Dense two-phase simplex with
// Bland's rule; meant for the small systems that describe bodies (n <= 9).
Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace hilbert::lp
