#include "hilbert/geometry.hpp"

#include "lp.hpp"
#include "polytope_conversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hilbert {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::DegenerateChord: return "DegenerateChord";
    case ErrorCode::InvalidBody: return "InvalidBody";
    case ErrorCode::InvalidMap: return "InvalidMap";
    case ErrorCode::MapLeak: return "MapLeak";
    case ErrorCode::SamplingFailure: return "SamplingFailure";
    case ErrorCode::InsufficientSweep: return "InsufficientSweep";
    case ErrorCode::FixedPointDetected: return "FixedPointDetected";
    case ErrorCode::NotEllipsoid: return "NotEllipsoid";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::InvalidBody,
                "ambient dimension " + std::to_string(dim) + " outside [1, 8]");
  }
}

// Stable positive root t of q(e + t d) = 1 given slack m = 1 - q(e) > 0,
// p = e^T Q d and dqd = d^T Q d.
double ellipsoid_exit(double m, double p, double dqd) {
  const double root = std::sqrt(p * p + dqd * m);
  return p >= 0.0 ? m / (p + root) : (root - p) / dqd;
}

double polytope_exit(const ConvexBody& body, const Vector& from, const Vector& dir) {
  const Eigen::VectorXd slack = body.offsets() - body.normals() * from;
  const Eigen::VectorXd rate = body.normals() * dir;
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    if (rate(i) > 0.0) t = std::min(t, slack(i) / rate(i));
  }
  return t;
}

double quad_form(const SmallMatrix& q, const Vector& e) { return e.dot(q * e); }

// 1 - (p-c)'Q(p-c) accumulated in extended precision; near the boundary the
// slack is tiny and double accumulation would dominate its relative error.
double ellipsoid_slack(const SmallMatrix& q, const Vector& p, const Vector& c) {
  long double e[kMaxLift];
  for (Eigen::Index i = 0; i < p.size(); ++i) e[i] = static_cast<long double>(p(i)) - c(i);
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    long double row = 0.0L;
    for (Eigen::Index j = 0; j < p.size(); ++j) row += static_cast<long double>(q(i, j)) * e[j];
    acc += row * e[i];
  }
  return static_cast<double>(1.0L - acc);
}

double exact_ellipsoid_gap(const ConvexBody& body, const Vector& p) {
  const Vector w = body.shape_eigenvectors().transpose() * (p - body.center());
  const Vector& q = body.shape_eigenvalues();
  const int n = static_cast<int>(q.size());
  const double qmax = q(n - 1);
  double top_weight = 0.0;
  for (int i = 0; i < n; ++i) {
    if (q(i) >= qmax * (1.0 - 1e-12)) top_weight += w(i) * w(i);
  }
  auto excess = [&](double mu, bool skip_top) {
    double s = -1.0;
    for (int i = 0; i < n; ++i) {
      if (skip_top && q(i) >= qmax * (1.0 - 1e-12)) continue;
      const double den = 1.0 - mu * q(i);
      s += q(i) * w(i) * w(i) / (den * den);
    }
    return s;
  };
  auto distance_at = [&](double mu) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = w(i) / (1.0 - mu * q(i));
    return (v - w).norm();
  };

  const double mu_cap = 1.0 / qmax;
  const double scale = 1.0 / std::sqrt(q(0));
  if (top_weight <= 1e-24 * scale * scale) {
    // The nearest point may sit on the flat top-eigenvalue circle.
    const double f_cap = excess(mu_cap, true);
    if (f_cap <= 0.0) {
      Vector v(n);
      bool placed = false;
      for (int i = 0; i < n; ++i) {
        if (q(i) >= qmax * (1.0 - 1e-12)) {
          v(i) = placed ? 0.0 : std::sqrt(-f_cap / qmax);
          placed = true;
        } else {
          v(i) = w(i) / (1.0 - mu_cap * q(i));
        }
      }
      return (v - w).norm();
    }
  }
  double lo = 0.0;
  double hi = mu_cap;
  for (int it = 0; it < 2000 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid, false) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return distance_at(lo);
}

}  // namespace

ConvexBody ConvexBody::from_halfspaces(Kind kind, const Eigen::MatrixXd& normals,
                                       const Eigen::VectorXd& offsets) {
  const int dim = static_cast<int>(normals.cols());
  check_dim(dim);
  if (normals.rows() != offsets.size() || normals.rows() == 0) {
    throw Error(ErrorCode::InvalidBody, "halfspace matrix and offset vector sizes differ");
  }
  if (!normals.allFinite() || !offsets.allFinite()) {
    throw Error(ErrorCode::InvalidBody, "non-finite halfspace data");
  }
  ConvexBody body;
  body.kind_ = kind;
  body.dim_ = dim;
  body.normals_ = normals;
  body.offsets_ = offsets;
  for (Eigen::Index i = 0; i < normals.rows(); ++i) {
    const double len = normals.row(i).norm();
    if (len <= 1e-300) {
      throw Error(ErrorCode::InvalidBody, "zero normal in row " + std::to_string(i));
    }
    body.normals_.row(i) /= len;
    body.offsets_(i) /= len;
  }

  body.box_lower_.resize(dim);
  body.box_upper_.resize(dim);
  for (int j = 0; j < dim; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
    for (double sign : {1.0, -1.0}) {
      c(j) = sign;
      const lp::Result r = lp::maximize(c, body.normals_, body.offsets_);
      if (r.status == lp::Status::Infeasible) {
        throw Error(ErrorCode::InvalidBody, "halfspaces have an empty intersection");
      }
      if (r.status == lp::Status::Unbounded) {
        throw Error(ErrorCode::InvalidBody,
                    "halfspaces do not bound coordinate " + std::to_string(j));
      }
      if (sign > 0.0) {
        body.box_upper_(j) = r.value;
      } else {
        body.box_lower_(j) = -r.value;
      }
    }
  }

  // Chebyshev center: maximize r subject to A_i x + r <= b_i.
  Eigen::MatrixXd cheb(normals.rows(), dim + 1);
  cheb.leftCols(dim) = body.normals_;
  cheb.col(dim).setOnes();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim + 1);
  c(dim) = 1.0;
  const lp::Result r = lp::maximize(c, cheb, body.offsets_);
  if (r.status != lp::Status::Optimal) {
    throw Error(ErrorCode::InvalidBody, "could not certify an interior point");
  }
  body.anchor_ = r.x.head(dim);
  const Eigen::VectorXd slack = body.offsets_ - body.normals_ * body.anchor_;
  body.anchor_radius_ = slack.minCoeff();
  if (!(body.anchor_radius_ > 1e3 * kTolGeom * std::max(1.0, body.diameter_bound()))) {
    throw Error(ErrorCode::InvalidBody, "interior is empty");
  }
  return body;
}

ConvexBody ConvexBody::hpolytope(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets) {
  return from_halfspaces(Kind::HPolytope, normals, offsets);
}

ConvexBody ConvexBody::vpolytope(const std::vector<Vector>& vertices) {
  if (vertices.empty()) throw Error(ErrorCode::InvalidBody, "no vertices");
  const int dim = static_cast<int>(vertices.front().size());
  check_dim(dim);
  for (const auto& v : vertices) {
    if (v.size() != dim) throw Error(ErrorCode::InvalidBody, "vertices of mixed dimension");
    if (!all_finite(v)) throw Error(ErrorCode::InvalidBody, "non-finite vertex");
  }
  if (static_cast<int>(vertices.size()) < dim + 1) {
    throw Error(ErrorCode::InvalidBody, "need at least dim + 1 vertices");
  }
  Eigen::MatrixXd diffs(dim, static_cast<Eigen::Index>(vertices.size()) - 1);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    diffs.col(static_cast<Eigen::Index>(i) - 1) = vertices[i] - vertices[0];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(diffs);
  lu.setThreshold(1e-10);
  if (lu.rank() < dim) {
    throw Error(ErrorCode::InvalidBody, "vertices are not affinely spanning");
  }
  const detail::Halfspaces h = detail::facets_of_hull(vertices);
  ConvexBody body = from_halfspaces(Kind::VPolytope, h.normals, h.offsets);
  body.vertices_ = vertices;
  return body;
}

ConvexBody ConvexBody::ellipsoid(const Vector& center, const SmallMatrix& shape) {
  const int dim = static_cast<int>(center.size());
  check_dim(dim);
  if (shape.rows() != dim || shape.cols() != dim) {
    throw Error(ErrorCode::InvalidBody, "shape matrix does not match center dimension");
  }
  if (!all_finite(center) || !shape.allFinite()) {
    throw Error(ErrorCode::InvalidBody, "non-finite ellipsoid data");
  }
  const double scale = shape.cwiseAbs().maxCoeff();
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
    throw Error(ErrorCode::InvalidBody, "shape matrix is not symmetric");
  }
  ConvexBody body;
  body.kind_ = Kind::Ellipsoid;
  body.dim_ = dim;
  body.center_ = center;
  body.shape_ = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(body.shape_);
  body.eigenvalues_ = eig.eigenvalues();
  body.eigenvectors_ = eig.eigenvectors();
  if (!(body.eigenvalues_(0) > 1e-14 * std::max(1.0, scale))) {
    throw Error(ErrorCode::InvalidBody, "shape matrix is not positive definite");
  }
  const Vector root = body.eigenvalues_.cwiseSqrt();
  body.shape_sqrt_ = body.eigenvectors_ * root.asDiagonal() * body.eigenvectors_.transpose();
  body.shape_sqrt_inv_ =
      body.eigenvectors_ * root.cwiseInverse().asDiagonal() * body.eigenvectors_.transpose();
  const SmallMatrix inv = body.eigenvectors_ * body.eigenvalues_.cwiseInverse().asDiagonal() *
                          body.eigenvectors_.transpose();
  const Vector half = inv.diagonal().cwiseSqrt();
  body.box_lower_ = center - half;
  body.box_upper_ = center + half;
  body.anchor_ = center;
  body.anchor_radius_ = 1.0 / root(dim - 1);
  return body;
}

ConvexBody ConvexBody::unit_ball(int dim) {
  check_dim(dim);
  return ellipsoid(Vector::Zero(dim), SmallMatrix::Identity(dim, dim));
}

ConvexBody ConvexBody::cube(int dim, double half_width) {
  check_dim(dim);
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidBody, "cube half-width must be positive");
  Eigen::MatrixXd a(2 * dim, dim);
  a.topRows(dim) = Eigen::MatrixXd::Identity(dim, dim);
  a.bottomRows(dim) = -Eigen::MatrixXd::Identity(dim, dim);
  return hpolytope(a, Eigen::VectorXd::Constant(2 * dim, half_width));
}

ConvexBody ConvexBody::simplex(int vertices) {
  if (vertices < 2 || vertices > kMaxDim + 1) {
    throw Error(ErrorCode::InvalidBody, "simplex needs between 2 and 9 barycentric coordinates");
  }
  const int dim = vertices - 1;
  Eigen::MatrixXd a(dim + 1, dim);
  a.topRows(dim) = -Eigen::MatrixXd::Identity(dim, dim);
  a.row(dim).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim + 1);
  b(dim) = 1.0;
  return from_halfspaces(Kind::Simplex, a, b);
}

Vector ConvexBody::chart(const Vector& barycentric) const {
  if (kind_ != Kind::Simplex) throw Error(ErrorCode::InvalidArgument, "chart needs a simplex body");
  if (barycentric.size() != dim_ + 1) {
    throw Error(ErrorCode::DimensionMismatch, "barycentric vector has wrong length");
  }
  return barycentric.head(dim_);
}

Vector ConvexBody::unchart(const Vector& u) const {
  if (kind_ != Kind::Simplex) throw Error(ErrorCode::InvalidArgument, "unchart needs a simplex body");
  if (u.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "chart vector has wrong length");
  Vector p(dim_ + 1);
  p.head(dim_) = u;
  p(dim_) = 1.0 - u.sum();
  return p;
}

double ConvexBody::gauge_residual(const Vector& p) const {
  if (is_ellipsoid()) return -ellipsoid_slack(shape_, p, center_);
  return (normals_ * p - offsets_).maxCoeff();
}

bool ConvexBody::same_as(const ConvexBody& other) const {
  if (this == &other) return true;
  if (kind_ != other.kind_ || dim_ != other.dim_) return false;
  if (is_ellipsoid()) return center_ == other.center_ && shape_ == other.shape_;
  return normals_.rows() == other.normals_.rows() && normals_ == other.normals_ &&
         offsets_ == other.offsets_;
}

Containment contains(const ConvexBody& body, const Vector& p, double tol) {
  if (p.size() != body.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "point has dimension " + std::to_string(p.size()) +
                                                  ", body has " + std::to_string(body.dim()));
  }
  if (!all_finite(p)) return {Location::Exterior, -std::numeric_limits<double>::infinity()};
  const double margin = -body.gauge_residual(p);
  if (margin > tol) return {Location::Interior, margin};
  if (margin >= -tol) return {Location::Boundary, margin};
  return {Location::Exterior, margin};
}

void require_interior(const ConvexBody& body, const Vector& p, std::string_view what) {
  const Containment c = contains(body, p);
  if (c.location != Location::Interior) {
    throw Error(ErrorCode::NotInterior,
                std::string(what) + " is not strictly interior (margin " + std::to_string(c.margin) + ")");
  }
}

Chord chord(const ConvexBody& body, const Vector& x, const Vector& y) {
  require_interior(body, x, "x");
  require_interior(body, y, "y");
  const Vector d = y - x;
  if (d.norm() <= kEpsDir) {
    throw Error(ErrorCode::DegenerateChord, "x and y coincide");
  }
  Chord c;
  if (body.is_ellipsoid()) {
    const SmallMatrix& q = body.shape();
    const Vector ex = x - body.center();
    const Vector ey = y - body.center();
    const Vector qd = q * d;
    const double dqd = d.dot(qd);
    c.ahead = ellipsoid_exit(ellipsoid_slack(q, y, body.center()), ey.dot(qd), dqd);
    c.back = ellipsoid_exit(ellipsoid_slack(q, x, body.center()), -ex.dot(qd), dqd);
  } else {
    c.ahead = polytope_exit(body, y, d);
    c.back = polytope_exit(body, x, -d);
  }
  c.s_a = -c.back;
  c.s_b = 1.0 + c.ahead;
  c.a = x - c.back * d;
  c.b = y + c.ahead * d;
  return c;
}

double boundary_gap(const ConvexBody& body, const Vector& p, GapMode mode) {
  require_interior(body, p, "point");
  if (body.is_polytope()) {
    return (body.offsets() - body.normals() * p).minCoeff();
  }
  if (mode == GapMode::Exact) return exact_ellipsoid_gap(body, p);
  const double g2 = quad_form(body.shape(), p - body.center());
  const double lam_max = body.shape_eigenvalues()(body.dim() - 1);
  return (1.0 - g2) / (1.0 + std::sqrt(g2)) / std::sqrt(lam_max);
}

std::vector<Vector> interior_grid(const ConvexBody& body, std::size_t min_points) {
  const int n = body.dim();
  const Vector lo = body.box_lower();
  const Vector width = body.box_upper() - body.box_lower();
  std::size_t per_axis =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::pow(double(min_points), 1.0 / n))));
  for (int attempt = 0; attempt < 24; ++attempt) {
    std::vector<Vector> pts;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      Vector p(n);
      for (int j = 0; j < n; ++j) {
        p(j) = lo(j) + width(j) * (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(per_axis);
      }
      if (is_interior(body, p)) pts.push_back(p);
      int j = 0;
      while (j < n && ++idx[j] == per_axis) idx[j++] = 0;
      if (j == n) break;
    }
    if (pts.size() >= min_points) return pts;
    per_axis = static_cast<std::size_t>(std::ceil(per_axis * 1.25)) + 1;
  }
  throw Error(ErrorCode::SamplingFailure, "could not build an interior grid");
}

Vector combine(const std::vector<Vector>& points, const std::vector<double>& weights) {
  if (points.empty() || points.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "points and weights must be nonempty and equal length");
  }
  Vector out = Vector::Zero(points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i) out += weights[i] * points[i];
  return out;
}

}  // namespace hilbert
