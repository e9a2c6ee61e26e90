#pragma once

#include "hilbert/types.hpp"

#include <memory>
#include <vector>

namespace hilbert {

/// Bounded open convex domain in R^n, 1 <= n <= kMaxDim.
///
/// Polytopes keep a halfspace form {x : A x < b} with unit-norm rows; that form is
/// the single source of truth for every query once the body is built. Vertex
/// polytopes are converted at construction, and the standard simplex is stored as
/// its full-dimensional chart {u : u_i > 0, sum u_i < 1} in one fewer coordinate.
///
/// Every factory validates its input and throws Error{InvalidBody} when the
/// interior would be empty or unbounded.
class ConvexBody {
 public:
  enum class Kind { HPolytope, VPolytope, Ellipsoid, Simplex };

  static ConvexBody hpolytope(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets);
  static ConvexBody vpolytope(const std::vector<Vector>& vertices);
  static ConvexBody ellipsoid(const Vector& center, const SmallMatrix& shape);
  static ConvexBody unit_ball(int dim);
  /// Axis-aligned cube [-half_width, half_width]^dim as an H-polytope.
  static ConvexBody cube(int dim, double half_width = 1.0);
  /// Chart of the open standard simplex with `vertices` barycentric coordinates.
  static ConvexBody simplex(int vertices);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_polytope() const { return kind_ != Kind::Ellipsoid; }
  bool is_ellipsoid() const { return kind_ == Kind::Ellipsoid; }

  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }
  const std::vector<Vector>& vertices() const { return vertices_; }

  const Vector& center() const { return center_; }
  const SmallMatrix& shape() const { return shape_; }
  /// Eigenvalues of the shape matrix in increasing order.
  const Vector& shape_eigenvalues() const { return eigenvalues_; }
  const SmallMatrix& shape_eigenvectors() const { return eigenvectors_; }
  /// Symmetric square root S of the shape matrix; x -> S (x - c) maps onto the unit ball.
  const SmallMatrix& shape_sqrt() const { return shape_sqrt_; }
  const SmallMatrix& shape_sqrt_inverse() const { return shape_sqrt_inv_; }

  /// Certified interior point and the radius of a Euclidean ball around it inside the body.
  const Vector& anchor() const { return anchor_; }
  double anchor_radius() const { return anchor_radius_; }

  const Vector& box_lower() const { return box_lower_; }
  const Vector& box_upper() const { return box_upper_; }
  /// Diagonal of the bounding box; an upper bound on the Euclidean diameter.
  double diameter_bound() const { return (box_upper_ - box_lower_).norm(); }

  /// Number of barycentric coordinates of a simplex chart (dim() + 1).
  int barycentric_dim() const { return dim_ + 1; }
  Vector chart(const Vector& barycentric) const;
  Vector unchart(const Vector& u) const;

  /// Signed constraint value: < 0 inside, 0 on the boundary. Ellipsoid: q(p) - 1;
  /// polytope: max_i (A_i p - b_i).
  double gauge_residual(const Vector& p) const;

  bool same_as(const ConvexBody& other) const;

 private:
  ConvexBody() = default;
  static ConvexBody from_halfspaces(Kind kind, const Eigen::MatrixXd& normals,
                                    const Eigen::VectorXd& offsets);

  Kind kind_ = Kind::HPolytope;
  int dim_ = 0;
  Eigen::MatrixXd normals_;
  Eigen::VectorXd offsets_;
  std::vector<Vector> vertices_;
  Vector center_;
  SmallMatrix shape_;
  Vector eigenvalues_;
  SmallMatrix eigenvectors_;
  SmallMatrix shape_sqrt_;
  SmallMatrix shape_sqrt_inv_;
  Vector anchor_;
  double anchor_radius_ = 0.0;
  Vector box_lower_;
  Vector box_upper_;
};

using BodyPtr = std::shared_ptr<const ConvexBody>;

enum class Location { Interior, Boundary, Exterior };

struct Containment {
  Location location;
  /// Representation-native slack; positive inside.
  double margin;
};

Containment contains(const ConvexBody& body, const Vector& p, double tol = kTolGeom);

inline bool is_interior(const ConvexBody& body, const Vector& p) {
  return contains(body, p).location == Location::Interior;
}

/// Throws NotInterior (or DimensionMismatch) unless p is strictly inside.
void require_interior(const ConvexBody& body, const Vector& p, std::string_view what);

/// Intersection of the line through x and y with the boundary, parametrized as
/// p(s) = x + s (y - x). `back` = -s_a and `ahead` = s_b - 1 are computed directly
/// from the slack at x and y respectively, so they keep full relative precision
/// when x or y sits close to the boundary.
struct Chord {
  Vector a;
  Vector b;
  double s_a;
  double s_b;
  double back;
  double ahead;
};

/// Throws NotInterior when x or y is not strictly inside, DegenerateChord when
/// ||x - y|| <= kEpsDir.
Chord chord(const ConvexBody& body, const Vector& x, const Vector& y);

enum class GapMode {
  /// Exact for polytopes; a certified lower bound for ellipsoids.
  Bound,
  /// Exact for every representation (ellipsoids via 1-D root refinement).
  Exact,
};

/// Euclidean distance from an interior point to the boundary.
double boundary_gap(const ConvexBody& body, const Vector& p, GapMode mode = GapMode::Bound);

/// Regular grid over the bounding box restricted to the interior, refined until it
/// holds at least `min_points` points.
std::vector<Vector> interior_grid(const ConvexBody& body, std::size_t min_points);

/// Convex combination sum w_i p_i.
Vector combine(const std::vector<Vector>& points, const std::vector<double>& weights);

}  // namespace hilbert
