#pragma once

#include "hilbert/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hilbert {

class NonexpansiveMap;

namespace map_kinds {

struct Constant {
  Vector c;
};

/// g(p) = x0 + l (p - x0), 0 <= l < 1.
struct RadialContraction {
  Vector x0;
  double l;
};

/// u -> chart(M unchart(u) / |M unchart(u)|_1) on a simplex chart.
struct ProjectiveMatrix {
  SmallMatrix m;
};

/// Homogeneous action of L (L^T J L = J, J = diag(1,...,1,-1)) on the unit ball,
/// conjugated by the affine chart of the body when it is not the unit ball.
struct FormIsometry {
  SmallMatrix l;
};

/// p -> c + R (p - c) for an orthogonal R preserving the ellipsoid's shape.
struct Rotation {
  SmallMatrix r;
};

struct Composition {
  /// Applied in order: maps[0] first.
  std::vector<NonexpansiveMap> maps;
};

/// Arbitrary callable. Never certified; excluded from acceptance paths.
struct UnsafeCallback {
  std::function<Vector(const Vector&)> fn;
  std::string name;
};

}  // namespace map_kinds

/// Closed catalog of self-maps of a body that are nonexpansive for its Hilbert
/// metric. Every factory except `unsafe_callback` checks the variant's algebraic
/// condition and then certifies on 1000 sampled interior points that the image
/// stays interior; failures throw Error{InvalidMap}.
class NonexpansiveMap {
 public:
  using Variant = std::variant<map_kinds::Constant, map_kinds::RadialContraction,
                               map_kinds::ProjectiveMatrix, map_kinds::FormIsometry,
                               map_kinds::Rotation, map_kinds::Composition,
                               map_kinds::UnsafeCallback>;

  static NonexpansiveMap constant(BodyPtr body, const Vector& c);
  static NonexpansiveMap radial(BodyPtr body, const Vector& x0, double l);
  static NonexpansiveMap projective(BodyPtr body, const SmallMatrix& m);
  static NonexpansiveMap form_isometry(BodyPtr body, const SmallMatrix& l);
  static NonexpansiveMap rotation(BodyPtr body, const SmallMatrix& r);
  static NonexpansiveMap rotation_2d(BodyPtr body, double angle);
  /// `maps` applied first to last; all must share one body.
  static NonexpansiveMap composition(std::vector<NonexpansiveMap> maps);
  static NonexpansiveMap unsafe_callback(BodyPtr body, std::function<Vector(const Vector&)> fn,
                                         std::string name);

  /// F(p). Throws NotInterior for a non-interior input and MapLeak if the image
  /// is not strictly interior.
  Vector operator()(const Vector& p) const;

  const ConvexBody& body() const { return *body_; }
  const BodyPtr& body_ptr() const { return body_; }
  const Variant& variant() const { return variant_; }
  bool certified() const { return certified_; }
  std::string kind_name() const;

 private:
  NonexpansiveMap(BodyPtr body, Variant v) : body_(std::move(body)), variant_(std::move(v)) {}
  Vector apply(const Vector& p) const;
  void certify(std::uint64_t seed);

  BodyPtr body_;
  Variant variant_;
  bool certified_ = false;
};

/// Same as NonexpansiveMap::operator().
inline Vector eval_map(const NonexpansiveMap& f, const Vector& p) { return f(p); }

/// J = diag(1, ..., 1, -1) of size n + 1.
SmallMatrix lorentz_form(int n);

/// L(t) = exp(t N) = I + t N + t^2 N^2 / 2 for the nilpotent generator N of
/// parabolic isometries of the Klein disk fixing the null direction (1, 0, 1).
SmallMatrix parabolic_matrix(double t);

/// Parabolic isometry L(t) of the unit disk. Fixed-point free for t != 0; orbits
/// accumulate at the boundary point (1, 0).
NonexpansiveMap make_parabolic(double t);
/// Parabolic isometry transported to a 2-D ellipsoid through its affine chart.
NonexpansiveMap make_parabolic(BodyPtr ellipse, double t);

struct NonexpansiveReport {
  std::size_t samples = 0;
  /// max over sampled pairs of d(F x, F y) - d(x, y).
  double worst_margin = 0.0;
  Vector witness_x;
  Vector witness_y;
  /// For radial contractions: worst margin over distinct pairs, and over pairs
  /// with d(x, y) >= 0.1.
  std::optional<double> strict_margin;
  std::optional<double> strict_margin_far;
  std::uint64_t seed = 0;
};

NonexpansiveReport check_nonexpansive(const NonexpansiveMap& f, std::size_t n_samples,
                                      std::uint64_t seed);

struct FixedPointScan {
  std::size_t grid_points = 0;
  double min_displacement = 0.0;  // min ||F(p) - p|| over the grid
  Vector argmin;
  double argmin_gap = 0.0;        // boundary gap at the minimizer
};

/// Evaluates ||F(p) - p|| on an interior grid of at least `min_points` points.
FixedPointScan scan_fixed_points(const NonexpansiveMap& f, std::size_t min_points);

}  // namespace hilbert
