#pragma once

#include "hilbert/experiment.hpp"
#include "hilbert/sampling.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

namespace hilbert::test {

inline Vector v2(double a, double b) { return make_vector({a, b}); }

inline BodyPtr share(ConvexBody b) { return std::make_shared<const ConvexBody>(std::move(b)); }

inline BodyPtr disk() { return share(ConvexBody::unit_ball(2)); }
inline BodyPtr square() { return share(ConvexBody::cube(2, 1.0)); }

inline BodyPtr ellipse(double q0, double q1, const Vector& c = Vector::Zero(2)) {
  SmallMatrix q = SmallMatrix::Zero(2, 2);
  q(0, 0) = q0;
  q(1, 1) = q1;
  return share(ConvexBody::ellipsoid(c, q));
}

inline BodyPtr hexagon() {
  std::vector<Vector> v;
  for (int k = 0; k < 6; ++k) {
    const double a = k * std::numbers::pi / 3.0 + 0.1;
    v.push_back(v2(std::cos(a), 0.8 * std::sin(a)));
  }
  return share(ConvexBody::vpolytope(v));
}

/// Random SPD shape with eigenvalues in [0.5, 4] and a random center.
inline BodyPtr random_ellipsoid(int n, Rng& rng) {
  SmallMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<SmallMatrix> qr(g);
  const SmallMatrix o = qr.householderQ();
  Vector ev(n);
  for (int i = 0; i < n; ++i) ev(i) = rng.uniform(0.5, 4.0);
  const SmallMatrix q = o * ev.asDiagonal() * o.transpose();
  Vector c(n);
  for (int i = 0; i < n; ++i) c(i) = rng.uniform(-1.0, 1.0);
  return share(ConvexBody::ellipsoid(c, 0.5 * (q + q.transpose())));
}

/// Bodies exercised by the sampled properties.
inline std::vector<std::pair<std::string, BodyPtr>> body_zoo() {
  Rng rng(7);
  return {{"disk", disk()},
          {"square", square()},
          {"ellipse", ellipse(1.0, 4.0, v2(0.3, -0.1))},
          {"hexagon", hexagon()},
          {"simplex3", share(ConvexBody::simplex(3))},
          {"simplex5", share(ConvexBody::simplex(5))},
          {"cube3", share(ConvexBody::cube(3, 0.5))},
          {"ellipsoid5", random_ellipsoid(5, rng)}};
}

inline std::vector<Vector> sample_points(const ConvexBody& body, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PointSampler s(body, rng);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.draw());
  return out;
}

/// Code of the hilbert::Error thrown by `f`, or nullopt if it returns normally.
template <class F>
std::optional<ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Hilbert distance on the open standard simplex from barycentric coordinates:
/// log(max_i x_i/y_i * max_j y_j/x_j).
inline double simplex_ratio_distance(const Vector& x, const Vector& y) {
  double a = 0.0, b = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    a = std::max(a, x(i) / y(i));
    b = std::max(b, y(i) / x(i));
  }
  return std::log(a * b);
}

inline Vector random_barycentric(Rng& rng, int count) {
  const auto w = dirichlet_weights(rng, static_cast<std::size_t>(count));
  Vector p(count);
  for (int i = 0; i < count; ++i) p(i) = w[static_cast<std::size_t>(i)];
  return p;
}

}  // namespace hilbert::test
