#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace hilbert;
using namespace hilbert::test;

TEST_CASE("containment classifies the basic cases") {
  const auto d = disk();
  const Containment centre = contains(*d, v2(0, 0));
  CHECK(centre.location == Location::Interior);
  CHECK(centre.margin == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(contains(*square(), v2(2, 0)).location == Location::Exterior);

  const Containment edge = contains(*d, v2(1, 0));
  CHECK(edge.location == Location::Boundary);
  CHECK(std::abs(edge.margin) <= 1e-12);

  CHECK(error_code_of([&] { contains(*d, make_vector({0, 0, 0})); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("chord endpoints for axis and diagonal lines") {
  SUBCASE("unit disk") {
    const Chord c = chord(*disk(), v2(0, 0), v2(0.5, 0));
    CHECK(c.s_a == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(c.s_b == doctest::Approx(2.0).epsilon(1e-15));
    CHECK((c.a - v2(-1, 0)).norm() <= 1e-15);
    CHECK((c.b - v2(1, 0)).norm() <= 1e-15);
  }
  SUBCASE("square diagonal") {
    const Chord c = chord(*square(), v2(0, 0), v2(0.5, 0.5));
    CHECK(c.s_a == doctest::Approx(-2.0));
    CHECK(c.s_b == doctest::Approx(2.0));
    CHECK((c.a - v2(-1, -1)).norm() <= 1e-15);
    CHECK((c.b - v2(1, 1)).norm() <= 1e-15);
  }
  SUBCASE("ellipse short axis") {
    const Chord c = chord(*ellipse(1, 4), v2(0, 0), v2(0, 0.25));
    CHECK(c.s_a == doctest::Approx(-2.0));
    CHECK(c.s_b == doctest::Approx(2.0));
    CHECK((c.a - v2(0, -0.5)).norm() <= 1e-15);
    CHECK((c.b - v2(0, 0.5)).norm() <= 1e-15);
  }
}

TEST_CASE("chord rejects degenerate and exterior input") {
  const auto d = disk();
  CHECK(error_code_of([&] { chord(*d, v2(0.1, 0.1), v2(0.1, 0.1)); }) == ErrorCode::DegenerateChord);
  CHECK(error_code_of([&] { chord(*d, v2(0, 0), v2(1, 0)); }) == ErrorCode::NotInterior);
  CHECK(error_code_of([&] { chord(*d, v2(3, 0), v2(0, 0)); }) == ErrorCode::NotInterior);
}

TEST_CASE("boundary gap examples") {
  CHECK(boundary_gap(*disk(), v2(0.5, 0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(boundary_gap(*disk(), v2(0.5, 0), GapMode::Exact) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(boundary_gap(*square(), v2(0.9, 0)) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(error_code_of([&] { boundary_gap(*disk(), v2(1.5, 0)); }) == ErrorCode::NotInterior);
}

TEST_CASE("exact ellipse gap agrees with dense boundary sampling") {
  const auto e = ellipse(1, 4);
  const Vector p = v2(0, 0.4);
  // Boundary is (cos t, sin t / 2); 10^6 samples plus local refinement of the best one.
  const int n = 1'000'000;
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    const double dist = std::hypot(std::cos(t) - p(0), 0.5 * std::sin(t) - p(1));
    if (dist < best) {
      best = dist;
      best_t = t;
    }
  }
  double lo = best_t - 2.0 * std::numbers::pi / n, hi = best_t + 2.0 * std::numbers::pi / n;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    const auto f = [&](double t) { return std::hypot(std::cos(t) - p(0), 0.5 * std::sin(t) - p(1)); };
    (f(m1) < f(m2) ? hi : lo) = (f(m1) < f(m2) ? m2 : m1);
  }
  const double oracle = std::hypot(std::cos(lo) - p(0), 0.5 * std::sin(lo) - p(1));
  CHECK(oracle <= best);

  const double exact = boundary_gap(*e, p, GapMode::Exact);
  CHECK(std::abs(exact - oracle) <= 1e-10);
  CHECK(exact == doctest::Approx(0.1));
  CHECK(boundary_gap(*e, p, GapMode::Bound) <= exact + 1e-15);
}

TEST_CASE("ellipsoid gap bound never exceeds the exact gap") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = random_ellipsoid(2 + trial % 4, rng);
    for (const Vector& p : sample_points(*e, 200, 100 + trial)) {
      const double bound = boundary_gap(*e, p, GapMode::Bound);
      const double exact = boundary_gap(*e, p, GapMode::Exact);
      REQUIRE(bound > 0.0);
      REQUIRE(bound <= exact * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("property: chord endpoints lie on the boundary and swap under reversal") {
  for (const auto& [name, body] : body_zoo()) {
    CAPTURE(name);
    const auto pts = sample_points(*body, 600, 3);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const Vector& x = pts[i];
      const Vector& y = pts[i + 1];
      const Chord c = chord(*body, x, y);
      REQUIRE(c.s_a < 0.0);
      REQUIRE(c.s_b > 1.0);
      REQUIRE(contains(*body, c.a, kTolBoundary).location == Location::Boundary);
      REQUIRE(contains(*body, c.b, kTolBoundary).location == Location::Boundary);
      REQUIRE(std::abs(body->gauge_residual(c.a)) <= kTolBoundary);
      REQUIRE(std::abs(body->gauge_residual(c.b)) <= kTolBoundary);

      const Chord r = chord(*body, y, x);
      REQUIRE((r.a - c.b).norm() <= 1e-10);
      REQUIRE((r.b - c.a).norm() <= 1e-10);
    }
  }
}

TEST_CASE("property: positive gap exactly on interior points") {
  for (const auto& [name, body] : body_zoo()) {
    CAPTURE(name);
    Rng rng(19);
    const Vector lo = body->box_lower();
    const Vector hi = body->box_upper();
    const Vector pad = 0.2 * (hi - lo);
    for (int k = 0; k < 10'000; ++k) {
      Vector p(body->dim());
      for (int j = 0; j < body->dim(); ++j) p(j) = rng.uniform(lo(j) - pad(j), hi(j) + pad(j));
      const bool interior = contains(*body, p).location == Location::Interior;
      if (interior) {
        REQUIRE(boundary_gap(*body, p) > 0.0);
      } else {
        REQUIRE(error_code_of([&] { boundary_gap(*body, p); }) == ErrorCode::NotInterior);
      }
    }
  }
}

TEST_CASE("property: vertex to halfspace conversion keeps every vertex on the boundary") {
  Rng rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 3;
    std::vector<Vector> verts;
    // Points on a sphere are all extreme.
    for (int k = 0; k < n + 4 + trial; ++k) {
      Vector g(n);
      for (int j = 0; j < n; ++j) g(j) = rng.normal();
      verts.push_back(g.normalized());
    }
    const ConvexBody body = ConvexBody::vpolytope(verts);
    for (const auto& v : verts) {
      REQUIRE(std::abs(body.gauge_residual(v)) <= 1e-9);
    }
    Vector centroid = Vector::Zero(n);
    for (const auto& v : verts) centroid += v / static_cast<double>(verts.size());
    REQUIRE(contains(body, centroid).location == Location::Interior);
  }
}

TEST_CASE("vertex polytope with interior points keeps only the hull") {
  const ConvexBody sq = ConvexBody::vpolytope({v2(-1, -1), v2(1, -1), v2(1, 1), v2(-1, 1), v2(0.2, 0.1)});
  CHECK(sq.normals().rows() == 4);
  CHECK(boundary_gap(sq, v2(0.9, 0)) == doctest::Approx(0.1));
}

TEST_CASE("invalid bodies are rejected at construction") {
  SmallMatrix q(2, 2);
  q << 1, 0, 0, -1;
  CHECK(error_code_of([&] { ConvexBody::ellipsoid(v2(0, 0), q); }) == ErrorCode::InvalidBody);
  q << 1, 0.5, 0, 1;
  CHECK(error_code_of([&] { ConvexBody::ellipsoid(v2(0, 0), q); }) == ErrorCode::InvalidBody);

  Eigen::MatrixXd a(3, 2);
  a << 1, 0, -1, 0, 0, 1;  // unbounded below in x2
  Eigen::VectorXd b(3);
  b << 1, 1, 1;
  CHECK(error_code_of([&] { ConvexBody::hpolytope(a, b); }) == ErrorCode::InvalidBody);

  Eigen::MatrixXd a2(2, 1);
  a2 << 1, -1;
  Eigen::VectorXd b2(2);
  b2 << -1, -1;  // x <= -1 and x >= 1
  CHECK(error_code_of([&] { ConvexBody::hpolytope(a2, b2); }) == ErrorCode::InvalidBody);

  CHECK(error_code_of([&] { ConvexBody::vpolytope({v2(0, 0), v2(1, 1), v2(2, 2)}); }) ==
        ErrorCode::InvalidBody);
  CHECK(error_code_of([&] { ConvexBody::vpolytope({v2(0, 0), v2(1, 0)}); }) == ErrorCode::InvalidBody);
  CHECK(error_code_of([&] { ConvexBody::cube(2, 0.0); }) == ErrorCode::InvalidBody);
}

TEST_CASE("halfspace rows are normalised so the slack is a Euclidean distance") {
  Eigen::MatrixXd a(4, 2);
  a << 3, 0, -2, 0, 0, 5, 0, -1;
  Eigen::VectorXd b(4);
  b << 3, 2, 5, 1;
  const ConvexBody sq = ConvexBody::hpolytope(a, b);
  CHECK(boundary_gap(sq, v2(0.9, 0)) == doctest::Approx(0.1));
  CHECK(boundary_gap(sq, v2(0.0, -0.75)) == doctest::Approx(0.25));
}

TEST_CASE("simplex chart round trip") {
  const ConvexBody s = ConvexBody::simplex(4);
  CHECK(s.dim() == 3);
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const Vector p = random_barycentric(rng, 4);
    const Vector u = s.chart(p);
    REQUIRE(contains(s, u).location == Location::Interior);
    REQUIRE((s.unchart(u) - p).norm() <= 1e-15);
  }
  CHECK(error_code_of([&] { s.chart(make_vector({0.5, 0.5})); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("interior grid and convex combination") {
  const auto pts = interior_grid(*disk(), 10'000);
  CHECK(pts.size() >= 10'000);
  for (const auto& p : pts) REQUIRE(contains(*disk(), p).location == Location::Interior);

  const Vector m = combine({v2(1, 0), v2(0, 1)}, {0.25, 0.75});
  CHECK((m - v2(0.25, 0.75)).norm() <= 1e-16);
  CHECK(error_code_of([&] { combine({v2(1, 0)}, {0.5, 0.5}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("bodies up to dimension eight") {
  const ConvexBody c8 = ConvexBody::cube(8, 1.0);
  Vector x = Vector::Zero(8);
  Vector y = Vector::Zero(8);
  y(7) = 0.5;
  const Chord c = chord(c8, x, y);
  CHECK(c.s_a == doctest::Approx(-2.0));
  CHECK(c.s_b == doctest::Approx(2.0));
  const ConvexBody b8 = ConvexBody::unit_ball(8);
  CHECK(boundary_gap(b8, y, GapMode::Exact) == doctest::Approx(0.5));
}
