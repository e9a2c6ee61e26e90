#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace hilbert;
using namespace hilbert::test;

namespace {

// Parabolic map with t = 1 written out by hand: L(1) = I + N + N^2/2.
std::array<long double, 2> parabolic_oracle(long double x, long double y) {
  const long double w = -0.5L * x + y + 1.5L;
  return {(0.5L * x + y + 0.5L) / w, (-x + y + 1.0L) / w};
}

// Plain Picard iteration of G in extended precision until the iterate stops moving.
Vector long_iteration_resolvent(const Vector& x, double lambda, long max_iter) {
  const long double a = 1.0L / (1.0L + lambda);
  const long double b = static_cast<long double>(lambda) / (1.0L + lambda);
  long double y0 = x(0), y1 = x(1);
  for (long k = 0; k < max_iter; ++k) {
    const auto f = parabolic_oracle(y0, y1);
    const long double n0 = a * x(0) + b * f[0];
    const long double n1 = a * x(1) + b * f[1];
    const bool still = n0 == y0 && n1 == y1;
    y0 = n0;
    y1 = n1;
    if (still) break;
  }
  return v2(static_cast<double>(y0), static_cast<double>(y1));
}

NonexpansiveMap identity_map(BodyPtr b) { return NonexpansiveMap::rotation_2d(std::move(b), 0.0); }

}  // namespace

TEST_CASE("g_step examples") {
  const auto d = disk();
  const auto c = NonexpansiveMap::constant(d, v2(0.5, 0));
  for (const auto& y : sample_points(*d, 20, 1)) {
    CHECK((g_step(c, v2(0, 0), 1.0, y) - v2(0.25, 0)).norm() <= 1e-16);
  }
  CHECK((g_step(identity_map(d), v2(0.2, 0), 3.0, v2(0.6, 0)) - v2(0.5, 0)).norm() <= 1e-15);
  CHECK(error_code_of([&] { g_step(c, v2(0, 0), 0.0, v2(0, 0)); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { g_step(c, v2(0, 0), -1.0, v2(0, 0)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("property: g_step keeps the scaled boundary gap") {
  const auto f = make_parabolic(1.0);
  const ConvexBody& body = f.body();
  Rng rng(3);
  const auto xs = sample_points(body, 40, 4);
  const auto ys = sample_points(body, 1000, 5);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const Vector& x = i == 0 ? v2(0, 0) : xs[i % xs.size()];
    const double lambda = i < 500 ? 1.0 : std::exp(rng.uniform(-3.0, 8.0));
    const double floor = boundary_gap(body, x, GapMode::Exact) / (1.0 + lambda);
    REQUIRE(boundary_gap(body, g_step(f, x, lambda, ys[i]), GapMode::Exact) >= floor - 1e-9);
  }
  // x at the centre, lambda = 1: every image keeps half the unit gap.
  for (const auto& y : ys) REQUIRE(boundary_gap(body, g_step(f, v2(0, 0), 1.0, y)) >= 0.5 - 1e-9);
}

TEST_CASE("closed-form resolvents") {
  const auto d = disk();
  SUBCASE("constant map") {
    const auto c = NonexpansiveMap::constant(d, v2(0.5, 0));
    const ResolventSolve s = solve_resolvent(c, v2(-0.5, 0), 3.0);
    CHECK(s.converged);
    CHECK((s.point - v2(0.25, 0)).norm() <= 1e-10);
    Rng rng(6);
    for (const auto& x : sample_points(*d, 200, 7)) {
      const double lambda = std::exp(rng.uniform(-4.0, 10.0));
      const ResolventSolve r = solve_resolvent(c, x, lambda);
      REQUIRE(r.converged);
      REQUIRE((r.point - (x + lambda * v2(0.5, 0)) / (1.0 + lambda)).norm() <= 1e-10);
    }
  }
  SUBCASE("identity map") {
    for (const auto& x : sample_points(*d, 100, 8)) {
      for (double lambda : {0.01, 1.0, 1e3, 1e6}) {
        const ResolventSolve r = solve_resolvent(identity_map(d), x, lambda);
        REQUIRE(r.converged);
        REQUIRE(r.iterations <= 2);
        REQUIRE((r.point - x).norm() <= 1e-10);
      }
    }
  }
  SUBCASE("quarter turn fixes the centre") {
    const auto rot = NonexpansiveMap::rotation_2d(d, std::numbers::pi / 2);
    for (double lambda : {0.5, 1.0, 10.0, 1e4}) {
      const ResolventSolve r = solve_resolvent(rot, v2(0, 0), lambda);
      CHECK(r.converged);
      CHECK(r.point.norm() <= 1e-10);
    }
  }
}

TEST_CASE("parabolic resolvent agrees with the long-iteration oracle") {
  const auto f = make_parabolic(1.0);
  for (const auto& [x, lambda] : std::vector<std::pair<Vector, double>>{
           {v2(0, 0), 10.0}, {v2(0, 0), 1.0}, {v2(0.3, -0.2), 50.0}, {v2(-0.5, 0.1), 200.0}}) {
    CAPTURE(lambda);
    const ResolventSolve s = solve_resolvent(f, x, lambda);
    REQUIRE(s.converged);
    CHECK(s.residual <= 1e-10);
    const Vector oracle = long_iteration_resolvent(x, lambda, 10'000'000);
    CHECK((s.point - oracle).norm() <= 1e-9);
  }
}

TEST_CASE("property: converged solves satisfy the fixed-point equation") {
  const auto maps = std::vector<NonexpansiveMap>{
      make_parabolic(1.0), make_parabolic(-2.0), NonexpansiveMap::rotation_2d(disk(), 1.0),
      NonexpansiveMap::projective(share(ConvexBody::simplex(3)),
                                  (SmallMatrix(3, 3) << 1, 1, 0, 0, 1, 1, 1, 0, 1).finished())};
  Rng rng(9);
  for (const auto& f : maps) {
    CAPTURE(f.kind_name());
    for (const auto& x : sample_points(f.body(), 40, 10)) {
      const double lambda = std::exp(rng.uniform(-2.0, 6.0));
      const ResolventSolve s = solve_resolvent(f, x, lambda);
      if (!s.converged) continue;
      const Vector g = x / (1.0 + lambda) + (lambda / (1.0 + lambda)) * f(s.point);
      REQUIRE((s.point - g).norm() <= 1e-10);
      REQUIRE(s.residual <= 1e-10);
      REQUIRE(s.last_step <= 1e-12);
      REQUIRE(is_interior(f.body(), s.point));
    }
  }
}

TEST_CASE("property: Hilbert steps never increase") {
  const auto f = make_parabolic(1.0);
  SolveOptions o;
  o.record_steps = true;
  Rng rng(12);
  for (const auto& x : sample_points(f.body(), 30, 13)) {
    const ResolventSolve s = solve_resolvent(f, x, std::exp(rng.uniform(0.0, 6.0)), o);
    REQUIRE(s.steps.size() == s.iterations);
    for (std::size_t k = 1; k < s.steps.size(); ++k) REQUIRE(s.steps[k] <= s.steps[k - 1] + 1e-13);
  }
}

TEST_CASE("property: warm starts and random starts reach the same point") {
  const auto f = make_parabolic(1.0);
  const Vector x = v2(0.3, -0.2);
  const double lambda = 40.0;
  const ResolventSolve cold = solve_resolvent(f, x, lambda);
  REQUIRE(cold.converged);

  SolveOptions warm;
  warm.warm_start = solve_resolvent(f, x, 0.8 * lambda).point;
  CHECK((solve_resolvent(f, x, lambda, warm).point - cold.point).norm() <= 1e-9);

  std::vector<Vector> ends;
  for (const auto& y0 : sample_points(f.body(), 10, 14)) {
    SolveOptions o;
    o.warm_start = y0;
    const ResolventSolve s = solve_resolvent(f, x, lambda, o);
    REQUIRE(s.converged);
    ends.push_back(s.point);
  }
  for (const auto& a : ends)
    for (const auto& b : ends) CHECK((a - b).norm() <= 1e-9);
}

TEST_CASE("solver options and exhaustion") {
  const auto rot = NonexpansiveMap::rotation_2d(disk(), std::numbers::pi / 2);
  SolveOptions o;
  o.max_iter = 50;
  const ResolventSolve s = solve_resolvent(rot, v2(0.5, 0), 1e4, o);
  CHECK_FALSE(s.converged);
  CHECK(s.iterations == 50);
  CHECK(is_interior(rot.body(), s.point));

  SolveOptions bad;
  bad.tol_res = 0.0;
  CHECK(error_code_of([&] { solve_resolvent(rot, v2(0, 0), 1.0, bad); }) == ErrorCode::InvalidArgument);
  bad = SolveOptions{};
  bad.max_iter = 0;
  CHECK(error_code_of([&] { solve_resolvent(rot, v2(0, 0), 1.0, bad); }) == ErrorCode::InvalidArgument);
  bad = SolveOptions{};
  bad.warm_start = v2(2, 0);
  CHECK(error_code_of([&] { solve_resolvent(rot, v2(0, 0), 1.0, bad); }) == ErrorCode::NotInterior);
  CHECK(error_code_of([&] { solve_resolvent(rot, v2(1, 0), 1.0); }) == ErrorCode::NotInterior);
  CHECK(error_code_of([&] { solve_resolvent(rot, v2(0, 0), 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("resolvent identity") {
  const auto d = disk();
  SUBCASE("constant map") {
    const auto c = NonexpansiveMap::constant(d, v2(0.5, 0.2));
    for (const auto& x : sample_points(*d, 30, 15)) {
      const auto r = check_resolvent_identity(c, x, 8.0, 2.0);
      REQUIRE(r.residual <= 1e-9);
      REQUIRE((r.lhs - (x + 8.0 * v2(0.5, 0.2)) / 9.0).norm() <= 1e-10);
    }
  }
  SUBCASE("identity map") {
    for (const auto& x : sample_points(*d, 30, 16)) {
      REQUIRE(check_resolvent_identity(identity_map(d), x, 5.0, 0.5).residual <= 1e-12);
    }
  }
  SUBCASE("parabolic") {
    const auto f = make_parabolic(1.0);
    const auto r = check_resolvent_identity(f, v2(0, 0), 8.0, 2.0);
    CHECK(r.converged);
    CHECK(r.residual <= 1e-7);
    Rng rng(17);
    const auto xs = sample_points(f.body(), 20, 18);
    for (const auto& x : xs) {
      const double mu = std::exp(rng.uniform(-2.0, 4.0));
      const double lambda = mu * std::exp(rng.uniform(0.05, 3.0));
      const auto c = check_resolvent_identity(f, x, lambda, mu);
      REQUIRE(c.converged);
      REQUIRE(c.residual <= 1e-7);
    }
  }
  SUBCASE("parameter order") {
    const auto f = make_parabolic(1.0);
    CHECK(error_code_of([&] { check_resolvent_identity(f, v2(0, 0), 2.0, 2.0); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([&] { check_resolvent_identity(f, v2(0, 0), 1.0, 2.0); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([&] { check_resolvent_identity(f, v2(0, 0), 1.0, 0.0); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("resolvent nonexpansiveness") {
  SUBCASE("parabolic on the disk") {
    const auto f = make_parabolic(1.0);
    for (double lambda : {1.0, 5.0, 25.0}) {
      const auto r = check_resolvent_nonexpansive(f, lambda, 1000, 42);
      CHECK(r.guaranteed);
      CHECK(r.non_converged == 0);
      CHECK(r.worst_margin <= 1e-8);
    }
  }
  SUBCASE("constant map contracts") {
    const auto c = NonexpansiveMap::constant(disk(), v2(0.1, -0.3));
    CHECK(check_resolvent_nonexpansive(c, 2.0, 500, 1).worst_margin < 0.0);
  }
  SUBCASE("non-ellipsoids are reported without a guarantee") {
    const auto sq = NonexpansiveMap::radial(square(), v2(0.2, 0.2), 0.6);
    const auto r = check_resolvent_nonexpansive(sq, 5.0, 300, 2);
    CHECK_FALSE(r.guaranteed);
    MESSAGE("square radial resolvent margin " << r.worst_margin);
    const auto p = NonexpansiveMap::projective(share(ConvexBody::simplex(3)),
                                               (SmallMatrix(3, 3) << 1, 1, 0, 0, 1, 1, 1, 0, 1).finished());
    const auto rp = check_resolvent_nonexpansive(p, 5.0, 300, 3);
    CHECK_FALSE(rp.guaranteed);
    MESSAGE("simplex projective resolvent margin " << rp.worst_margin);
  }
}

TEST_CASE("displacement identity") {
  const auto d = disk();
  SUBCASE("constant map") {
    const auto c = NonexpansiveMap::constant(d, v2(0.5, 0));
    const Vector x = v2(-0.4, 0.3);
    const auto r = displacement_identity(c, x, 1.0);
    CHECK(r.lhs == doctest::Approx((x - v2(0.5, 0)).norm() / 2).epsilon(1e-12));
    CHECK(std::abs(r.lhs - r.rhs) <= 1e-9);
  }
  SUBCASE("identity map") {
    const auto r = displacement_identity(identity_map(d), v2(0.3, 0.3), 7.0);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
  }
  SUBCASE("parabolic") {
    const auto f = make_parabolic(1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
      const auto r = displacement_identity(f, v2(0, 0), lambda);
      CHECK(r.solve.converged);
      CHECK(std::abs(r.lhs - r.rhs) <= 10 * SolveOptions{}.tol_res);
      CHECK(r.lhs * (1.0 + lambda) <= 2.0);
      CHECK(r.lhs < prev);
      prev = r.lhs;
    }
  }
}
