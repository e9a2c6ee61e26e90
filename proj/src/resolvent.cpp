#include "hilbert/resolvent.hpp"

#include "hilbert/metric.hpp"
#include "hilbert/parallel.hpp"
#include "hilbert/sampling.hpp"

#include <cmath>

namespace hilbert {

void SolveOptions::validate() const {
  if (!(tol_step > 0.0) || !(tol_res > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be positive");
  }
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
}

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be positive and finite");
  }
}

}  // namespace

Vector g_step(const NonexpansiveMap& f, const Vector& x, double lambda, const Vector& y) {
  require_lambda(lambda);
  const double keep = 1.0 / (1.0 + lambda);
  return keep * x + (lambda * keep) * f(y);
}

ResolventSolve solve_resolvent(const NonexpansiveMap& f, const Vector& x, double lambda,
                               const SolveOptions& opts) {
  opts.validate();
  require_lambda(lambda);
  const ConvexBody& body = f.body();
  require_interior(body, x, "base point");
  Vector y = opts.warm_start.value_or(x);
  require_interior(body, y, "warm start");

  ResolventSolve out;
  Vector gy = g_step(f, x, lambda, y);
  for (std::size_t k = 1; k <= opts.max_iter; ++k) {
    const double step = hilbert_distance(body, y, gy);
    Vector next = g_step(f, x, lambda, gy);
    const double residual = (gy - next).norm();
    y = std::move(gy);
    gy = std::move(next);
    out.iterations = k;
    out.last_step = step;
    out.residual = residual;
    if (opts.record_steps) out.steps.push_back(step);
    if (step <= opts.tol_step && residual <= opts.tol_res) {
      out.converged = true;
      break;
    }
  }
  out.point = std::move(y);
  return out;
}

ResolventIdentityCheck check_resolvent_identity(const NonexpansiveMap& f, const Vector& x,
                                                double lambda, double mu,
                                                const SolveOptions& opts) {
  require_lambda(lambda);
  require_lambda(mu);
  if (!(lambda > mu)) {
    throw Error(ErrorCode::InvalidArgument, "resolvent identity needs lambda > mu > 0");
  }
  SolveOptions cold = opts;
  cold.warm_start.reset();
  const ResolventSolve outer = solve_resolvent(f, x, lambda, cold);
  const Vector y = ((lambda - mu) / lambda) * outer.point + (mu / lambda) * x;
  const ResolventSolve inner = solve_resolvent(f, y, mu, cold);

  ResolventIdentityCheck check;
  check.lhs = outer.point;
  check.rhs = inner.point;
  check.residual = (outer.point - inner.point).norm();
  check.converged = outer.converged && inner.converged;
  return check;
}

ResolventNonexpansiveReport check_resolvent_nonexpansive(const NonexpansiveMap& f, double lambda,
                                                         std::size_t n_samples, std::uint64_t seed,
                                                         const SolveOptions& opts) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 1");
  require_lambda(lambda);
  const ConvexBody& body = f.body();
  Rng rng(seed);
  PointSampler sampler(body, rng);
  std::vector<std::pair<Vector, Vector>> pairs(n_samples);
  for (auto& pr : pairs) {
    pr.first = sampler.draw();
    pr.second = sampler.draw();
  }
  SolveOptions cold = opts;
  cold.warm_start.reset();
  std::vector<double> margin(n_samples);
  std::vector<int> failed(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t i) {
    const auto& [z1, z2] = pairs[i];
    const ResolventSolve r1 = solve_resolvent(f, z1, lambda, cold);
    const ResolventSolve r2 = solve_resolvent(f, z2, lambda, cold);
    failed[i] = (r1.converged ? 0 : 1) + (r2.converged ? 0 : 1);
    margin[i] = hilbert_distance(body, r1.point, r2.point) - hilbert_distance(body, z1, z2);
  });

  ResolventNonexpansiveReport r;
  r.samples = n_samples;
  r.seed = seed;
  r.guaranteed = body.is_ellipsoid();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (margin[i] > margin[worst]) worst = i;
    r.non_converged += static_cast<std::size_t>(failed[i]);
  }
  r.worst_margin = margin[worst];
  r.witness_z1 = pairs[worst].first;
  r.witness_z2 = pairs[worst].second;
  return r;
}

DisplacementCheck displacement_identity(const NonexpansiveMap& f, const Vector& x, double lambda,
                                        const SolveOptions& opts) {
  DisplacementCheck c;
  c.solve = solve_resolvent(f, x, lambda, opts);
  const Vector image = f(c.solve.point);
  c.lhs = (c.solve.point - image).norm();
  c.rhs = (x - image).norm() / (1.0 + lambda);
  return c;
}

}  // namespace hilbert
