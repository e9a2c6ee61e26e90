#include "hilbert/dynamics.hpp"

#include "hilbert/parallel.hpp"
#include "hilbert/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace hilbert {

void SweepGrid::validate() const {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda0 must be positive");
  }
  if (!(ratio > 1.0) || !std::isfinite(ratio)) {
    throw Error(ErrorCode::InvalidArgument, "grid ratio must exceed 1");
  }
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one step");
}

std::vector<double> SweepGrid::lambdas() const {
  validate();
  std::vector<double> out(steps);
  for (std::size_t k = 0; k < steps; ++k) out[k] = lambda0 * std::pow(ratio, static_cast<double>(k));
  return out;
}

SweepTrajectory lambda_sweep(const NonexpansiveMap& f, const Vector& x, const SweepGrid& grid,
                             const SolveOptions& opts) {
  const ConvexBody& body = f.body();
  require_interior(body, x, "base point");
  SweepTrajectory traj;
  traj.base_point = x;
  SolveOptions o = opts;
  o.record_steps = false;
  for (double lambda : grid.lambdas()) {
    try {
      const ResolventSolve s = solve_resolvent(f, x, lambda, o);
      traj.lambdas.push_back(lambda);
      traj.points.push_back(s.point);
      traj.residuals.push_back(s.residual);
      traj.iterations.push_back(s.iterations);
      traj.boundary_gaps.push_back(boundary_gap(body, s.point, GapMode::Exact));
      traj.converged.push_back(s.converged);
      o.warm_start = s.point;
    } catch (const Error& e) {
      throw SweepError(e, traj);
    }
  }
  return traj;
}

std::size_t escape_burn_in(const SweepTrajectory& traj) {
  const auto& g = traj.boundary_gaps;
  std::size_t k = g.empty() ? 0 : g.size() - 1;
  while (k > 0 && g[k - 1] >= g[k]) --k;
  return k;
}

bool lex_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

namespace {

std::vector<Vector> tail_points(const SweepTrajectory& traj, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tail fraction must lie in (0, 1]");
  }
  const std::size_t n = traj.size();
  const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  if (count < 2) {
    throw Error(ErrorCode::InsufficientSweep, "the trajectory tail holds fewer than 2 points");
  }
  std::vector<Vector> out;
  for (std::size_t i = n - count; i < n; ++i) {
    if (traj.converged[i]) out.push_back(traj.points[i]);
  }
  if (out.empty()) throw Error(ErrorCode::InsufficientSweep, "every tail solve failed to converge");
  return out;
}

Vector mean_of(const std::vector<Vector>& pts) {
  Vector c = Vector::Zero(pts.front().size());
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

OmegaReport cluster_points(const ConvexBody& body, std::vector<Vector> points, double tail_fraction,
                           double cluster_eps) {
  if (!(cluster_eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "cluster_eps must be positive");
  std::sort(points.begin(), points.end(), lex_less);
  std::vector<std::vector<Vector>> groups;
  for (const auto& p : points) {
    bool placed = false;
    for (auto& g : groups) {
      g.push_back(p);
      const Vector c = mean_of(g);
      const bool tight = std::all_of(g.begin(), g.end(),
                                     [&](const Vector& q) { return (q - c).norm() <= cluster_eps; });
      if (tight) {
        placed = true;
        break;
      }
      g.pop_back();
    }
    if (!placed) groups.push_back({p});
  }
  OmegaReport report;
  report.cluster_eps = cluster_eps;
  report.tail_fraction = tail_fraction;
  report.attractor_points = std::move(points);
  for (const auto& g : groups) {
    Cluster c;
    c.centroid = mean_of(g);
    c.members = g.size();
    c.gap = is_interior(body, c.centroid) ? boundary_gap(body, c.centroid, GapMode::Exact) : 0.0;
    report.clusters.push_back(std::move(c));
  }
  return report;
}

}  // namespace

OmegaReport omega_estimate(const ConvexBody& body, const SweepTrajectory& traj, double tail_fraction,
                           double cluster_eps) {
  return cluster_points(body, tail_points(traj, tail_fraction), tail_fraction, cluster_eps);
}

OmegaReport attractor_estimate(const ConvexBody& body, const std::vector<SweepTrajectory>& trajs,
                               double tail_fraction, double cluster_eps) {
  std::vector<Vector> pts;
  for (const auto& t : trajs) {
    auto tail = tail_points(t, tail_fraction);
    pts.insert(pts.end(), tail.begin(), tail.end());
  }
  if (pts.empty()) throw Error(ErrorCode::InsufficientSweep, "no trajectories");
  return cluster_points(body, std::move(pts), tail_fraction, cluster_eps);
}

double boundary_epsilon(std::size_t steps) {
  return 6e-2 * std::pow(2.0, -(static_cast<double>(steps) - 20.0) / 4.0);
}

HullCheck hull_boundary_check(const ConvexBody& body, const std::vector<OmegaReport>& reports,
                              std::size_t n_hull_samples, std::uint64_t seed, double eps_boundary) {
  std::vector<Vector> centroids;
  for (const auto& r : reports) {
    for (const auto& c : r.clusters) centroids.push_back(c.centroid);
  }
  if (centroids.empty()) throw Error(ErrorCode::InvalidArgument, "no accumulation centroids");
  if (n_hull_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_hull_samples must be at least 1");

  Rng rng(seed);
  std::vector<Vector> samples(n_hull_samples);
  for (auto& s : samples) s = combine(centroids, dirichlet_weights(rng, centroids.size()));
  std::vector<double> gaps(n_hull_samples);
  parallel_for(n_hull_samples, [&](std::size_t i) {
    gaps[i] = is_interior(body, samples[i]) ? boundary_gap(body, samples[i], GapMode::Exact) : 0.0;
  });

  HullCheck h;
  h.eps_boundary = eps_boundary;
  h.gaps.samples = n_hull_samples;
  double total = 0.0;
  for (double g : gaps) {
    h.gaps.max = std::max(h.gaps.max, g);
    total += g;
  }
  h.gaps.mean = total / static_cast<double>(n_hull_samples);
  h.pass = h.gaps.max <= eps_boundary;
  return h;
}

DenjoyWolffEstimate denjoy_wolff(const NonexpansiveMap& f, const std::vector<Vector>& base_points,
                                 const SweepGrid& grid, const SolveOptions& opts) {
  const ConvexBody& body = f.body();
  if (!body.is_ellipsoid()) {
    throw Error(ErrorCode::NotEllipsoid, "a common boundary limit is only guaranteed on ellipsoids");
  }
  grid.validate();
  if (grid.steps < 2) {
    throw Error(ErrorCode::InsufficientSweep, "a limit cannot be estimated from a single lambda");
  }
  if (base_points.empty()) throw Error(ErrorCode::InvalidArgument, "no base points");
  for (std::size_t i = 0; i < base_points.size(); ++i) {
    require_interior(body, base_points[i], "base point " + std::to_string(i));
  }

  DenjoyWolffEstimate est;
  est.trajectories.resize(base_points.size());
  parallel_for(base_points.size(), [&](std::size_t i) {
    est.trajectories[i] = lambda_sweep(f, base_points[i], grid, opts);
  });

  for (std::size_t i = 0; i < base_points.size(); ++i) {
    const auto& t = est.trajectories[i];
    if (t.boundary_gaps.back() > 0.5) {
      throw Error(ErrorCode::FixedPointDetected,
                  "base point " + std::to_string(i) + " ends at boundary gap " +
                      std::to_string(t.boundary_gaps.back()) + "; the map appears to have a fixed point");
    }
    est.final_points.push_back(t.points.back());
  }
  std::vector<Vector> sorted = est.final_points;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  est.xi = mean_of(sorted);
  for (const auto& p : est.final_points) {
    est.per_base_error.push_back((p - est.xi).norm());
    for (const auto& q : est.final_points) est.spread = std::max(est.spread, (p - q).norm());
  }
  return est;
}

}  // namespace hilbert
