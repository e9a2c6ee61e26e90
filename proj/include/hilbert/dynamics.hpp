#pragma once

#include "hilbert/resolvent.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hilbert {

/// Geometric grid lambda_k = lambda0 * ratio^k, k = 0 .. steps - 1.
struct SweepGrid {
  double lambda0 = 1.0;
  double ratio = 2.0;
  std::size_t steps = 20;

  void validate() const;
  std::vector<double> lambdas() const;
};

struct SweepTrajectory {
  Vector base_point;
  std::vector<double> lambdas;
  std::vector<Vector> points;
  std::vector<double> residuals;
  std::vector<std::size_t> iterations;
  std::vector<double> boundary_gaps;
  std::vector<bool> converged;

  std::size_t size() const { return lambdas.size(); }
};

/// Thrown when a solve inside a sweep fails; carries the entries computed so far.
class SweepError : public Error {
 public:
  SweepError(const Error& cause, SweepTrajectory partial)
      : Error(cause.code(), std::string("sweep aborted: ") + cause.what()),
        partial_(std::move(partial)) {}
  const SweepTrajectory& partial() const { return partial_; }

 private:
  SweepTrajectory partial_;
};

/// R_lambda(x) along the grid, each solve warm-started from the previous
/// solution. Boundary gaps are exact Euclidean distances to the boundary.
SweepTrajectory lambda_sweep(const NonexpansiveMap& f, const Vector& x, const SweepGrid& grid,
                             const SolveOptions& opts = {});

/// First index from which the boundary gaps never increase.
std::size_t escape_burn_in(const SweepTrajectory& traj);

struct Cluster {
  Vector centroid;
  std::size_t members = 0;
  double gap = 0.0;  // boundary gap of the centroid
};

struct GapStats {
  std::size_t samples = 0;
  double max = 0.0;
  double mean = 0.0;
};

struct OmegaReport {
  std::vector<Cluster> clusters;
  double cluster_eps = 1e-3;
  double tail_fraction = 0.25;
  std::optional<GapStats> hull_sample_gaps;
  std::vector<Vector> attractor_points;
};

/// Accumulation points of one trajectory: the converged points among the last
/// ceil(tail_fraction * steps), grouped so that every member lies within
/// cluster_eps of its cluster's centroid.
OmegaReport omega_estimate(const ConvexBody& body, const SweepTrajectory& traj,
                           double tail_fraction = 0.25, double cluster_eps = 1e-3);

/// Same estimate over the union of the tails of several trajectories.
OmegaReport attractor_estimate(const ConvexBody& body, const std::vector<SweepTrajectory>& trajs,
                               double tail_fraction = 0.25, double cluster_eps = 1e-3);

/// Default boundary tolerance for a grid with `steps` entries: 6e-2 at 20 steps,
/// halved for every 4 additional steps.
double boundary_epsilon(std::size_t steps);

struct HullCheck {
  GapStats gaps;
  double eps_boundary = 0.0;
  bool pass = false;
};

/// Samples Dirichlet-uniform convex combinations of every centroid in `reports`
/// and measures their boundary gaps; passes when the largest gap is at most
/// eps_boundary.
HullCheck hull_boundary_check(const ConvexBody& body, const std::vector<OmegaReport>& reports,
                              std::size_t n_hull_samples, std::uint64_t seed, double eps_boundary);

struct DenjoyWolffEstimate {
  Vector xi;
  double spread = 0.0;
  std::vector<double> per_base_error;
  std::vector<Vector> final_points;
  std::vector<SweepTrajectory> trajectories;
};

/// Runs one sweep per base point on an ellipsoid and reports the common limit.
/// Throws NotEllipsoid, InsufficientSweep (fewer than 2 grid steps) or
/// FixedPointDetected (a final gap above 0.5).
DenjoyWolffEstimate denjoy_wolff(const NonexpansiveMap& f, const std::vector<Vector>& base_points,
                                 const SweepGrid& grid, const SolveOptions& opts = {});

/// Lexicographic order on coordinates.
bool lex_less(const Vector& a, const Vector& b);

}  // namespace hilbert
