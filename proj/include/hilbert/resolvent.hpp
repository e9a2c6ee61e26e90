#pragma once

#include "hilbert/maps.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hilbert {

struct SolveOptions {
  /// Hilbert-metric threshold on the last Picard step.
  double tol_step = 1e-12;
  /// Euclidean threshold on ||z - G(z)||.
  double tol_res = 1e-10;
  std::size_t max_iter = 1'000'000;
  std::optional<Vector> warm_start;
  /// Keep the full sequence of Hilbert steps in ResolventSolve::steps.
  bool record_steps = false;

  void validate() const;
};

struct ResolventSolve {
  Vector point;
  std::size_t iterations = 0;
  double last_step = 0.0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> steps;
};

/// G_{x,lambda}(y) = x / (1 + lambda) + lambda / (1 + lambda) F(y).
Vector g_step(const NonexpansiveMap& f, const Vector& x, double lambda, const Vector& y);

/// R_lambda(x) by Picard iteration of G_{x,lambda}, started from the warm start
/// or from x. Stops once both the Hilbert step and the fixed-point residual are
/// under their tolerances. Exhausting max_iter is not an error: the result has
/// converged == false and carries the last iterate.
ResolventSolve solve_resolvent(const NonexpansiveMap& f, const Vector& x, double lambda,
                               const SolveOptions& opts = {});

struct ResolventIdentityCheck {
  /// ||R_lambda(x) - R_mu(y)|| with y = (lambda - mu)/lambda R_lambda(x) + mu/lambda x.
  double residual = 0.0;
  Vector lhs;
  Vector rhs;
  bool converged = false;
};

/// Requires lambda > mu > 0.
ResolventIdentityCheck check_resolvent_identity(const NonexpansiveMap& f, const Vector& x,
                                                double lambda, double mu,
                                                const SolveOptions& opts = {});

struct ResolventNonexpansiveReport {
  std::size_t samples = 0;
  /// max over pairs of d(R z1, R z2) - d(z1, z2).
  double worst_margin = 0.0;
  Vector witness_z1;
  Vector witness_z2;
  std::size_t non_converged = 0;
  /// True only on ellipsoids, where the metric is known to satisfy condition (D).
  bool guaranteed = false;
  std::uint64_t seed = 0;
};

ResolventNonexpansiveReport check_resolvent_nonexpansive(const NonexpansiveMap& f, double lambda,
                                                         std::size_t n_samples, std::uint64_t seed,
                                                         const SolveOptions& opts = {});

struct DisplacementCheck {
  double lhs = 0.0;  // ||R(x) - F(R(x))||
  double rhs = 0.0;  // ||x - F(R(x))|| / (1 + lambda)
  ResolventSolve solve;
};

DisplacementCheck displacement_identity(const NonexpansiveMap& f, const Vector& x, double lambda,
                                        const SolveOptions& opts = {});

}  // namespace hilbert
