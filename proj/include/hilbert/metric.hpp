#pragma once

#include "hilbert/geometry.hpp"

#include <cstdint>
#include <vector>

namespace hilbert {

/// Hilbert (cross-ratio) distance between interior points.
///
/// Evaluated from the chord's line parameters as log1p(u + v + uv) with u = 1/back, v = 1/ahead,
/// which equals log(|y-a| |x-b| / (|x-a| |y-b|)) but keeps accuracy near the
/// boundary. Returns 0 when ||x - y|| <= kEpsDir.
double hilbert_distance(const ConvexBody& body, const Vector& x, const Vector& y);

/// Sampled tuple realizing the worst violation of a metric inequality.
struct QuadrupleWitness {
  Vector x;
  Vector y;
  Vector z;
  Vector w;  // empty for condition (C)
  double s = 0.0;
};

struct QuadrupleSampleReport {
  std::size_t samples = 0;
  /// max over samples of lhs - rhs; positive means a violation was found.
  double worst_violation = 0.0;
  QuadrupleWitness worst_witness;
  std::uint64_t seed = 0;
};

struct InequalitySides {
  double lhs;
  double rhs;
  double violation() const { return lhs - rhs; }
};

/// d(sx + (1-s)y, z) against max(d(x,z), d(y,z)).
InequalitySides condition_c_sides(const ConvexBody& body, const Vector& x, const Vector& y,
                                  const Vector& z, double s);
/// d(sx + (1-s)y, sz + (1-s)w) against max(d(x,z), d(y,w)).
InequalitySides condition_d_sides(const ConvexBody& body, const Vector& x, const Vector& y,
                                  const Vector& z, const Vector& w, double s);

QuadrupleSampleReport check_condition_c(const ConvexBody& body, std::size_t n_samples,
                                        std::uint64_t seed);
QuadrupleSampleReport check_condition_d(const ConvexBody& body, std::size_t n_samples,
                                        std::uint64_t seed);

/// delta_n = d(x_n, y_n) - max(d(x_n, z), d(y_n, z)) for each index.
std::vector<double> ax2_divergence(const ConvexBody& body, const std::vector<Vector>& xs,
                                   const std::vector<Vector>& ys, const Vector& z);

/// Sampled metric-axiom residuals.
struct MetricAxiomReport {
  std::size_t samples = 0;
  double max_asymmetry = 0.0;         // |d(x,y) - d(y,x)|
  double max_triangle_excess = 0.0;   // d(x,z) - d(x,y) - d(y,z)
  double max_tiny_distance_gap = 0.0; // max ||x-y|| / diam over pairs with d <= 1e-12
  std::uint64_t seed = 0;
};

MetricAxiomReport check_metric_axioms(const ConvexBody& body, std::size_t n_samples,
                                      std::uint64_t seed);

}  // namespace hilbert
