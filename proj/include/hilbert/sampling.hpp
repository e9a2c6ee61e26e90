#pragma once

#include "hilbert/geometry.hpp"
#include "hilbert/rng.hpp"

#include <vector>

namespace hilbert {

/// Draws interior points of a body.
///
/// `uniform()` rejects from the bounding box. `near_boundary(k)` walks from the
/// anchor along a random direction to gauge 1 - 10^-k of the exit distance.
/// `draw()` mixes the two: one in four draws is a near-boundary point with k
/// uniform in 1..6, since metric-inequality violations concentrate near the
/// boundary.
class PointSampler {
 public:
  static constexpr int kMaxRejections = 1'000'000;

  PointSampler(const ConvexBody& body, Rng& rng) : body_(body), rng_(rng) {}

  Vector uniform();
  Vector near_boundary(int k);
  Vector draw();
  Vector direction();

 private:
  const ConvexBody& body_;
  Rng& rng_;
};

/// Dirichlet(1, ..., 1) weights: uniform on the probability simplex.
std::vector<double> dirichlet_weights(Rng& rng, std::size_t count);

}  // namespace hilbert
