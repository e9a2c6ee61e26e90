#include "hilbert/sampling.hpp"

#include <cmath>

namespace hilbert {

Vector PointSampler::direction() {
  const int n = body_.dim();
  Vector u(n);
  double len = 0.0;
  do {
    for (int j = 0; j < n; ++j) u(j) = rng_.normal();
    len = u.norm();
  } while (len < 1e-12);
  return u / len;
}

Vector PointSampler::uniform() {
  const int n = body_.dim();
  Vector p(n);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    for (int j = 0; j < n; ++j) p(j) = rng_.uniform(body_.box_lower()(j), body_.box_upper()(j));
    if (is_interior(body_, p)) return p;
  }
  throw Error(ErrorCode::SamplingFailure, "rejection sampling exhausted its budget");
}

Vector PointSampler::near_boundary(int k) {
  const Vector u = direction();
  const Vector& o = body_.anchor();
  // Exit distance along u from the anchor.
  const Chord c = chord(body_, o, o + 0.5 * body_.anchor_radius() * u);
  const double reach = c.s_b * 0.5 * body_.anchor_radius();
  const double fraction = 1.0 - std::pow(10.0, -k);
  Vector p = o + fraction * reach * u;
  // Very thin margins can round onto the boundary; back off toward the anchor.
  for (int i = 0; i < 64 && !is_interior(body_, p); ++i) p = o + (1.0 - 1e-3) * (p - o);
  if (!is_interior(body_, p)) throw Error(ErrorCode::SamplingFailure, "near-boundary draw failed");
  return p;
}

Vector PointSampler::draw() {
  if (rng_.below(4) == 0) {
    return near_boundary(1 + static_cast<int>(rng_.below(6)));
  }
  return uniform();
}

std::vector<double> dirichlet_weights(Rng& rng, std::size_t count) {
  std::vector<double> w(count);
  double total = 0.0;
  for (auto& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace hilbert
