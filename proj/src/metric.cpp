#include "hilbert/metric.hpp"

#include "hilbert/parallel.hpp"
#include "hilbert/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hilbert {

double hilbert_distance(const ConvexBody& body, const Vector& x, const Vector& y) {
  require_interior(body, x, "x");
  require_interior(body, y, "y");
  if ((x - y).norm() <= kEpsDir) return 0.0;
  const Chord c = chord(body, x, y);
  const double u = 1.0 / c.back;
  const double v = 1.0 / c.ahead;
  const double w = u + v + u * v;
  return w < 1.0 ? std::log1p(w) : std::log(1.0 + w);
}

InequalitySides condition_c_sides(const ConvexBody& body, const Vector& x, const Vector& y,
                                  const Vector& z, double s) {
  const Vector m = s * x + (1.0 - s) * y;
  return {hilbert_distance(body, m, z),
          std::max(hilbert_distance(body, x, z), hilbert_distance(body, y, z))};
}

InequalitySides condition_d_sides(const ConvexBody& body, const Vector& x, const Vector& y,
                                  const Vector& z, const Vector& w, double s) {
  const Vector m1 = s * x + (1.0 - s) * y;
  const Vector m2 = s * z + (1.0 - s) * w;
  return {hilbert_distance(body, m1, m2),
          std::max(hilbert_distance(body, x, z), hilbert_distance(body, y, w))};
}

namespace {

template <typename Eval>
QuadrupleSampleReport run_quadruple_check(const ConvexBody& body, std::size_t n_samples,
                                          std::uint64_t seed, bool with_w, Eval&& eval) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 1");
  // The whole sample sequence is fixed by the seed before any evaluation.
  Rng rng(seed);
  PointSampler sampler(body, rng);
  std::vector<QuadrupleWitness> tuples(n_samples);
  for (auto& t : tuples) {
    t.x = sampler.draw();
    t.y = sampler.draw();
    t.z = sampler.draw();
    if (with_w) t.w = sampler.draw();
    t.s = rng.uniform();
  }
  std::vector<double> violation(n_samples);
  parallel_for(n_samples, [&](std::size_t i) { violation[i] = eval(tuples[i]); });

  std::size_t worst = 0;
  for (std::size_t i = 1; i < n_samples; ++i) {
    if (violation[i] > violation[worst]) worst = i;
  }
  QuadrupleSampleReport report;
  report.samples = n_samples;
  report.seed = seed;
  report.worst_violation = violation[worst];
  report.worst_witness = tuples[worst];
  return report;
}

}  // namespace

QuadrupleSampleReport check_condition_c(const ConvexBody& body, std::size_t n_samples,
                                        std::uint64_t seed) {
  return run_quadruple_check(body, n_samples, seed, false, [&](const QuadrupleWitness& t) {
    return condition_c_sides(body, t.x, t.y, t.z, t.s).violation();
  });
}

QuadrupleSampleReport check_condition_d(const ConvexBody& body, std::size_t n_samples,
                                        std::uint64_t seed) {
  return run_quadruple_check(body, n_samples, seed, true, [&](const QuadrupleWitness& t) {
    return condition_d_sides(body, t.x, t.y, t.z, t.w, t.s).violation();
  });
}

std::vector<double> ax2_divergence(const ConvexBody& body, const std::vector<Vector>& xs,
                                   const std::vector<Vector>& ys, const Vector& z) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::InvalidArgument, "sequences must have the same length");
  }
  std::vector<double> delta(xs.size());
  for (std::size_t n = 0; n < xs.size(); ++n) {
    delta[n] = hilbert_distance(body, xs[n], ys[n]) -
               std::max(hilbert_distance(body, xs[n], z), hilbert_distance(body, ys[n], z));
  }
  return delta;
}

MetricAxiomReport check_metric_axioms(const ConvexBody& body, std::size_t n_samples,
                                      std::uint64_t seed) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 1");
  struct Triple {
    Vector x, y, z, near;
  };
  Rng rng(seed);
  PointSampler sampler(body, rng);
  std::vector<Triple> triples(n_samples);
  for (auto& t : triples) {
    t.x = sampler.draw();
    t.y = sampler.draw();
    t.z = sampler.draw();
    // A nearby partner at distance 10^-k, k in 9..16, probes d ~ 0 behaviour.
    const double step = std::pow(10.0, -9.0 - static_cast<double>(rng.below(8)));
    t.near = t.x + step * sampler.direction();
    if (!is_interior(body, t.near)) t.near = t.x;
  }
  struct Residuals {
    double asym, tri, tiny;
  };
  std::vector<Residuals> out(n_samples);
  const double diam = body.diameter_bound();
  parallel_for(n_samples, [&](std::size_t i) {
    const Triple& t = triples[i];
    const double dxy = hilbert_distance(body, t.x, t.y);
    const double dyx = hilbert_distance(body, t.y, t.x);
    const double dxz = hilbert_distance(body, t.x, t.z);
    const double dyz = hilbert_distance(body, t.y, t.z);
    const double dnear = hilbert_distance(body, t.x, t.near);
    out[i].asym = std::abs(dxy - dyx);
    out[i].tri = dxz - dxy - dyz;
    out[i].tiny = dnear <= 1e-12 ? (t.x - t.near).norm() / diam : 0.0;
  });
  MetricAxiomReport r;
  r.samples = n_samples;
  r.seed = seed;
  r.max_triangle_excess = -std::numeric_limits<double>::infinity();
  for (const auto& o : out) {
    r.max_asymmetry = std::max(r.max_asymmetry, o.asym);
    r.max_triangle_excess = std::max(r.max_triangle_excess, o.tri);
    r.max_tiny_distance_gap = std::max(r.max_tiny_distance_gap, o.tiny);
  }
  return r;
}

}  // namespace hilbert
