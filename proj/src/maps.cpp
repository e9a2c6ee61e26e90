#include "hilbert/maps.hpp"

#include "hilbert/metric.hpp"
#include "hilbert/parallel.hpp"
#include "hilbert/rng.hpp"
#include "hilbert/sampling.hpp"

#include <cmath>
#include <limits>

namespace hilbert {
namespace {

constexpr std::size_t kCertificationPoints = 1000;
constexpr double kDehomogenizationFloor = 1e-13;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_square(const SmallMatrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw Error(ErrorCode::InvalidMap, std::string(what) + " must be " + std::to_string(n) + "x" +
                                           std::to_string(n));
  }
  if (!m.allFinite()) throw Error(ErrorCode::InvalidMap, std::string(what) + " has non-finite entries");
}

bool unit_ball_chart(const ConvexBody& body) {
  return body.center().isZero(0.0) &&
         body.shape().isApprox(SmallMatrix::Identity(body.dim(), body.dim()), 0.0);
}

}  // namespace

SmallMatrix lorentz_form(int n) {
  SmallMatrix j = SmallMatrix::Identity(n + 1, n + 1);
  j(n, n) = -1.0;
  return j;
}

SmallMatrix parabolic_matrix(double t) {
  SmallMatrix n(3, 3);
  n << 0.0, 1.0, 0.0,
      -1.0, 0.0, 1.0,
       0.0, 1.0, 0.0;
  const SmallMatrix n2 = n * n;
  return SmallMatrix::Identity(3, 3) + t * n + (0.5 * t * t) * n2;
}

NonexpansiveMap make_parabolic(double t) {
  return make_parabolic(std::make_shared<const ConvexBody>(ConvexBody::unit_ball(2)), t);
}

NonexpansiveMap make_parabolic(BodyPtr ellipse, double t) {
  if (!ellipse->is_ellipsoid() || ellipse->dim() != 2) {
    throw Error(ErrorCode::InvalidMap, "parabolic maps need a 2-D ellipsoid");
  }
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidMap, "parabolic parameter must be finite");
  return NonexpansiveMap::form_isometry(std::move(ellipse), parabolic_matrix(t));
}

NonexpansiveMap NonexpansiveMap::constant(BodyPtr body, const Vector& c) {
  require_interior(*body, c, "constant value");
  NonexpansiveMap f(std::move(body), map_kinds::Constant{c});
  f.certify(derive_seed(0, "constant"));
  return f;
}

NonexpansiveMap NonexpansiveMap::radial(BodyPtr body, const Vector& x0, double l) {
  require_interior(*body, x0, "radial center");
  if (!(l >= 0.0 && l < 1.0)) {
    throw Error(ErrorCode::InvalidMap, "radial contraction factor must lie in [0, 1)");
  }
  NonexpansiveMap f(std::move(body), map_kinds::RadialContraction{x0, l});
  f.certify(derive_seed(0, "radial"));
  return f;
}

NonexpansiveMap NonexpansiveMap::projective(BodyPtr body, const SmallMatrix& m) {
  if (body->kind() != ConvexBody::Kind::Simplex) {
    throw Error(ErrorCode::InvalidMap, "projective maps act on simplex charts only");
  }
  require_square(m, body->barycentric_dim(), "projective matrix");
  if ((m.array() < 0.0).any()) throw Error(ErrorCode::InvalidMap, "projective matrix has negative entries");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!(m.row(i).maxCoeff() > 0.0)) {
      throw Error(ErrorCode::InvalidMap, "row " + std::to_string(i) + " of projective matrix is zero");
    }
  }
  NonexpansiveMap f(std::move(body), map_kinds::ProjectiveMatrix{m});
  f.certify(derive_seed(0, "projective"));
  return f;
}

NonexpansiveMap NonexpansiveMap::form_isometry(BodyPtr body, const SmallMatrix& l) {
  if (!body->is_ellipsoid()) throw Error(ErrorCode::InvalidMap, "form isometries act on ellipsoids only");
  const int n = body->dim();
  require_square(l, n + 1, "form isometry");
  const SmallMatrix j = lorentz_form(n);
  const double residual = (l.transpose() * j * l - j).cwiseAbs().maxCoeff();
  if (residual > 1e-12 * std::max(1.0, l.cwiseAbs().maxCoeff() * l.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::InvalidMap, "matrix does not preserve the form (residual " +
                                           std::to_string(residual) + ")");
  }
  if (!(l(n, n) > 0.0)) {
    throw Error(ErrorCode::InvalidMap, "form isometry swaps the two sheets of the cone");
  }
  NonexpansiveMap f(std::move(body), map_kinds::FormIsometry{l});
  f.certify(derive_seed(0, "form_isometry"));
  return f;
}

NonexpansiveMap NonexpansiveMap::rotation(BodyPtr body, const SmallMatrix& r) {
  if (!body->is_ellipsoid()) throw Error(ErrorCode::InvalidMap, "rotations act on ellipsoids only");
  const int n = body->dim();
  require_square(r, n, "rotation");
  if ((r.transpose() * r - SmallMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::InvalidMap, "rotation matrix is not orthogonal");
  }
  const SmallMatrix& q = body->shape();
  if ((r.transpose() * q * r - q).cwiseAbs().maxCoeff() > 1e-12 * q.cwiseAbs().maxCoeff()) {
    throw Error(ErrorCode::InvalidMap, "rotation does not preserve the ellipsoid");
  }
  NonexpansiveMap f(std::move(body), map_kinds::Rotation{r});
  f.certify(derive_seed(0, "rotation"));
  return f;
}

NonexpansiveMap NonexpansiveMap::rotation_2d(BodyPtr body, double angle) {
  SmallMatrix r(2, 2);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  r << c, -s, s, c;
  return rotation(std::move(body), r);
}

NonexpansiveMap NonexpansiveMap::composition(std::vector<NonexpansiveMap> maps) {
  if (maps.empty()) throw Error(ErrorCode::InvalidMap, "empty composition");
  BodyPtr body = maps.front().body_ptr();
  bool all_certified = true;
  for (const auto& m : maps) {
    if (!m.body().same_as(*body)) {
      throw Error(ErrorCode::InvalidMap, "composed maps act on different bodies");
    }
    all_certified = all_certified && m.certified();
  }
  NonexpansiveMap f(std::move(body), map_kinds::Composition{std::move(maps)});
  if (all_certified) f.certify(derive_seed(0, "composition"));
  return f;
}

NonexpansiveMap NonexpansiveMap::unsafe_callback(BodyPtr body, std::function<Vector(const Vector&)> fn,
                                                 std::string name) {
  if (!fn) throw Error(ErrorCode::InvalidMap, "empty callback");
  return NonexpansiveMap(std::move(body), map_kinds::UnsafeCallback{std::move(fn), std::move(name)});
}

std::string NonexpansiveMap::kind_name() const {
  return std::visit(Overloaded{
                        [](const map_kinds::Constant&) { return std::string("constant"); },
                        [](const map_kinds::RadialContraction&) { return std::string("radial"); },
                        [](const map_kinds::ProjectiveMatrix&) { return std::string("projective"); },
                        [](const map_kinds::FormIsometry&) { return std::string("form_isometry"); },
                        [](const map_kinds::Rotation&) { return std::string("rotation"); },
                        [](const map_kinds::Composition&) { return std::string("composition"); },
                        [](const map_kinds::UnsafeCallback& u) { return "unsafe_callback:" + u.name; },
                    },
                    variant_);
}

Vector NonexpansiveMap::apply(const Vector& p) const {
  const ConvexBody& body = *body_;
  return std::visit(
      Overloaded{
          [&](const map_kinds::Constant& m) -> Vector { return m.c; },
          [&](const map_kinds::RadialContraction& m) -> Vector { return m.x0 + m.l * (p - m.x0); },
          [&](const map_kinds::ProjectiveMatrix& m) -> Vector {
            const Vector image = m.m * body.unchart(p);
            const double total = image.sum();
            if (!(total > 0.0)) throw Error(ErrorCode::MapLeak, "projective image has zero mass");
            return body.chart(image / total);
          },
          [&](const map_kinds::FormIsometry& m) -> Vector {
            // Extended precision throughout keeps the image's distance to the
            // boundary accurate to the final rounding.
            using ld = long double;
            const int n = body.dim();
            const bool unit = unit_ball_chart(body);
            ld h[kMaxLift] = {};
            for (int i = 0; i < n; ++i) {
              if (unit) {
                h[i] = p(i);
                continue;
              }
              h[i] = 0.0L;
              for (int j = 0; j < n; ++j) {
                h[i] += static_cast<ld>(body.shape_sqrt()(i, j)) * (static_cast<ld>(p(j)) - body.center()(j));
              }
            }
            h[n] = 1.0L;
            ld image[kMaxLift] = {};
            for (int i = 0; i <= n; ++i) {
              image[i] = 0.0L;
              for (int j = 0; j <= n; ++j) image[i] += static_cast<ld>(m.l(i, j)) * h[j];
            }
            if (!(image[n] > kDehomogenizationFloor)) {
              throw Error(ErrorCode::MapLeak, "homogeneous coordinate collapsed during dehomogenization");
            }
            for (int i = 0; i < n; ++i) image[i] /= image[n];
            Vector v(n);
            for (int i = 0; i < n; ++i) {
              if (unit) {
                v(i) = static_cast<double>(image[i]);
                continue;
              }
              ld acc = body.center()(i);
              for (int j = 0; j < n; ++j) acc += static_cast<ld>(body.shape_sqrt_inverse()(i, j)) * image[j];
              v(i) = static_cast<double>(acc);
            }
            return v;
          },
          [&](const map_kinds::Rotation& m) -> Vector {
            return body.center() + m.r * (p - body.center());
          },
          [&](const map_kinds::Composition& m) -> Vector {
            Vector q = p;
            for (const auto& f : m.maps) q = f(q);
            return q;
          },
          [&](const map_kinds::UnsafeCallback& m) -> Vector { return m.fn(p); },
      },
      variant_);
}

Vector NonexpansiveMap::operator()(const Vector& p) const {
  require_interior(*body_, p, "map input");
  Vector out = apply(p);
  if (out.size() != body_->dim() || !is_interior(*body_, out)) {
    throw Error(ErrorCode::MapLeak, kind_name() + " mapped an interior point outside the interior");
  }
  return out;
}

void NonexpansiveMap::certify(std::uint64_t seed) {
  Rng rng(seed);
  PointSampler sampler(*body_, rng);
  for (std::size_t i = 0; i < kCertificationPoints; ++i) {
    const Vector p = sampler.draw();
    try {
      (*this)(p);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidMap, "certification failed: " + std::string(e.what()));
    }
  }
  certified_ = true;
}

NonexpansiveReport check_nonexpansive(const NonexpansiveMap& f, std::size_t n_samples,
                                      std::uint64_t seed) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 1");
  const ConvexBody& body = f.body();
  Rng rng(seed);
  PointSampler sampler(body, rng);
  std::vector<std::pair<Vector, Vector>> pairs(n_samples);
  for (auto& pr : pairs) {
    pr.first = sampler.draw();
    pr.second = sampler.draw();
  }
  std::vector<double> before(n_samples);
  std::vector<double> margin(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    before[i] = hilbert_distance(body, x, y);
    margin[i] = hilbert_distance(body, f(x), f(y)) - before[i];
  });

  NonexpansiveReport r;
  r.samples = n_samples;
  r.seed = seed;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < n_samples; ++i) {
    if (margin[i] > margin[worst]) worst = i;
  }
  r.worst_margin = margin[worst];
  r.witness_x = pairs[worst].first;
  r.witness_y = pairs[worst].second;

  if (std::holds_alternative<map_kinds::RadialContraction>(f.variant())) {
    double strict = -std::numeric_limits<double>::infinity();
    double far = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (before[i] <= 0.0) continue;
      strict = std::max(strict, margin[i]);
      if (before[i] >= 0.1) far = std::max(far, margin[i]);
    }
    r.strict_margin = strict;
    r.strict_margin_far = far;
  }
  return r;
}

FixedPointScan scan_fixed_points(const NonexpansiveMap& f, std::size_t min_points) {
  const std::vector<Vector> grid = interior_grid(f.body(), min_points);
  std::vector<double> disp(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { disp[i] = (f(grid[i]) - grid[i]).norm(); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (disp[i] < disp[best]) best = i;
  }
  FixedPointScan scan;
  scan.grid_points = grid.size();
  scan.min_displacement = disp[best];
  scan.argmin = grid[best];
  scan.argmin_gap = boundary_gap(f.body(), grid[best], GapMode::Exact);
  return scan;
}

}  // namespace hilbert
