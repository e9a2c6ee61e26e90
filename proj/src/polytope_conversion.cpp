#include "polytope_conversion.hpp"

#include <cmath>
#include <vector>

namespace hilbert::detail {
namespace {

constexpr double kMaxSubsets = 4e6;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Unit normal of the hyperplane through the given points, or an empty vector when
// they are affinely dependent.
Vector hyperplane_normal(const std::vector<Vector>& pts, const std::vector<int>& idx, int dim) {
  if (dim == 1) return Vector::Ones(1);
  Eigen::MatrixXd span(dim - 1, dim);
  for (int r = 1; r < dim; ++r) span.row(r - 1) = (pts[idx[r]] - pts[idx[0]]).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(dim - 2) <= 1e-10 * std::max(1.0, sv(0))) return {};
  Vector n = svd.matrixV().col(dim - 1);
  return n / n.norm();
}

}  // namespace

Halfspaces facets_of_hull(const std::vector<Vector>& vertices) {
  const int count = static_cast<int>(vertices.size());
  const int dim = static_cast<int>(vertices.front().size());
  if (binomial(count, dim) > kMaxSubsets) {
    throw Error(ErrorCode::InvalidBody, "too many vertices for halfspace conversion");
  }

  double scale = 0.0;
  for (const auto& v : vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  const double side_tol = 1e-9 * std::max(1.0, scale);

  std::vector<Vector> normals;
  std::vector<double> offsets;
  std::vector<int> idx(dim);
  for (int i = 0; i < dim; ++i) idx[i] = i;

  while (true) {
    Vector n = hyperplane_normal(vertices, idx, dim);
    if (n.size() > 0) {
      const double off = n.dot(vertices[idx[0]]);
      bool below = false;
      bool above = false;
      for (const auto& v : vertices) {
        const double s = n.dot(v) - off;
        below = below || s < -side_tol;
        above = above || s > side_tol;
      }
      if (below != above) {
        if (above) n = -n;
        const double o = n.dot(vertices[idx[0]]);
        bool duplicate = false;
        for (std::size_t f = 0; f < normals.size() && !duplicate; ++f) {
          duplicate = (normals[f] - n).norm() <= 1e-9 && std::abs(offsets[f] - o) <= side_tol;
        }
        if (!duplicate) {
          normals.push_back(n);
          offsets.push_back(o);
        }
      }
    }
    // next combination in lexicographic order
    int pos = dim - 1;
    while (pos >= 0 && idx[pos] == count - dim + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < dim; ++j) idx[j] = idx[j - 1] + 1;
  }

  Halfspaces h;
  h.normals.resize(static_cast<Eigen::Index>(normals.size()), dim);
  h.offsets.resize(static_cast<Eigen::Index>(normals.size()));
  for (std::size_t f = 0; f < normals.size(); ++f) {
    h.normals.row(static_cast<Eigen::Index>(f)) = normals[f].transpose();
    h.offsets(static_cast<Eigen::Index>(f)) = offsets[f];
  }
  return h;
}

}  // namespace hilbert::detail
