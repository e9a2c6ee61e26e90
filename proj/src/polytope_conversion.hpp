#pragma once

#include "hilbert/types.hpp"

#include <vector>

namespace hilbert::detail {

struct Halfspaces {
  Eigen::MatrixXd normals;  // unit rows
  Eigen::VectorXd offsets;
};

// Facet description of conv(vertices) by brute force over n-subsets: a hyperplane
// through n affinely independent vertices with every vertex on one side carries a
// facet. Adequate for the small vertex sets of dimension <= 8 this library targets.
Halfspaces facets_of_hull(const std::vector<Vector>& vertices);

}  // namespace hilbert::detail
