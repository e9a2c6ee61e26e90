#pragma once

#include "hilbert/dynamics.hpp"
#include "hilbert/metric.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace hilbert::io {

using json = nlohmann::json;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);
std::string format_vector(const Vector& v, std::string_view sep = ", ");

/// "0.5,-0.25" -> (0.5, -0.25). Throws InvalidArgument on malformed or non-finite input.
Vector parse_vector(std::string_view text);
/// "0,0;0.3,-0.2" -> two points.
std::vector<Vector> parse_vector_list(std::string_view text);

Vector vector_from_json(const json& j);
json to_json(const Vector& v);
SmallMatrix matrix_from_json(const json& j, int rows, int cols);

/// Body spec: {"type": "hpolytope"|"vpolytope"|"ellipsoid"|"simplex", "dim": n, ...}.
/// Matrices are nested row arrays or flat row-major arrays.
ConvexBody body_from_json(const json& j);
json body_to_json(const ConvexBody& body);

/// Map spec: {"type": "constant"|"radial"|"projective"|"form_isometry"|"parabolic"|
/// "rotation"|"composition", ...}. Parameters are checked against `body`.
NonexpansiveMap map_from_json(const json& j, const BodyPtr& body);

json load_json_file(const std::string& path);
/// Inline JSON when the text starts with '{', otherwise a file path.
json load_json_arg(const std::string& text);

json to_json(const QuadrupleSampleReport& r);
json to_json(const MetricAxiomReport& r);
json to_json(const NonexpansiveReport& r);
json to_json(const FixedPointScan& r);
json to_json(const ResolventSolve& r);
json to_json(const ResolventIdentityCheck& r);
json to_json(const ResolventNonexpansiveReport& r);
json to_json(const DisplacementCheck& r);
json to_json(const OmegaReport& r);
json to_json(const HullCheck& r);
json to_json(const DenjoyWolffEstimate& r);
json to_json(const SweepTrajectory& t);

/// Columns: lambda, coord_0..coord_{n-1}, iterations, residual, boundary_gap, converged.
/// Each line of `preamble` is written first as a '#' comment.
void write_trajectory_csv(std::ostream& out, const SweepTrajectory& t,
                          const std::vector<std::string>& preamble = {});

/// Structured text: one "key: value" line per scalar field, nested objects indented.
std::string to_text(const json& j, int indent = 0);

}  // namespace hilbert::io
