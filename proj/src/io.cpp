#include "hilbert/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hilbert::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_vector(const Vector& v, std::string_view sep) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += sep;
    s += format_double(v(i));
  }
  return s;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<double> number_row(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " holds a non-number");
    out.push_back(x.get<double>());
    if (!std::isfinite(out.back())) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not finite");
  }
  return out;
}

Eigen::MatrixXd dense_from_json(const json& j, Eigen::Index cols, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a nonempty array");
  if (j.front().is_array()) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
      const auto row = number_row(j[r], what);
      if (static_cast<Eigen::Index>(row.size()) != cols) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " row " + std::to_string(r) +
                                                      " has " + std::to_string(row.size()) + " entries");
      }
      for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = row[c];
    }
    return m;
  }
  const auto flat = number_row(j, what);
  if (cols == 0 || flat.size() % static_cast<std::size_t>(cols) != 0) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " flat length is not a multiple of dim");
  }
  const auto rows = static_cast<Eigen::Index>(flat.size()) / cols;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  return m;
}

int declared_dim(const json& j, int fallback) {
  if (!j.contains("dim")) return fallback;
  const int d = j.at("dim").get<int>();
  if (fallback >= 0 && d != fallback) {
    throw Error(ErrorCode::DimensionMismatch, "\"dim\" is " + std::to_string(d) +
                                                  " but the data has dimension " + std::to_string(fallback));
  }
  return d;
}

json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Vector parse_vector(std::string_view text) {
  std::vector<double> vals;
  std::string_view rest = trim(text);
  if (!rest.empty() && (rest.front() == '(' || rest.front() == '[')) rest = rest.substr(1);
  if (!rest.empty() && (rest.back() == ')' || rest.back() == ']')) rest.remove_suffix(1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view tok = trim(rest.substr(0, comma));
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "malformed vector \"" + std::string(text) + "\"");
    }
    vals.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (vals.size() > static_cast<std::size_t>(kMaxLift)) {
    throw Error(ErrorCode::InvalidArgument, "vector has more than 9 entries");
  }
  Vector out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
  return out;
}

std::vector<Vector> parse_vector_list(std::string_view text) {
  std::vector<Vector> out;
  std::string_view rest = text;
  while (true) {
    const auto semi = rest.find(';');
    out.push_back(parse_vector(rest.substr(0, semi)));
    if (semi == std::string_view::npos) break;
    rest = rest.substr(semi + 1);
  }
  return out;
}

Vector vector_from_json(const json& j) {
  const auto vals = number_row(j, "vector");
  if (vals.empty() || vals.size() > static_cast<std::size_t>(kMaxLift)) {
    throw Error(ErrorCode::InvalidArgument, "vector length must be between 1 and 9");
  }
  Vector out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
  return out;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

SmallMatrix matrix_from_json(const json& j, int rows, int cols) {
  const Eigen::MatrixXd m = dense_from_json(j, cols, "matrix");
  if (m.rows() != rows) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix has " + std::to_string(m.rows()) + " rows, expected " + std::to_string(rows));
  }
  return m;
}

ConvexBody body_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "hpolytope") {
      const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(
          number_row(j.at("b"), "b").data(), static_cast<Eigen::Index>(j.at("b").size()));
      int dim = -1;
      if (j.contains("dim")) dim = j.at("dim").get<int>();
      if (dim < 0) {
        const json& a = j.at("A");
        if (a.empty() || !a.front().is_array()) {
          throw Error(ErrorCode::InvalidArgument, "flat \"A\" needs an explicit \"dim\"");
        }
        dim = static_cast<int>(a.front().size());
      }
      const Eigen::MatrixXd a = dense_from_json(j.at("A"), dim, "A");
      if (a.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "A and b have different row counts");
      return ConvexBody::hpolytope(a, b);
    }
    if (type == "vpolytope") {
      std::vector<Vector> verts;
      for (const auto& v : j.at("vertices")) verts.push_back(vector_from_json(v));
      if (verts.empty()) throw Error(ErrorCode::InvalidBody, "no vertices");
      declared_dim(j, static_cast<int>(verts.front().size()));
      return ConvexBody::vpolytope(verts);
    }
    if (type == "ellipsoid") {
      const Vector c = vector_from_json(j.at("center"));
      const int dim = declared_dim(j, static_cast<int>(c.size()));
      return ConvexBody::ellipsoid(c, matrix_from_json(j.at("Q"), dim, dim));
    }
    if (type == "simplex") {
      return ConvexBody::simplex(j.at("dim").get<int>());
    }
    throw Error(ErrorCode::InvalidBody, "unknown body type \"" + type + "\"");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidBody, std::string("malformed body spec: ") + e.what());
  }
}

json body_to_json(const ConvexBody& body) {
  switch (body.kind()) {
    case ConvexBody::Kind::HPolytope:
      return {{"type", "hpolytope"}, {"dim", body.dim()}, {"A", matrix_to_json(body.normals())},
              {"b", to_json(Vector(body.offsets()))}};
    case ConvexBody::Kind::VPolytope: {
      json verts = json::array();
      for (const auto& v : body.vertices()) verts.push_back(to_json(v));
      return {{"type", "vpolytope"}, {"dim", body.dim()}, {"vertices", verts}};
    }
    case ConvexBody::Kind::Ellipsoid:
      return {{"type", "ellipsoid"}, {"dim", body.dim()}, {"center", to_json(body.center())},
              {"Q", matrix_to_json(body.shape())}};
    case ConvexBody::Kind::Simplex:
      return {{"type", "simplex"}, {"dim", body.barycentric_dim()}};
  }
  return {};
}

NonexpansiveMap map_from_json(const json& j, const BodyPtr& body) {
  try {
    const std::string type = j.at("type").get<std::string>();
    const int n = body->dim();
    if (type == "constant") return NonexpansiveMap::constant(body, vector_from_json(j.at("c")));
    if (type == "radial") {
      return NonexpansiveMap::radial(body, vector_from_json(j.at("x0")), j.at("l").get<double>());
    }
    if (type == "projective") {
      const int m = body->kind() == ConvexBody::Kind::Simplex ? body->barycentric_dim() : n + 1;
      return NonexpansiveMap::projective(body, matrix_from_json(j.at("M"), m, m));
    }
    if (type == "form_isometry") {
      return NonexpansiveMap::form_isometry(body, matrix_from_json(j.at("L"), n + 1, n + 1));
    }
    if (type == "parabolic") return make_parabolic(body, j.at("t").get<double>());
    if (type == "rotation") {
      if (j.contains("angle")) return NonexpansiveMap::rotation_2d(body, j.at("angle").get<double>());
      return NonexpansiveMap::rotation(body, matrix_from_json(j.at("R"), n, n));
    }
    if (type == "composition") {
      std::vector<NonexpansiveMap> maps;
      for (const auto& m : j.at("maps")) maps.push_back(map_from_json(m, body));
      return NonexpansiveMap::composition(std::move(maps));
    }
    throw Error(ErrorCode::InvalidMap, "unknown map type \"" + type + "\"");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidMap, std::string("malformed map spec: ") + e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, path + ": " + e.what());
  }
}

json load_json_arg(const std::string& text) {
  const std::string_view t = trim(text);
  if (!t.empty() && t.front() == '{') {
    try {
      return json::parse(t);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("inline JSON: ") + e.what());
    }
  }
  return load_json_file(text);
}

json to_json(const QuadrupleSampleReport& r) {
  json w = {{"x", to_json(r.worst_witness.x)},
            {"y", to_json(r.worst_witness.y)},
            {"z", to_json(r.worst_witness.z)},
            {"s", r.worst_witness.s}};
  if (r.worst_witness.w.size() > 0) w["w"] = to_json(r.worst_witness.w);
  return {{"samples", r.samples}, {"worst_violation", r.worst_violation}, {"worst_witness", w},
          {"seed", r.seed}};
}

json to_json(const MetricAxiomReport& r) {
  return {{"samples", r.samples},
          {"max_asymmetry", r.max_asymmetry},
          {"max_triangle_excess", r.max_triangle_excess},
          {"max_tiny_distance_gap", r.max_tiny_distance_gap},
          {"seed", r.seed}};
}

json to_json(const NonexpansiveReport& r) {
  json j = {{"samples", r.samples},
            {"worst_margin", r.worst_margin},
            {"witness", {to_json(r.witness_x), to_json(r.witness_y)}},
            {"seed", r.seed}};
  if (r.strict_margin) j["strict_margin"] = *r.strict_margin;
  if (r.strict_margin_far) j["strict_margin_far"] = *r.strict_margin_far;
  return j;
}

json to_json(const FixedPointScan& r) {
  return {{"grid_points", r.grid_points},
          {"min_displacement", r.min_displacement},
          {"argmin", to_json(r.argmin)},
          {"argmin_gap", r.argmin_gap}};
}

json to_json(const ResolventSolve& r) {
  return {{"point", to_json(r.point)},
          {"iterations", r.iterations},
          {"last_step", r.last_step},
          {"residual", r.residual},
          {"converged", r.converged}};
}

json to_json(const ResolventIdentityCheck& r) {
  return {{"residual", r.residual}, {"lhs", to_json(r.lhs)}, {"rhs", to_json(r.rhs)},
          {"converged", r.converged}};
}

json to_json(const ResolventNonexpansiveReport& r) {
  return {{"samples", r.samples},
          {"worst_margin", r.worst_margin},
          {"witness", {to_json(r.witness_z1), to_json(r.witness_z2)}},
          {"non_converged", r.non_converged},
          {"guaranteed", r.guaranteed},
          {"seed", r.seed}};
}

json to_json(const DisplacementCheck& r) {
  return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"solve", to_json(r.solve)}};
}

json to_json(const OmegaReport& r) {
  json clusters = json::array();
  for (const auto& c : r.clusters) {
    clusters.push_back({{"centroid", to_json(c.centroid)}, {"members", c.members}, {"gap", c.gap}});
  }
  json pts = json::array();
  for (const auto& p : r.attractor_points) pts.push_back(to_json(p));
  json j = {{"clusters", clusters},
            {"cluster_eps", r.cluster_eps},
            {"tail_fraction", r.tail_fraction},
            {"attractor_points", pts}};
  if (r.hull_sample_gaps) {
    j["hull_sample_gaps"] = {{"samples", r.hull_sample_gaps->samples},
                             {"max", r.hull_sample_gaps->max},
                             {"mean", r.hull_sample_gaps->mean}};
  }
  return j;
}

json to_json(const HullCheck& r) {
  return {{"samples", r.gaps.samples}, {"max_gap", r.gaps.max}, {"mean_gap", r.gaps.mean},
          {"eps_boundary", r.eps_boundary}, {"classification", r.pass ? "PASS" : "FAIL"}};
}

json to_json(const DenjoyWolffEstimate& r) {
  json finals = json::array();
  for (const auto& p : r.final_points) finals.push_back(to_json(p));
  return {{"xi", to_json(r.xi)}, {"spread", r.spread}, {"per_base_error", r.per_base_error},
          {"final_points", finals}};
}

json to_json(const SweepTrajectory& t) {
  json pts = json::array();
  for (const auto& p : t.points) pts.push_back(to_json(p));
  std::vector<bool> conv(t.converged.begin(), t.converged.end());
  return {{"base_point", to_json(t.base_point)}, {"lambdas", t.lambdas}, {"points", pts},
          {"residuals", t.residuals}, {"iterations", t.iterations},
          {"boundary_gaps", t.boundary_gaps}, {"converged", conv}};
}

void write_trajectory_csv(std::ostream& out, const SweepTrajectory& t,
                          const std::vector<std::string>& preamble) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  const Eigen::Index n = t.base_point.size();
  out << "lambda";
  for (Eigen::Index i = 0; i < n; ++i) out << ",coord_" << i;
  out << ",iterations,residual,boundary_gap,converged\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    out << format_double(t.lambdas[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(t.points[k](i));
    out << ',' << t.iterations[k] << ',' << format_double(t.residuals[k]) << ','
        << format_double(t.boundary_gaps[k]) << ',' << (t.converged[k] ? 1 : 0) << '\n';
  }
}

namespace {

std::string scalar_text(const json& j) {
  if (j.is_number_float()) return format_double(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

bool is_flat_array(const json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
}

}  // namespace

std::string to_text(const json& j, int indent) {
  std::ostringstream out;
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  auto inline_value = [](const json& v) {
    if (is_flat_array(v)) {
      std::string s = "(";
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + scalar_text(v[i]);
      return s + ")";
    }
    return scalar_text(v);
  };
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_primitive() || is_flat_array(value)) {
        out << pad << key << ": " << inline_value(value) << '\n';
      } else {
        out << pad << key << ":\n" << to_text(value, indent + 2);
      }
    }
  } else if (j.is_array()) {
    for (const auto& value : j) {
      if (value.is_primitive() || is_flat_array(value)) {
        out << pad << "- " << inline_value(value) << '\n';
      } else {
        out << pad << "-\n" << to_text(value, indent + 2);
      }
    }
  } else {
    out << pad << scalar_text(j) << '\n';
  }
  return out.str();
}

}  // namespace hilbert::io
