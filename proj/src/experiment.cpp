#include "hilbert/experiment.hpp"

#include "hilbert/parallel.hpp"
#include "hilbert/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#ifndef HILBERT_VERSION
#define HILBERT_VERSION "0.0.0"
#endif

namespace hilbert {

std::string tool_version() { return std::string("hilbert-resolvent ") + HILBERT_VERSION; }

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Exploratory: return "exploratory";
  }
  return "unknown";
}

namespace {

using io::json;

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, "field \"" + field + "\": " + why);
}

template <typename T>
T field_or(const json& j, const std::string& key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(path + key, e.what());
  }
}

json resolve_spec(const json& j, const std::string& key, const std::string& base_dir) {
  if (j.contains(key)) return j.at(key);
  const std::string file_key = key + "_file";
  if (j.contains(file_key)) {
    std::filesystem::path p = j.at(file_key).get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) config_error(file_key, "file " + p.string() + " does not exist");
    return io::load_json_file(p.string());
  }
  config_error(key, "missing (give \"" + key + "\" or \"" + file_key + "\")");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) config_error("<root>", "config must be a JSON object");
  ExperimentConfig c;
  c.name = field_or<std::string>(j, "name", c.name, "");
  c.body_spec = resolve_spec(j, "body", base_dir);
  c.map_spec = resolve_spec(j, "map", base_dir);

  if (!j.contains("base_points") || !j.at("base_points").is_array() || j.at("base_points").empty()) {
    config_error("base_points", "must be a nonempty array of points");
  }
  for (std::size_t i = 0; i < j.at("base_points").size(); ++i) {
    try {
      c.base_points.push_back(io::vector_from_json(j.at("base_points")[i]));
    } catch (const Error& e) {
      config_error("base_points[" + std::to_string(i) + "]", e.what());
    }
  }

  const json grid = j.value("grid", json::object());
  c.grid.lambda0 = field_or(grid, "lambda0", c.grid.lambda0, "grid.");
  c.grid.ratio = field_or(grid, "ratio", c.grid.ratio, "grid.");
  c.grid.steps = field_or(grid, "steps", c.grid.steps, "grid.");
  try {
    c.grid.validate();
  } catch (const Error& e) {
    config_error("grid", e.what());
  }

  const json solve = j.value("solve", json::object());
  c.solve.tol_step = field_or(solve, "tol_step", c.solve.tol_step, "solve.");
  c.solve.tol_res = field_or(solve, "tol_res", c.solve.tol_res, "solve.");
  c.solve.max_iter = field_or(solve, "max_iter", c.solve.max_iter, "solve.");
  try {
    c.solve.validate();
  } catch (const Error& e) {
    config_error("solve", e.what());
  }

  const json checks = j.value("checks", json::object());
  c.checks.metric_samples = field_or(checks, "metric_samples", c.checks.metric_samples, "checks.");
  c.checks.condition_samples = field_or(checks, "condition_samples", c.checks.condition_samples, "checks.");
  c.checks.map_samples = field_or(checks, "map_samples", c.checks.map_samples, "checks.");
  c.checks.resolvent_samples = field_or(checks, "resolvent_samples", c.checks.resolvent_samples, "checks.");
  c.checks.hull_samples = field_or(checks, "hull_samples", c.checks.hull_samples, "checks.");
  c.checks.fixed_point_grid = field_or(checks, "fixed_point_grid", c.checks.fixed_point_grid, "checks.");
  c.checks.resolvent_lambdas =
      field_or(checks, "resolvent_lambdas", c.checks.resolvent_lambdas, "checks.");
  if (checks.contains("identity_pairs")) {
    c.checks.identity_pairs.clear();
    for (const auto& pr : checks.at("identity_pairs")) {
      if (!pr.is_array() || pr.size() != 2) config_error("checks.identity_pairs", "entries are [lambda, mu]");
      const double lam = pr[0].get<double>();
      const double mu = pr[1].get<double>();
      if (!(lam > mu && mu > 0.0)) config_error("checks.identity_pairs", "needs lambda > mu > 0");
      c.checks.identity_pairs.emplace_back(lam, mu);
    }
  }
  for (std::size_t n : {c.checks.metric_samples, c.checks.condition_samples, c.checks.map_samples,
                        c.checks.resolvent_samples, c.checks.hull_samples}) {
    if (n == 0) config_error("checks", "sample budgets must be at least 1");
  }

  const json attr = j.value("attractor", json::object());
  c.attractor.tail_fraction = field_or(attr, "tail_fraction", c.attractor.tail_fraction, "attractor.");
  c.attractor.cluster_eps = field_or(attr, "cluster_eps", c.attractor.cluster_eps, "attractor.");
  if (attr.contains("eps_boundary")) c.attractor.eps_boundary = attr.at("eps_boundary").get<double>();
  if (!(c.attractor.tail_fraction > 0.0 && c.attractor.tail_fraction <= 1.0)) {
    config_error("attractor.tail_fraction", "must lie in (0, 1]");
  }

  c.fixed_point_free = field_or(j, "fixed_point_free", false, "");
  c.seed = field_or<std::uint64_t>(j, "seed", 0, "");
  if (j.contains("output") && j.at("output").contains("dir")) {
    c.output_dir = j.at("output").at("dir").get<std::string>();
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json pts = json::array();
  for (const auto& p : base_points) pts.push_back(io::to_json(p));
  json pairs = json::array();
  for (const auto& [lam, mu] : checks.identity_pairs) pairs.push_back({lam, mu});
  json attr = {{"tail_fraction", attractor.tail_fraction}, {"cluster_eps", attractor.cluster_eps}};
  if (attractor.eps_boundary) attr["eps_boundary"] = *attractor.eps_boundary;
  return {
      {"name", name},
      {"body", body_spec},
      {"map", map_spec},
      {"base_points", pts},
      {"grid", {{"lambda0", grid.lambda0}, {"ratio", grid.ratio}, {"steps", grid.steps}}},
      {"solve", {{"tol_step", solve.tol_step}, {"tol_res", solve.tol_res}, {"max_iter", solve.max_iter}}},
      {"checks",
       {{"metric_samples", checks.metric_samples},
        {"condition_samples", checks.condition_samples},
        {"map_samples", checks.map_samples},
        {"resolvent_samples", checks.resolvent_samples},
        {"hull_samples", checks.hull_samples},
        {"fixed_point_grid", checks.fixed_point_grid},
        {"resolvent_lambdas", checks.resolvent_lambdas},
        {"identity_pairs", pairs}}},
      {"attractor", attr},
      {"fixed_point_free", fixed_point_free},
      {"seed", seed},
  };
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
  return buf;
}

int RunReport::exit_code() const {
  for (const auto& v : verdicts) {
    if (v.status == VerdictStatus::Fail) return 1;
  }
  return 0;
}

json RunReport::document() const {
  json verdict_list = json::array();
  for (const auto& v : verdicts) {
    verdict_list.push_back({{"name", v.name},
                            {"value", v.value},
                            {"threshold", v.threshold},
                            {"status", to_string(v.status)},
                            {"note", v.note}});
  }
  return {{"tool_version", tool_version()},
          {"config_hash", config_hash},
          {"seed", config.at("seed")},
          {"config", config},
          {"stages", stages},
          {"verdicts", verdict_list},
          {"exit_code", exit_code()}};
}

namespace {

class StageTimer {
 public:
  StageTimer(RunReport& report, std::string name)
      : report_(report), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    report_.wall_time[name_] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  RunReport& report_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

void add(RunReport& r, std::string name, double value, double threshold, bool binding,
         std::string note = {}) {
  Verdict v;
  v.name = std::move(name);
  v.value = value;
  v.threshold = threshold;
  v.note = std::move(note);
  if (!binding) {
    v.status = VerdictStatus::Exploratory;
  } else {
    v.status = value <= threshold ? VerdictStatus::Pass : VerdictStatus::Fail;
  }
  r.verdicts.push_back(std::move(v));
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  RunReport report;
  report.config = config.to_json();
  report.config_hash = config.hash();
  const std::uint64_t seed = config.seed;

  // Validation: nothing numeric runs until body, map and base points are accepted.
  BodyPtr body;
  std::optional<NonexpansiveMap> map;
  {
    StageTimer t(report, "validation");
    try {
      body = std::make_shared<const ConvexBody>(io::body_from_json(config.body_spec));
    } catch (const Error& e) {
      config_error("body", e.what());
    }
    try {
      map = io::map_from_json(config.map_spec, body);
    } catch (const Error& e) {
      config_error("map", e.what());
    }
    for (std::size_t i = 0; i < config.base_points.size(); ++i) {
      const std::string field = "base_points[" + std::to_string(i) + "]";
      if (config.base_points[i].size() != body->dim()) config_error(field, "wrong dimension");
      if (!is_interior(*body, config.base_points[i])) config_error(field, "point is not strictly interior");
    }
    report.stages["validation"] = {{"body_kind", io::body_to_json(*body).at("type")},
                                   {"dim", body->dim()},
                                   {"map_kind", map->kind_name()},
                                   {"map_certified", map->certified()}};
  }
  const NonexpansiveMap& f = *map;
  const bool ellipsoid = body->is_ellipsoid();
  const bool attractor_binding = ellipsoid && config.fixed_point_free;

  {
    StageTimer t(report, "metric");
    const auto axioms = check_metric_axioms(*body, config.checks.metric_samples,
                                            derive_seed(seed, "metric.axioms"));
    const auto cond_c = check_condition_c(*body, config.checks.condition_samples,
                                          derive_seed(seed, "metric.condition_c"));
    const auto cond_d = check_condition_d(*body, config.checks.condition_samples,
                                          derive_seed(seed, "metric.condition_d"));
    report.stages["metric"] = {{"axioms", io::to_json(axioms)},
                               {"condition_c", io::to_json(cond_c)},
                               {"condition_d", io::to_json(cond_d)}};
    add(report, "metric.symmetry", axioms.max_asymmetry, 1e-10, true);
    add(report, "metric.triangle", axioms.max_triangle_excess, 1e-9, true);
    add(report, "metric.condition_c", cond_c.worst_violation, 1e-9, true);
    add(report, "metric.condition_d", cond_d.worst_violation, 1e-9, ellipsoid,
        ellipsoid ? "" : "condition (D) is only guaranteed on ellipsoids");
  }

  {
    StageTimer t(report, "map");
    const auto ne = check_nonexpansive(f, config.checks.map_samples, derive_seed(seed, "map.nonexpansive"));
    const auto scan = scan_fixed_points(f, config.checks.fixed_point_grid);
    report.stages["map"] = {{"nonexpansive", io::to_json(ne)}, {"fixed_point_scan", io::to_json(scan)}};
    add(report, "map.nonexpansive", ne.worst_margin, 1e-9, f.certified());
    add(report, "map.min_displacement", scan.min_displacement, 0.0, false,
        "smallest ||F(p) - p|| on the interior grid");
  }

  {
    StageTimer t(report, "resolvent");
    json stage;
    double worst_residual = 0.0;
    double worst_displacement = 0.0;
    double lhs_scaled = 0.0;
    json disp = json::array();
    for (const auto& x : config.base_points) {
      for (double lambda : config.checks.resolvent_lambdas) {
        const DisplacementCheck c = displacement_identity(f, x, lambda, config.solve);
        if (c.solve.converged) worst_residual = std::max(worst_residual, c.solve.residual);
        worst_displacement = std::max(worst_displacement, std::abs(c.lhs - c.rhs));
        lhs_scaled = std::max(lhs_scaled, c.lhs * (1.0 + lambda));
        json e = io::to_json(c);
        e["lambda"] = lambda;
        e["base_point"] = io::to_json(x);
        disp.push_back(e);
      }
    }
    stage["displacement"] = disp;
    json ident = json::array();
    double worst_identity = 0.0;
    for (const auto& x : config.base_points) {
      for (const auto& [lam, mu] : config.checks.identity_pairs) {
        const auto c = check_resolvent_identity(f, x, lam, mu, config.solve);
        worst_identity = std::max(worst_identity, c.residual);
        json e = io::to_json(c);
        e["lambda"] = lam;
        e["mu"] = mu;
        ident.push_back(e);
      }
    }
    stage["identity"] = ident;
    json nonex = json::array();
    for (double lambda : config.checks.resolvent_lambdas) {
      const auto r = check_resolvent_nonexpansive(
          f, lambda, config.checks.resolvent_samples,
          derive_seed(seed, "resolvent.nonexpansive." + io::format_double(lambda)), config.solve);
      json e = io::to_json(r);
      e["lambda"] = lambda;
      nonex.push_back(e);
      add(report, "resolvent.nonexpansive[lambda=" + io::format_double(lambda) + "]", r.worst_margin,
          1e-8, r.guaranteed, r.guaranteed ? "" : "guarantee needs condition (D)");
    }
    stage["nonexpansive"] = nonex;
    report.stages["resolvent"] = stage;
    add(report, "resolvent.fixed_point_residual", worst_residual, config.solve.tol_res, true);
    add(report, "resolvent.displacement_identity", worst_displacement, 10.0 * config.solve.tol_res, true);
    add(report, "resolvent.identity", worst_identity, 1e-7, true);
    add(report, "resolvent.scaled_displacement", lhs_scaled, body->diameter_bound(), true,
        "||R(x) - F(R(x))|| (1 + lambda) against the diameter bound");
  }

  {
    StageTimer t(report, "sweeps");
    report.trajectories.resize(config.base_points.size());
    parallel_for(config.base_points.size(), [&](std::size_t i) {
      report.trajectories[i] = lambda_sweep(f, config.base_points[i], config.grid, config.solve);
    });
    json sweeps = json::array();
    std::size_t non_converged = 0;
    for (const auto& tr : report.trajectories) {
      for (bool c : tr.converged) non_converged += c ? 0 : 1;
      sweeps.push_back({{"base_point", io::to_json(tr.base_point)},
                        {"final_point", io::to_json(tr.points.back())},
                        {"final_gap", tr.boundary_gaps.back()},
                        {"burn_in", escape_burn_in(tr)},
                        {"total_iterations",
                         std::accumulate(tr.iterations.begin(), tr.iterations.end(), std::size_t{0})}});
    }
    report.stages["sweeps"] = sweeps;
    add(report, "sweeps.non_converged", static_cast<double>(non_converged), 0.0, false,
        "solves that exhausted max_iter");
  }

  {
    StageTimer t(report, "attractor");
    json stage;
    const double eps_boundary = config.attractor.eps_boundary.value_or(boundary_epsilon(config.grid.steps));
    json omegas = json::array();
    double worst_centroid_gap = 0.0;
    for (const auto& tr : report.trajectories) {
      OmegaReport om = omega_estimate(*body, tr, config.attractor.tail_fraction, config.attractor.cluster_eps);
      for (const auto& c : om.clusters) worst_centroid_gap = std::max(worst_centroid_gap, c.gap);
      report.omega_reports.push_back(std::move(om));
    }
    const HullCheck hull = hull_boundary_check(*body, report.omega_reports, config.checks.hull_samples,
                                               derive_seed(seed, "attractor.hull"), eps_boundary);
    for (auto& om : report.omega_reports) {
      om.hull_sample_gaps = hull.gaps;
      omegas.push_back(io::to_json(om));
    }
    const OmegaReport pooled = attractor_estimate(*body, report.trajectories, config.attractor.tail_fraction,
                                                  config.attractor.cluster_eps);
    stage["omega"] = omegas;
    stage["attractor"] = io::to_json(pooled);
    stage["hull"] = io::to_json(hull);
    const std::string why = attractor_binding ? "" : "informational: needs an ellipsoid and a fixed-point-free map";
    add(report, "attractor.centroid_gap", worst_centroid_gap, 1e-2, attractor_binding, why);
    add(report, "attractor.hull_gap", hull.gaps.max, eps_boundary, attractor_binding, why);
    add(report, "attractor.clusters", static_cast<double>(pooled.clusters.size()), 1.0, false,
        "number of accumulation clusters across base points");
    if (ellipsoid) {
      try {
        const DenjoyWolffEstimate dw = denjoy_wolff(f, config.base_points, config.grid, config.solve);
        stage["denjoy_wolff"] = io::to_json(dw);
        add(report, "denjoy_wolff.spread", dw.spread, 1e-2, attractor_binding, why);
      } catch (const Error& e) {
        stage["denjoy_wolff"] = {{"error", e.what()}};
        add(report, "denjoy_wolff.spread", std::nan(""), 1e-2, false, e.what());
      }
    }
    report.stages["attractor"] = stage;
  }
  return report;
}

RunReport run_experiment_to_dir(const ExperimentConfig& config, const std::string& dir, bool force) {
  namespace fs = std::filesystem;
  const fs::path out(dir);
  const fs::path report_path = out / "report.json";
  const std::string hash = config.hash();
  if (fs::exists(report_path) && !force) {
    std::string existing;
    try {
      existing = io::load_json_file(report_path.string()).value("config_hash", std::string());
    } catch (const Error&) {
      existing = "<unreadable>";
    }
    if (existing != hash) {
      throw Error(ErrorCode::InvalidConfig, report_path.string() + " belongs to config " + existing +
                                                ", not " + hash + "; pass --force to overwrite");
    }
  }
  RunReport report = run_experiment(config);
  fs::create_directories(out);
  const json doc = report.document();
  {
    std::ofstream f(report_path);
    f << doc.dump(2) << '\n';
  }
  {
    std::ofstream f(out / "report.txt");
    f << io::to_text(doc);
  }
  for (std::size_t i = 0; i < report.trajectories.size(); ++i) {
    std::ofstream f(out / ("trajectory_" + std::to_string(i) + ".csv"));
    io::write_trajectory_csv(f, report.trajectories[i],
                             {"config_hash=" + hash, "seed=" + std::to_string(config.seed),
                              "base_point_index=" + std::to_string(i)});
  }
  {
    std::ofstream f(out / "timings.json");
    f << json({{"config_hash", hash}, {"seed", config.seed}, {"wall_time_seconds", report.wall_time}}).dump(2) << '\n';
  }
  return report;
}

std::vector<std::string> preset_names() { return {"disk-parabolic", "disk-rotation", "simplex-shift"}; }

json preset(const std::string& name) {
  const json disk = {{"type", "ellipsoid"}, {"dim", 2}, {"center", {0.0, 0.0}}, {"Q", {{1.0, 0.0}, {0.0, 1.0}}}};
  const json base = {{0.0, 0.0}, {0.3, -0.2}, {-0.5, 0.1}};
  if (name == "disk-parabolic") {
    return {{"name", name},
            {"body", disk},
            {"map", {{"type", "parabolic"}, {"t", 1.0}}},
            {"base_points", base},
            {"grid", {{"lambda0", 1.0}, {"ratio", 2.0}, {"steps", 20}}},
            {"fixed_point_free", true},
            {"seed", 42}};
  }
  if (name == "disk-rotation") {
    return {{"name", name},
            {"body", disk},
            {"map", {{"type", "rotation"}, {"angle", std::numbers::pi / 2.0}}},
            {"base_points", base},
            {"grid", {{"lambda0", 1.0}, {"ratio", 2.0}, {"steps", 12}}},
            {"fixed_point_free", false},
            {"seed", 42}};
  }
  if (name == "simplex-shift") {
    return {{"name", name},
            {"body", {{"type", "simplex"}, {"dim", 2}}},
            {"map", {{"type", "projective"}, {"M", {{1.0, 1.0}, {0.0, 1.0}}}}},
            {"base_points", {{0.2}, {0.5}, {0.8}}},
            {"grid", {{"lambda0", 1.0}, {"ratio", 2.0}, {"steps", 20}}},
            {"fixed_point_free", true},
            {"seed", 42}};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown preset \"" + name + "\"");
}

}  // namespace hilbert
