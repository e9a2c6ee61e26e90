#include "hilbert/experiment.hpp"
#include "hilbert/parallel.hpp"
#include "hilbert/rng.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hilbert;
using io::json;

namespace {

enum class Format { Text, Json, Csv };

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Root seed for sampled checks (64-bit)")->capture_default_str();
  cmd->add_option("--out", c.out, "Write output to this file (a directory for run) instead of stdout");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
}

Format format_of(const Common& c) {
  if (c.format == "json") return Format::Json;
  if (c.format == "csv") return Format::Csv;
  return Format::Text;
}

// Flattens nested objects into dotted keys; arrays of numbers become one
// space-separated field.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array() && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); })) {
    std::string s;
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? " " : "") + io::format_double(j[i].get<double>());
    rows.emplace_back(prefix, s);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, io::format_double(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

std::string render(const json& doc, Format fmt) {
  switch (fmt) {
    case Format::Json: return doc.dump(2) + "\n";
    case Format::Text: return io::to_text(doc);
    case Format::Csv: {
      std::vector<std::pair<std::string, std::string>> rows;
      flatten(doc, "", rows);
      std::string s = "key,value\n";
      for (const auto& [k, v] : rows) s += k + "," + v + "\n";
      return s;
    }
  }
  return {};
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + c.out);
  f << text;
}

BodyPtr load_body(const std::string& arg) {
  return std::make_shared<const ConvexBody>(io::body_from_json(io::load_json_arg(arg)));
}

NonexpansiveMap load_map(const std::string& arg, const BodyPtr& body) {
  return io::map_from_json(io::load_json_arg(arg), body);
}

// Simplex bodies accept either chart coordinates or full barycentric vectors.
Vector point_in(const ConvexBody& body, const std::string& text) {
  Vector p = io::parse_vector(text);
  if (body.kind() == ConvexBody::Kind::Simplex && p.size() == body.barycentric_dim()) return body.chart(p);
  if (p.size() != body.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "point \"" + text + "\" has " + std::to_string(p.size()) +
                                                  " coordinates, body has dimension " +
                                                  std::to_string(body.dim()));
  }
  return p;
}

struct SolveFlags {
  double tol_step = SolveOptions{}.tol_step;
  double tol_res = SolveOptions{}.tol_res;
  std::size_t max_iter = SolveOptions{}.max_iter;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol-step", tol_step, "Stop when the Hilbert step falls below this")->capture_default_str();
    cmd->add_option("--tol-res", tol_res, "Required Euclidean fixed-point residual")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "Iteration cap per solve")->capture_default_str();
  }
  SolveOptions options() const {
    SolveOptions o;
    o.tol_step = tol_step;
    o.tol_res = tol_res;
    o.max_iter = max_iter;
    o.validate();
    return o;
  }
};

struct GridFlags {
  SweepGrid grid;
  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda0", grid.lambda0, "First lambda of the geometric grid")->capture_default_str();
    cmd->add_option("--ratio", grid.ratio, "Grid ratio (> 1)")->capture_default_str();
    cmd->add_option("--steps", grid.steps, "Number of grid points")->capture_default_str();
  }
};

int run_cli(int argc, char** argv) {
  CLI::App app{"Hilbert metrics, resolvents and boundary dynamics on convex domains"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  // dist
  Common dist_c;
  std::string dist_body, dist_x, dist_y;
  auto* dist = app.add_subcommand("dist", "Hilbert distance between two interior points");
  add_common(dist, dist_c);
  dist->add_option("--body", dist_body, "Body spec: inline JSON or a JSON file")->required();
  dist->add_option("--x", dist_x, "First point, e.g. 0,0")->required();
  dist->add_option("--y", dist_y, "Second point")->required();

  // resolve
  Common res_c;
  SolveFlags res_s;
  std::string res_body, res_map, res_x, res_warm;
  double res_lambda = 1.0;
  auto* resolve = app.add_subcommand("resolve", "Compute the resolvent R_lambda(x) by Picard iteration");
  add_common(resolve, res_c);
  resolve->add_option("--body", res_body, "Body spec: inline JSON or a JSON file")->required();
  resolve->add_option("--map", res_map, "Map spec: inline JSON or a JSON file")->required();
  resolve->add_option("--x", res_x, "Base point")->required();
  resolve->add_option("--lambda", res_lambda, "Resolvent parameter (> 0)")->required();
  resolve->add_option("--warm-start", res_warm, "Initial iterate (defaults to x)");
  res_s.attach(resolve);

  // sweep
  Common sw_c;
  SolveFlags sw_s;
  GridFlags sw_g;
  std::string sw_body, sw_map, sw_x;
  auto* sweep = app.add_subcommand("sweep", "Warm-started resolvent sweep over a geometric lambda grid");
  add_common(sweep, sw_c);
  sweep->add_option("--body", sw_body, "Body spec: inline JSON or a JSON file")->required();
  sweep->add_option("--map", sw_map, "Map spec: inline JSON or a JSON file")->required();
  sweep->add_option("--x", sw_x, "Base point")->required();
  sw_g.attach(sweep);
  sw_s.attach(sweep);

  // attractor
  Common at_c;
  SolveFlags at_s;
  GridFlags at_g;
  std::string at_body, at_map, at_points;
  double at_tail = 0.25, at_eps = 1e-3;
  std::size_t at_hull = 1000;
  std::optional<double> at_eps_boundary;
  auto* attractor = app.add_subcommand("attractor", "Estimate accumulation points of R_lambda(x) as lambda grows");
  add_common(attractor, at_c);
  attractor->add_option("--body", at_body, "Body spec: inline JSON or a JSON file")->required();
  attractor->add_option("--map", at_map, "Map spec: inline JSON or a JSON file")->required();
  attractor->add_option("--points", at_points, "Base points separated by ';', e.g. \"0,0;0.3,-0.2\"")->required();
  attractor->add_option("--tail", at_tail, "Fraction of the sweep used as the tail")->capture_default_str();
  attractor->add_option("--cluster-eps", at_eps, "Clustering radius")->capture_default_str();
  attractor->add_option("--hull-samples", at_hull, "Random convex combinations of centroids")->capture_default_str();
  attractor->add_option("--eps-boundary", at_eps_boundary, "Hull gap threshold (default depends on --steps)");
  at_g.attach(attractor);
  at_s.attach(attractor);

  // check
  auto* check = app.add_subcommand("check", "Sampled property checks");
  check->require_subcommand(1);

  Common cm_c;
  std::string cm_body;
  std::size_t cm_n = 10'000;
  auto* c_metric = check->add_subcommand("metric", "Symmetry, triangle inequality and indiscernibles");
  add_common(c_metric, cm_c);
  c_metric->add_option("--body", cm_body, "Body spec: inline JSON or a JSON file")->required();
  c_metric->add_option("--samples", cm_n, "Number of samples")->capture_default_str();

  Common cc_c;
  std::string cc_body;
  std::size_t cc_n = 10'000;
  auto* c_cond_c = check->add_subcommand("condition-c", "Sample d(sx+(1-s)y, z) <= max(d(x,z), d(y,z))");
  add_common(c_cond_c, cc_c);
  c_cond_c->add_option("--body", cc_body, "Body spec: inline JSON or a JSON file")->required();
  c_cond_c->add_option("--samples", cc_n, "Number of samples")->capture_default_str();

  Common cd_c;
  std::string cd_body;
  std::size_t cd_n = 10'000;
  auto* c_cond_d = check->add_subcommand("condition-d",
                                         "Sample d(sx+(1-s)y, sz+(1-s)w) <= max(d(x,z), d(y,w))");
  add_common(c_cond_d, cd_c);
  c_cond_d->add_option("--body", cd_body, "Body spec: inline JSON or a JSON file")->required();
  c_cond_d->add_option("--samples", cd_n, "Number of samples")->capture_default_str();

  Common cmap_c;
  std::string cmap_body, cmap_map;
  std::size_t cmap_n = 10'000, cmap_grid = 10'000;
  auto* c_map = check->add_subcommand("map", "Sampled nonexpansiveness and interior fixed-point scan");
  add_common(c_map, cmap_c);
  c_map->add_option("--body", cmap_body, "Body spec: inline JSON or a JSON file")->required();
  c_map->add_option("--map", cmap_map, "Map spec: inline JSON or a JSON file")->required();
  c_map->add_option("--samples", cmap_n, "Number of sampled pairs")->capture_default_str();
  c_map->add_option("--grid", cmap_grid, "Minimum points of the fixed-point scan grid")->capture_default_str();

  Common cr_c;
  SolveFlags cr_s;
  std::string cr_body, cr_map;
  std::vector<double> cr_lambdas{1.0, 5.0, 25.0};
  std::size_t cr_n = 1000;
  auto* c_res = check->add_subcommand("resolvent", "Sampled nonexpansiveness of R_lambda");
  add_common(c_res, cr_c);
  c_res->add_option("--body", cr_body, "Body spec: inline JSON or a JSON file")->required();
  c_res->add_option("--map", cr_map, "Map spec: inline JSON or a JSON file")->required();
  c_res->add_option("--lambda", cr_lambdas, "One or more lambda values")->capture_default_str();
  c_res->add_option("--samples", cr_n, "Sampled pairs per lambda")->capture_default_str();
  cr_s.attach(c_res);

  Common ca_c;
  std::string ca_body, ca_x, ca_y, ca_z;
  std::size_t ca_n = 30;
  auto* c_ax2 = check->add_subcommand(
      "ax2", "delta_n = d(x_n,y_n) - max(d(x_n,z), d(y_n,z)) along rays from z towards two boundary points");
  add_common(c_ax2, ca_c);
  c_ax2->add_option("--body", ca_body, "Body spec: inline JSON or a JSON file")->required();
  c_ax2->add_option("--x-limit", ca_x, "Boundary limit of x_n")->required();
  c_ax2->add_option("--y-limit", ca_y, "Boundary limit of y_n")->required();
  c_ax2->add_option("--z", ca_z, "Interior reference point z")->required();
  c_ax2->add_option("-n,--terms", ca_n, "Number of terms; x_n = z + (1 - 2^-n)(x_limit - z)")->capture_default_str();

  // run
  Common run_c;
  std::string run_config, run_preset;
  bool run_force = false;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "Run a full experiment from a config file or a built-in preset");
  run->add_option("--config", run_config, "Experiment config (JSON)");
  run->add_option("--preset", run_preset, "Built-in experiment")->check(CLI::IsMember(preset_names()));
  run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--out", run_c.out, "Output directory");
  run->add_option("--format", run_c.format, "Format of the verdict summary on stdout")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  run->add_flag("--force", run_force, "Overwrite a report written for a different config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* ctx = &app;
    for (const auto* sub : {dist, resolve, sweep, attractor, check, run}) {
      if (sub->parsed()) ctx = sub;
    }
    for (const auto* sub : check->get_subcommands({})) {
      if (sub->parsed()) ctx = sub;
    }
    std::cerr << ctx->help();
    return 2;
  }

  if (dist->parsed()) {
    const auto body = load_body(dist_body);
    const double d = hilbert_distance(*body, point_in(*body, dist_x), point_in(*body, dist_y));
    const Format fmt = format_of(dist_c);
    if (fmt == Format::Text) {
      emit(dist_c, io::format_double(d) + "\n");
    } else if (fmt == Format::Csv) {
      emit(dist_c, "distance\n" + io::format_double(d) + "\n");
    } else {
      emit(dist_c, render(json{{"distance", d}}, fmt));
    }
    return 0;
  }

  if (resolve->parsed()) {
    const auto body = load_body(res_body);
    const auto f = load_map(res_map, body);
    SolveOptions o = res_s.options();
    if (!res_warm.empty()) o.warm_start = point_in(*body, res_warm);
    const ResolventSolve s = solve_resolvent(f, point_in(*body, res_x), res_lambda, o);
    json doc = io::to_json(s);
    doc["lambda"] = res_lambda;
    emit(res_c, render(doc, format_of(res_c)));
    return s.converged ? 0 : 1;
  }

  if (sweep->parsed()) {
    const auto body = load_body(sw_body);
    const auto f = load_map(sw_map, body);
    SweepTrajectory t;
    int code = 0;
    try {
      t = lambda_sweep(f, point_in(*body, sw_x), sw_g.grid, sw_s.options());
    } catch (const SweepError& e) {
      std::cerr << "error: " << e.what() << " (partial trajectory written)\n";
      t = e.partial();
      code = 3;
    }
    if (format_of(sw_c) == Format::Csv) {
      std::ostringstream s;
      io::write_trajectory_csv(s, t, {"seed=" + std::to_string(sw_c.seed)});
      emit(sw_c, s.str());
    } else {
      emit(sw_c, render(io::to_json(t), format_of(sw_c)));
    }
    return code;
  }

  if (attractor->parsed()) {
    const auto body = load_body(at_body);
    const auto f = load_map(at_map, body);
    std::vector<Vector> base;
    for (const auto& p : io::parse_vector_list(at_points)) {
      base.push_back(point_in(*body, io::format_vector(p, ",")));
    }
    const SolveOptions o = at_s.options();
    std::vector<SweepTrajectory> trajs(base.size());
    parallel_for(base.size(), [&](std::size_t i) { trajs[i] = lambda_sweep(f, base[i], at_g.grid, o); });
    std::vector<OmegaReport> per_base;
    json omegas = json::array();
    for (const auto& t : trajs) {
      per_base.push_back(omega_estimate(*body, t, at_tail, at_eps));
      omegas.push_back(io::to_json(per_base.back()));
    }
    const double eps_b = at_eps_boundary.value_or(boundary_epsilon(at_g.grid.steps));
    const HullCheck hull =
        hull_boundary_check(*body, per_base, at_hull, derive_seed(at_c.seed, "attractor.hull"), eps_b);
    json doc = {{"seed", at_c.seed},
                {"attractor", io::to_json(attractor_estimate(*body, trajs, at_tail, at_eps))},
                {"omega", omegas},
                {"hull", io::to_json(hull)}};
    if (body->is_ellipsoid() && at_g.grid.steps >= 2) {
      try {
        doc["denjoy_wolff"] = io::to_json(denjoy_wolff(f, base, at_g.grid, o));
      } catch (const Error& e) {
        doc["denjoy_wolff"] = {{"error", e.what()}};
      }
    }
    emit(at_c, render(doc, format_of(at_c)));
    return 0;
  }

  if (c_metric->parsed()) {
    const auto body = load_body(cm_body);
    const auto r = check_metric_axioms(*body, cm_n, cm_c.seed);
    emit(cm_c, render(io::to_json(r), format_of(cm_c)));
    return r.max_asymmetry <= 1e-10 && r.max_triangle_excess <= 1e-9 ? 0 : 1;
  }

  if (c_cond_c->parsed()) {
    const auto body = load_body(cc_body);
    const auto r = check_condition_c(*body, cc_n, cc_c.seed);
    emit(cc_c, render(io::to_json(r), format_of(cc_c)));
    return r.worst_violation <= 1e-9 ? 0 : 1;
  }

  if (c_cond_d->parsed()) {
    const auto body = load_body(cd_body);
    const auto r = check_condition_d(*body, cd_n, cd_c.seed);
    json doc = io::to_json(r);
    // Off ellipsoids the sample is evidence only.
    doc["status"] = body->is_ellipsoid() ? (r.worst_violation <= 1e-9 ? "pass" : "fail") : "exploratory";
    emit(cd_c, render(doc, format_of(cd_c)));
    return body->is_ellipsoid() && r.worst_violation > 1e-9 ? 1 : 0;
  }

  if (c_map->parsed()) {
    const auto body = load_body(cmap_body);
    const auto f = load_map(cmap_map, body);
    const auto r = check_nonexpansive(f, cmap_n, cmap_c.seed);
    const auto scan = scan_fixed_points(f, cmap_grid);
    emit(cmap_c, render(json{{"map", f.kind_name()},
                             {"certified", f.certified()},
                             {"nonexpansive", io::to_json(r)},
                             {"fixed_point_scan", io::to_json(scan)}},
                        format_of(cmap_c)));
    return r.worst_margin <= 1e-9 ? 0 : 1;
  }

  if (c_res->parsed()) {
    const auto body = load_body(cr_body);
    const auto f = load_map(cr_map, body);
    json doc = json::array();
    bool ok = true;
    for (double lambda : cr_lambdas) {
      const auto r = check_resolvent_nonexpansive(
          f, lambda, cr_n, derive_seed(cr_c.seed, "resolvent.nonexpansive." + io::format_double(lambda)),
          cr_s.options());
      json e = io::to_json(r);
      e["lambda"] = lambda;
      doc.push_back(e);
      if (r.guaranteed && r.worst_margin > 1e-8) ok = false;
    }
    emit(cr_c, render(json{{"checks", doc}}, format_of(cr_c)));
    return ok ? 0 : 1;
  }

  if (c_ax2->parsed()) {
    const auto body = load_body(ca_body);
    const Vector xl = io::parse_vector(ca_x);
    const Vector yl = io::parse_vector(ca_y);
    const Vector z = point_in(*body, ca_z);
    std::vector<Vector> xs, ys;
    for (std::size_t n = 1; n <= ca_n; ++n) {
      const double s = 1.0 - std::ldexp(1.0, -static_cast<int>(n));
      xs.push_back(z + s * (xl - z));
      ys.push_back(z + s * (yl - z));
    }
    const auto deltas = ax2_divergence(*body, xs, ys, z);
    if (format_of(ca_c) == Format::Csv) {
      std::string s = "n,delta\n";
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        s += std::to_string(i + 1) + "," + io::format_double(deltas[i]) + "\n";
      }
      emit(ca_c, s);
    } else {
      emit(ca_c, render(json{{"delta", deltas}}, format_of(ca_c)));
    }
    return 0;
  }

  if (run->parsed()) {
    if (run_config.empty() == run_preset.empty()) {
      std::cerr << "error: give exactly one of --config and --preset\n\n" << run->help();
      return 2;
    }
    json j;
    std::string base_dir = ".";
    if (!run_preset.empty()) {
      j = preset(run_preset);
    } else {
      j = io::load_json_file(run_config);
      base_dir = std::filesystem::path(run_config).parent_path().string();
      if (base_dir.empty()) base_dir = ".";
    }
    if (run_seed) j["seed"] = *run_seed;
    ExperimentConfig cfg = ExperimentConfig::from_json(j, base_dir);
    std::string dir = run_c.out.empty() ? cfg.output_dir : run_c.out;
    if (dir.empty()) dir = "hilbert-run-" + cfg.name;
    const RunReport report = run_experiment_to_dir(cfg, dir, run_force);
    json verdicts = json::array();
    for (const auto& v : report.document().at("verdicts")) verdicts.push_back(v);
    const json summary = {{"config_hash", report.config_hash},
                          {"seed", cfg.seed},
                          {"output_dir", dir},
                          {"verdicts", verdicts},
                          {"exit_code", report.exit_code()}};
    if (format_of(run_c) == Format::Text) {
      std::cout << "config_hash: " << report.config_hash << "\nseed: " << cfg.seed << "\noutput_dir: " << dir
                << "\n";
      for (const auto& v : report.verdicts) {
        std::cout << to_string(v.status) << "  " << v.name << "  value=" << io::format_double(v.value)
                  << "  threshold=" << io::format_double(v.threshold);
        if (!v.note.empty()) std::cout << "  (" << v.note << ")";
        std::cout << "\n";
      }
    } else {
      std::cout << render(summary, format_of(run_c));
    }
    return report.exit_code();
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
