#pragma once

#include "hilbert/io.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hilbert {

std::string tool_version();

struct CheckBudgets {
  std::size_t metric_samples = 10'000;
  std::size_t condition_samples = 10'000;
  std::size_t map_samples = 10'000;
  std::size_t resolvent_samples = 1'000;
  std::size_t hull_samples = 1'000;
  std::size_t fixed_point_grid = 10'000;
  std::vector<double> resolvent_lambdas{1.0, 5.0, 25.0};
  /// (lambda, mu) pairs for the resolvent identity, lambda > mu.
  std::vector<std::pair<double, double>> identity_pairs{{8.0, 2.0}};
};

struct AttractorSettings {
  double tail_fraction = 0.25;
  double cluster_eps = 1e-2;
  /// Defaults to boundary_epsilon(grid.steps) when unset.
  std::optional<double> eps_boundary;
};

/// Parsed experiment. `body_spec` and `map_spec` hold resolved inline JSON so the
/// config echo (and its hash) does not depend on file locations.
struct ExperimentConfig {
  std::string name = "experiment";
  io::json body_spec;
  io::json map_spec;
  std::vector<Vector> base_points;
  SweepGrid grid;
  SolveOptions solve;
  CheckBudgets checks;
  AttractorSettings attractor;
  /// Declares the map free of interior fixed points; attractor verdicts are
  /// only binding when this holds and the body is an ellipsoid.
  bool fixed_point_free = false;
  std::uint64_t seed = 0;
  std::string output_dir;

  /// Throws InvalidConfig naming the offending field. Referenced files are
  /// resolved relative to `base_dir`.
  static ExperimentConfig from_json(const io::json& j, const std::string& base_dir = ".");
  io::json to_json() const;
  /// FNV-1a of the canonical config echo, as 16 hex digits.
  std::string hash() const;
};

enum class VerdictStatus { Pass, Fail, Exploratory };

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  VerdictStatus status = VerdictStatus::Pass;
  std::string note;
};

struct RunReport {
  io::json config;
  std::string config_hash;
  std::vector<Verdict> verdicts;
  std::vector<SweepTrajectory> trajectories;
  std::vector<OmegaReport> omega_reports;
  io::json stages;
  /// Wall time per stage in seconds. Kept out of the report document so reports
  /// stay byte-identical across runs.
  std::map<std::string, double> wall_time;

  int exit_code() const;
  io::json document() const;
};

/// Runs validation, metric checks, map checks, resolvent checks, sweeps and the
/// attractor analysis in that order. Validation errors abort before any numeric
/// stage.
RunReport run_experiment(const ExperimentConfig& config);

/// Runs the experiment and writes report.json, report.txt, trajectory_<i>.csv and
/// timings.json into `dir`. Refuses to replace a report whose config hash differs
/// unless `force` is set.
RunReport run_experiment_to_dir(const ExperimentConfig& config, const std::string& dir, bool force);

/// Built-in configurations: "disk-parabolic", "disk-rotation", "simplex-shift".
io::json preset(const std::string& name);
std::vector<std::string> preset_names();

std::string to_string(VerdictStatus s);

}  // namespace hilbert
