#pragma once

// Scenario runner. A scenario is described by a versioned JSON document:
//
//   {
//     "schema_version": 1,
//     "scenario": "blowup",
//     "grid":   {"n": 1024, "length": 40.0},
//     "solver": {"dt": 1e-3, "t_end": 1.0, "scheme": "if_rk4", ...},
//     "params": {...scenario specific...},
//     "thresholds": {"relative_error": {"max": 0.02}},
//     "sweep": {"params.beta": [0.9, 0.95]},
//     "seed": 1,
//     "output_dir": "out/blowup"
//   }
//
// Unknown keys are rejected at every level. Every run writes report.json,
// timing.json (wall time, kept apart so report.json is reproducible) and CSV
// series into output_dir.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnls/dynamics.hpp"
#include "nnls/field.hpp"
#include "nnls/linops.hpp"

namespace nnls {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Scenario { soliton_propagation, blowup, stability_window, lower_bound, modulation_ode_check, spectrum };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct GridSpec {
  int n = 1024;
  double length = 40.0;
  Grid make() const { return Grid(n, length); }
};

struct Threshold {
  std::optional<double> min;
  std::optional<double> max;
};

struct SolitonPropagationParams {
  double alpha = 1.0;
  std::optional<double> beta;  // defaults to alpha (standing wave)
};

struct BlowupParams {
  double alpha = 1.0;
  double beta = 0.9;
  double t_end_factor = 1.2;    // run to factor * T when alpha != beta
  double tracking_fraction = 0.8;  // closed-form comparison up to fraction * T
};

struct StabilityWindowParams {
  std::vector<double> epsilons{1e-2};
  /// Data increment in units of eps (first tier) and eps^2 (second tier).
  double a_e = 0.0, b_e = 0.0, a_o = 1.0, b_o = 0.0;
  double eta_e = 0.0, eta_o = 0.0;  // H1 size of the random residual seeds, in units of eps^2
  double crossing_constant = 10.0;  // K in d(u(t), Q) > K eps
  double t_max = 50.0;              // search horizon for each direction
  double tier_constant = 1.0;
  bool backward = true;
};

struct LowerBoundParams {
  double alpha = 1.0;
  double beta = 0.99;
  double t_max = 10.0;       // clipped to 0.1 / |alpha - beta|
  int samples = 101;
  int quadrature_n = 65536;  // refined grid for the closed-form norms
  double quadrature_length = 80.0;
  double divergence_fraction = 0.99;
};

struct ModulationOdeParams {
  double delta = 1e-3;      // b_o-only and a_o-only fixture size
  double epsilon = 1e-2;    // generic tiered fixture
  double b_o_time = 0.5;    // a_o(b_o_time) is compared with -2 delta b_o_time
  double t_end = 2.0;
  double record_interval = 0.01;
};

struct SpectrumParams {
  int n = 512;
  double length = 30.0;
  int n_eigs = 16;
  std::vector<std::string> operators{"H_e", "L_minus", "free"};
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  Scenario scenario = Scenario::soliton_propagation;
  GridSpec grid;
  SolverConfig solver;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::map<std::string, Threshold> thresholds;
  std::map<std::string, std::vector<json>> sweep;  // dotted path -> values

  SolitonPropagationParams propagation;
  BlowupParams blowup;
  StabilityWindowParams stability;
  LowerBoundParams lower_bound;
  ModulationOdeParams modulation_ode;
  SpectrumParams spectrum;

  /// Canonical JSON echo (all fields, defaults filled in).
  json to_json() const;
};

/// Throws ConfigError naming the offending key.
ScenarioConfig parse_config(const json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical dump, as 16 lowercase hex digits.
std::string content_hash(const json& j);

struct ThresholdResult {
  std::string metric;
  double value = 0.0;
  Threshold bound;
  bool met = false;
};

struct RunReport {
  json config;
  std::string config_hash;
  std::string scenario;
  std::string status = "ok";  // ok | failed
  std::string error;
  std::map<std::string, json> metrics;
  std::vector<std::string> artifacts;  // relative to output_dir
  std::vector<ThresholdResult> thresholds;
  double wall_seconds = 0.0;  // written to timing.json only

  bool thresholds_met() const;
  json to_json() const;
};

/// Runs one scenario and writes its artifacts. Numerical failures are
/// recorded in the report; only configuration errors throw.
RunReport run_scenario(const ScenarioConfig& cfg);

RunReport run_soliton_propagation(const ScenarioConfig& cfg);
RunReport run_blowup(const ScenarioConfig& cfg);
RunReport run_stability_window(const ScenarioConfig& cfg);
RunReport run_lower_bound(const ScenarioConfig& cfg);
RunReport run_modulation_ode_check(const ScenarioConfig& cfg);
RunReport run_spectrum(const ScenarioConfig& cfg);

struct SweepReport {
  std::vector<std::string> keys;
  std::vector<std::vector<json>> cells;  // values per cell, aligned with keys
  std::vector<RunReport> reports;
  std::string aggregate_csv;             // path
  bool all_thresholds_met() const;
};

/// Cell configurations of the cross product, in row-major order of the sweep keys.
std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& cfg);

/// Runs every cell on a pool of worker threads (NNLS_WORKERS, default 1).
SweepReport run_sweep(const ScenarioConfig& cfg);

/// Rebuilds the aggregate table from cell reports.
std::string aggregate_table(const std::vector<std::string>& keys, const std::vector<std::vector<json>>& cells,
                            const std::vector<RunReport>& reports);

int worker_count_from_env();

// Persistence helpers.

/// "# {"n":..,"length":..}" header then x,re,im rows.
void write_field_csv(const std::filesystem::path& path, const Field& f);
Field read_field_csv(const std::filesystem::path& path);

void write_eigenvalue_csv(const std::filesystem::path& path, const SpectrumReport& s, double zero_tolerance = 1e-3,
                          double edge_tolerance = 1e-3);

/// t, L2, Linf, H1, ReM, ImM, ReH, ImH, then theta .. eta_o when modulation
/// samples are present, then rhs columns when every sample carries them.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Shortest round-trip decimal form used in every CSV.
std::string format_number(double v);

}  // namespace nnls
