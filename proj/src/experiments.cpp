#include "nnls/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "nnls/invariants.hpp"
#include "nnls/modulation.hpp"
#include "nnls/modulation_rhs.hpp"
#include "nnls/solitons.hpp"

namespace nnls {

namespace {

namespace fs = std::filesystem;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::optional<double> metric_value(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (v.is_number()) return v.get<double>();
  return std::nullopt;
}

std::string hdr(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s + "\n";
}

void write_rows(const fs::path& path, const std::vector<std::string>& cols,
                const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << hdr(cols);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
    out << '\n';
  }
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// Portable uniform draw in [0, 1).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Field random_bumps(const Grid& grid, std::mt19937_64& rng) {
  Field f(grid);
  const auto x = grid.points();
  for (int k = 0; k < 4; ++k) {
    const cplx c(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
    const double x0 = 10.0 * unit(rng) - 5.0;
    const double w = 0.5 + 1.5 * unit(rng);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] += c * std::exp(-(x[j] - x0) * (x[j] - x0) / (w * w));
  }
  return f;
}

// Residual seeds of prescribed H1 size, satisfying the orthogonality conditions.
InitialSeeds residual_seeds(const Grid& grid, std::uint64_t seed, double eta_e, double eta_o) {
  std::mt19937_64 rng(seed);
  InitialSeeds s;
  if (eta_e > 0.0) {
    Field e = project_even_residual(random_bumps(grid, rng));
    s.eta_e = (eta_e / norm_hs(e, 1.0)) * e;
  }
  if (eta_o > 0.0) {
    Field o = project_odd_residual(random_bumps(grid, rng));
    s.eta_o = (eta_o / norm_hs(o, 1.0)) * o;
  }
  return s;
}

int record_stride(double interval, double dt) { return std::max(1, static_cast<int>(std::lround(interval / dt))); }

void evaluate_thresholds(const ScenarioConfig& cfg, RunReport& rep) {
  for (const auto& [name, bound] : cfg.thresholds) {
    ThresholdResult r;
    r.metric = name;
    r.bound = bound;
    auto it = rep.metrics.find(name);
    std::optional<double> v = it == rep.metrics.end() ? std::nullopt : metric_value(it->second);
    if (v && std::isfinite(*v)) {
      r.value = *v;
      r.met = (!bound.min || *v >= *bound.min) && (!bound.max || *v <= *bound.max);
    } else {
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.met = false;
    }
    rep.thresholds.push_back(r);
  }
}

RunReport start_report(const ScenarioConfig& cfg) {
  RunReport rep;
  rep.config = cfg.to_json();
  rep.config_hash = content_hash(rep.config);
  rep.scenario = to_string(cfg.scenario);
  return rep;
}

fs::path out_dir(const ScenarioConfig& cfg) {
  fs::path d(cfg.output_dir);
  fs::create_directories(d);
  return d;
}

}  // namespace

bool RunReport::thresholds_met() const {
  if (status != "ok") return false;
  return std::all_of(thresholds.begin(), thresholds.end(), [](const ThresholdResult& t) { return t.met; });
}

json RunReport::to_json() const {
  json th = json::array();
  for (const auto& t : thresholds) {
    json b = json::object();
    if (t.bound.min) b["min"] = *t.bound.min;
    if (t.bound.max) b["max"] = *t.bound.max;
    th.push_back({{"metric", t.metric}, {"value", number_or_null(t.value)}, {"bound", b}, {"met", t.met}});
  }
  json m = json::object();
  for (const auto& [k, v] : metrics) m[k] = v;
  return {{"config", config},       {"config_hash", config_hash}, {"scenario", scenario},
          {"status", status},       {"error", error},             {"metrics", m},
          {"artifacts", artifacts}, {"thresholds", th},           {"thresholds_met", thresholds_met()}};
}

RunReport run_soliton_propagation(const ScenarioConfig& cfg) {
  RunReport rep = start_report(cfg);
  const fs::path dir = out_dir(cfg);
  const Grid grid = cfg.grid.make();
  const double a = cfg.propagation.alpha;
  const double b = cfg.propagation.beta.value_or(a);
  const bool standing = a == b;
  if (!standing && blowup_time(a, b) && cfg.solver.t_end >= *blowup_time(a, b)) {
    throw ConfigError("solver.t_end must stay below the blow-up time of the closed form");
  }
  auto exact = [&](double t) { return standing ? standing_wave(a, t, grid) : two_param_soliton(a, b, t, grid); };

  std::vector<std::vector<double>> rows;
  double sup_h1 = 0.0, sup_linf = 0.0;
  auto hook = [&](double t, const Field& u) {
    const Field e = u - exact(t);
    const double h1 = norm_hs(e, 1.0), li = norm_lp(e, INFINITY);
    sup_h1 = std::max(sup_h1, h1);
    sup_linf = std::max(sup_linf, li);
    rows.push_back({t, h1, li});
  };
  const Trajectory traj = evolve(exact(0.0), cfg.solver, hook);

  const auto& inv0 = traj.diagnostics.front().invariants;
  double dm = 0.0, dh = 0.0;
  for (const auto& d : traj.diagnostics) {
    dm = std::max(dm, std::abs(d.invariants.quasipower - inv0.quasipower));
    dh = std::max(dh, std::abs(d.invariants.hamiltonian - inv0.hamiltonian));
  }
  write_trajectory_csv(dir / "trajectory.csv", traj);
  write_rows(dir / "error.csv", {"t", "H1_error", "Linf_error"}, rows);
  rep.artifacts = {"trajectory.csv", "error.csv"};
  rep.metrics["sup_h1_error"] = sup_h1;
  rep.metrics["sup_linf_error"] = sup_linf;
  rep.metrics["quasipower_drift"] = dm;
  rep.metrics["hamiltonian_drift"] = dh;
  rep.metrics["quasipower_initial"] = inv0.quasipower.real();
  rep.metrics["hamiltonian_initial"] = inv0.hamiltonian.real();
  rep.metrics["termination"] = to_string(traj.termination);
  rep.metrics["final_time"] = traj.final_time;
  return rep;
}

RunReport run_blowup(const ScenarioConfig& cfg) {
  RunReport rep = start_report(cfg);
  const fs::path dir = out_dir(cfg);
  const Grid grid = cfg.grid.make();
  const auto& p = cfg.blowup;
  const std::optional<double> T = blowup_time(p.alpha, p.beta);

  SolverConfig solver = cfg.solver;
  if (T) solver.t_end = p.t_end_factor * *T;
  const double track_until = T ? p.tracking_fraction * *T : solver.t_end;

  std::vector<std::vector<double>> rows;
  double tracking_error = 0.0;
  auto hook = [&](double t, const Field& u) {
    if (t > track_until) return;
    const double e = norm_lp(u - two_param_soliton(p.alpha, p.beta, t, grid), INFINITY);
    tracking_error = std::max(tracking_error, e);
    rows.push_back({t, e});
  };
  const Trajectory traj = evolve(two_param_soliton(p.alpha, p.beta, 0.0, grid), solver, hook);

  write_trajectory_csv(dir / "trajectory.csv", traj);
  write_rows(dir / "tracking.csv", {"t", "Linf_error"}, rows);
  rep.artifacts = {"trajectory.csv", "tracking.csv"};

  double max_linf = 0.0, max_h1 = 0.0;
  for (const auto& d : traj.diagnostics) max_linf = std::max(max_linf, d.linf), max_h1 = std::max(max_h1, d.h1);
  rep.metrics["termination"] = to_string(traj.termination);
  rep.metrics["final_time"] = traj.final_time;
  rep.metrics["max_linf"] = max_linf;
  rep.metrics["max_h1"] = max_h1;
  rep.metrics["tracking_error"] = tracking_error;
  rep.metrics["tracking_until"] = track_until;
  rep.metrics["tracking_ok"] = tracking_error < 1e-4;
  rep.metrics["blowup_detected"] = traj.blowup.has_value();
  if (!T) {
    rep.metrics["blowup_time_formula"] = nullptr;
    rep.metrics["no_blowup_expected"] = true;
    rep.metrics["bounded"] = !traj.blowup && traj.termination == Termination::completed;
    return rep;
  }
  rep.metrics["blowup_time_formula"] = *T;
  if (traj.blowup) {
    rep.metrics["detected_blowup_time"] = traj.blowup->time;
    rep.metrics["detection_criterion"] = to_string(traj.blowup->criterion);
    rep.metrics["relative_error"] = std::abs(traj.blowup->time - *T) / *T;
  } else {
    rep.metrics["detected_blowup_time"] = nullptr;
    rep.metrics["relative_error"] = nullptr;
  }
  return rep;
}

namespace {

struct DirectionResult {
  std::optional<double> crossing;  // |t| of the first crossing
  double sup_xi = 0.0;
  double sup_lambda = 0.0;
  double max_distance = 0.0;
  std::optional<double> fit_failure;
  std::vector<std::vector<double>> rows;  // t, d, lambda, xi
};

DirectionResult run_direction(const Field& u0, const SolverConfig& solver, double threshold, bool backward) {
  DirectionResult r;
  ModulationTracker tracker;
  auto observe = [&](double t, const Field& v) {
    const Field u = backward ? reflect_conjugate(v) : v;
    const double tt = backward ? -t : t;
    const double d = distance_to_q(u).distance;
    r.max_distance = std::max(r.max_distance, d);
    const std::size_t before = tracker.samples().size();
    tracker(tt, u);
    double lam = std::numeric_limits<double>::quiet_NaN(), xi = lam;
    if (tracker.samples().size() > before) {
      const ModulationSample& s = tracker.samples().back();
      lam = std::abs(s.a_e) + std::abs(s.b_e) + std::abs(s.a_o) + std::abs(s.b_o) + s.eta_e_h1 + s.eta_o_h1 +
            std::abs(s.alpha - 1.0);
      if (s.has_rhs) xi = std::abs(1.0 + s.theta_dot) + std::abs(s.alpha_dot);
    }
    r.rows.push_back({tt, d, lam, xi});
    if (threshold > 0.0 && d > threshold && !r.crossing) r.crossing = t;
  };
  auto stop = [&](double, const Field&) { return r.crossing.has_value(); };
  evolve(u0, solver, observe, stop);
  r.sup_xi = tracker.max_xi();
  r.sup_lambda = tracker.max_lambda();
  r.fit_failure = tracker.failure_time();
  if (r.fit_failure && backward) r.fit_failure = -*r.fit_failure;
  return r;
}

}  // namespace

RunReport run_stability_window(const ScenarioConfig& cfg) {
  RunReport rep = start_report(cfg);
  const fs::path dir = out_dir(cfg);
  const Grid grid = cfg.grid.make();
  const auto& p = cfg.stability;
  SolverConfig solver = cfg.solver;
  solver.t_end = p.t_max;

  json table = json::array();
  std::vector<std::vector<double>> window_rows;
  std::vector<double> log_inv_eps, t_stars, log_eps, log_xi;
  double c_fit = 0.0;
  double zero_eps_max_distance = std::numeric_limits<double>::quiet_NaN();
  bool any_censored = false;

  for (std::size_t i = 0; i < p.epsilons.size(); ++i) {
    const double eps = p.epsilons[i];
    const InitialCoefficients coeffs{p.a_e * eps, p.b_e * eps, p.a_o * eps, p.b_o * eps * eps};
    const InitialSeeds seeds = residual_seeds(grid, cfg.seed + i, p.eta_e * eps * eps, p.eta_o * eps * eps);
    const InitialData data = build_initial_data(grid, eps, coeffs, seeds, p.tier_constant);
    const double threshold = p.crossing_constant * eps;

    DirectionResult fwd = run_direction(data.u0, solver, threshold, false);
    std::optional<DirectionResult> bwd;
    bool mirrored = false;
    if (p.backward) {
      const Field u0_pt = reflect_conjugate(data.u0);
      mirrored = std::equal(u0_pt.values().begin(), u0_pt.values().end(), data.u0.values().begin());
      if (mirrored) {
        // PT-invariant data: u(-t) is the PT image of u(t), so the backward branch is the forward one mirrored.
        bwd = fwd;
        for (auto& row : bwd->rows) row[0] = -row[0];
        if (bwd->fit_failure) bwd->fit_failure = -*bwd->fit_failure;
      } else {
        bwd = run_direction(u0_pt, solver, threshold, true);
      }
    }

    std::optional<double> t_star = fwd.crossing;
    if (bwd && bwd->crossing) t_star = t_star ? std::min(*t_star, *bwd->crossing) : bwd->crossing;
    const bool censored = !t_star;
    const double t_star_value = t_star.value_or(p.t_max);
    const double sup_xi = std::max(fwd.sup_xi, bwd ? bwd->sup_xi : 0.0);
    const double sup_lambda = std::max(fwd.sup_lambda, bwd ? bwd->sup_lambda : 0.0);
    const double max_d = std::max(fwd.max_distance, bwd ? bwd->max_distance : 0.0);
    std::optional<double> failure = fwd.fit_failure;
    if (bwd && bwd->fit_failure && (!failure || std::abs(*bwd->fit_failure) < std::abs(*failure))) {
      failure = bwd->fit_failure;
    }

    std::vector<std::vector<double>> series;
    if (bwd) {
      for (auto it = bwd->rows.rbegin(); it != bwd->rows.rend(); ++it) {
        if ((*it)[0] != 0.0) series.push_back(*it);
      }
    }
    series.insert(series.end(), fwd.rows.begin(), fwd.rows.end());
    const std::string name = "series_eps_" + std::to_string(i) + ".csv";
    write_rows(dir / name, {"t", "distance", "lambda", "xi"}, series);
    rep.artifacts.push_back(name);

    json row = {{"epsilon", eps},
                {"t_star", t_star_value},
                {"censored", censored},
                {"sup_xi", sup_xi},
                {"sup_lambda", sup_lambda},
                {"max_distance", max_d},
                {"initial_distance_h1", data.distance_h1},
                {"backward_mirrors_forward", mirrored},
                {"fit_failure_time", failure ? json(*failure) : json(nullptr)}};
    table.push_back(row);
    window_rows.push_back({eps, t_star_value, censored ? 1.0 : 0.0, sup_xi, sup_lambda, max_d});

    if (eps > 0.0) {
      any_censored = any_censored || censored;
      log_inv_eps.push_back(std::log(1.0 / eps));
      t_stars.push_back(t_star_value);
      c_fit = std::max(c_fit, sup_xi / (eps * eps));
      if (sup_xi > 0.0) {
        log_eps.push_back(std::log(eps));
        log_xi.push_back(std::log(sup_xi));
      }
    } else {
      zero_eps_max_distance = max_d;
    }
  }
  write_rows(dir / "window.csv", {"epsilon", "t_star", "censored", "sup_xi", "sup_lambda", "max_distance"},
             window_rows);
  rep.artifacts.push_back("window.csv");

  // Monotone in log(1/eps): sort by eps decreasing and require nondecreasing T*.
  std::vector<std::size_t> order(t_stars.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return log_inv_eps[a] < log_inv_eps[b]; });
  bool monotone = true;
  for (std::size_t k = 1; k < order.size(); ++k) monotone = monotone && t_stars[order[k]] >= t_stars[order[k - 1]];

  rep.metrics["window_table"] = table;
  rep.metrics["t_star_monotone"] = monotone;
  rep.metrics["t_star_slope_vs_log_inv_eps"] = number_or_null(fit_slope(log_inv_eps, t_stars));
  rep.metrics["xi_constant"] = c_fit;
  rep.metrics["xi_exponent"] = number_or_null(fit_slope(log_eps, log_xi));
  rep.metrics["any_censored"] = any_censored;
  rep.metrics["zero_eps_max_distance"] = number_or_null(zero_eps_max_distance);
  return rep;
}

RunReport run_lower_bound(const ScenarioConfig& cfg) {
  RunReport rep = start_report(cfg);
  const fs::path dir = out_dir(cfg);
  const auto& p = cfg.lower_bound;
  const Grid grid(p.quadrature_n, p.quadrature_length);
  const double gap = std::abs(p.alpha - p.beta);
  const double t_end = gap > 0.0 ? std::min(p.t_max, 0.1 / gap) : p.t_max;

  std::vector<std::vector<double>> rows;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, dmax = 0.0, diff0 = 0.0;
  for (int i = 0; i < p.samples; ++i) {
    const double t = t_end * i / (p.samples - 1);
    const double diff = norm_lp(standing_wave(p.alpha, t, grid) - two_param_soliton(p.alpha, p.beta, t, grid), 2.0);
    dmax = std::max(dmax, diff);
    if (i == 0) diff0 = diff;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    if (gap > 0.0) {
      ratio = diff / (gap * (1.0 + t));
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    rows.push_back({t, diff, ratio});
  }
  write_rows(dir / "lower_bound.csv", {"t", "L2_difference", "ratio"}, rows);
  rep.artifacts.push_back("lower_bound.csv");
  rep.metrics["window_end"] = t_end;
  rep.metrics["max_difference"] = dmax;
  rep.metrics["difference_at_zero"] = diff0;

  if (const auto T = blowup_time(p.alpha, p.beta)) {
    rep.metrics["ratio_min"] = rmin;
    rep.metrics["ratio_max"] = rmax;
    rep.metrics["difference_at_zero_over_gap"] = diff0 / gap;
    const double t_div = p.divergence_fraction * *T;
    const double n0 = norm_lp(two_param_soliton(p.alpha, p.beta, 0.0, grid), 2.0);
    const double n1 = norm_lp(two_param_soliton(p.alpha, p.beta, t_div, grid), 2.0);
    rep.metrics["divergence_time"] = t_div;
    rep.metrics["l2_norm_initial"] = n0;
    rep.metrics["l2_norm_at_divergence_time"] = n1;
    rep.metrics["divergence_factor"] = n1 / n0;
  } else {
    rep.metrics["ratio_min"] = nullptr;
    rep.metrics["ratio_max"] = nullptr;
  }
  return rep;
}

namespace {

struct FixtureRun {
  Trajectory traj;
  std::vector<ModulationSample> samples;
  ConsistencyReport consistency;
  double max_constraint = 0.0;
  std::optional<double> failure;
};

FixtureRun run_fixture(const Field& u0, const SolverConfig& solver) {
  FixtureRun r;
  ModulationTracker tracker;
  r.traj = evolve(u0, solver, tracker.hook());
  r.samples = tracker.samples();
  r.traj.modulation = r.samples;
  r.consistency = consistency_check(r.samples);
  r.max_constraint = tracker.max_constraint_residual();
  r.failure = tracker.failure_time();
  return r;
}

double value_at(const std::vector<ModulationSample>& s, double t, double ModulationSample::*field) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].time <= t && t <= s[i + 1].time) {
      const double w = (t - s[i].time) / (s[i + 1].time - s[i].time);
      return (1.0 - w) * s[i].*field + w * s[i + 1].*field;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

RunReport run_modulation_ode_check(const ScenarioConfig& cfg) {
  RunReport rep = start_report(cfg);
  const fs::path dir = out_dir(cfg);
  const Grid grid = cfg.grid.make();
  const auto& p = cfg.modulation_ode;
  SolverConfig solver = cfg.solver;
  solver.t_end = p.t_end;
  solver.record_every = record_stride(p.record_interval, solver.dt);
  if (p.b_o_time > p.t_end) throw ConfigError("params.b_o_time must not exceed params.t_end");

  json table = json::array();
  auto record_fixture = [&](const std::string& name, const FixtureRun& r, double bound_floor) {
    bool within = true;
    for (const auto& q : r.consistency.quantities) {
      const double bound = std::max(bound_floor, 0.05 * q.max_abs_value);
      within = within && q.max_abs_discrepancy <= bound;
      table.push_back({{"fixture", name},
                       {"quantity", q.name},
                       {"max_abs_discrepancy", q.max_abs_discrepancy},
                       {"max_abs_rate", q.max_abs_value},
                       {"bound", bound}});
    }
    rep.metrics[name + "_max_discrepancy"] = r.consistency.max_discrepancy();
    rep.metrics[name + "_within_bounds"] = within;
    rep.metrics[name + "_max_constraint_residual"] = r.max_constraint;
    rep.metrics[name + "_fit_failure_time"] = r.failure ? json(*r.failure) : json(nullptr);
    const std::string file = "modulation_" + name + ".csv";
    write_trajectory_csv(dir / file, r.traj);
    rep.artifacts.push_back(file);
  };

  {
    const FixtureRun r = run_fixture(ground_state(1.0, grid), solver);
    double theta_dot_err = 0.0, theta_fd_err = 0.0;
    for (const auto& s : r.samples) {
      if (s.has_rhs) theta_dot_err = std::max(theta_dot_err, std::abs(s.theta_dot + 1.0));
    }
    theta_fd_err = r.consistency.at("theta").max_abs_discrepancy;
    for (std::size_t i = 1; i + 1 < r.samples.size(); ++i) {
      const double fd = (r.samples[i + 1].theta - r.samples[i - 1].theta) /
                        (r.samples[i + 1].time - r.samples[i - 1].time);
      theta_fd_err = std::max(theta_fd_err, std::abs(fd + 1.0));
    }
    rep.metrics["zero_theta_dot_error"] = theta_dot_err;
    rep.metrics["zero_theta_fd_error"] = theta_fd_err;
    record_fixture("zero", r, 1e-6);
  }
  {
    const double delta = p.delta;
    const InitialData d = build_initial_data(grid, std::sqrt(delta), {0.0, 0.0, 0.0, delta});
    const FixtureRun r = run_fixture(d.u0, solver);
    const double a_o = value_at(r.samples, p.b_o_time, &ModulationSample::a_o);
    const double expected = -2.0 * delta * p.b_o_time;
    std::vector<double> ts, as;
    for (const auto& s : r.samples) {
      if (s.time <= p.b_o_time + 1e-12) ts.push_back(s.time), as.push_back(s.a_o);
    }
    rep.metrics["b_o_a_o_at_time"] = number_or_null(a_o);
    rep.metrics["b_o_a_o_expected"] = expected;
    rep.metrics["b_o_relative_error"] = number_or_null(std::abs(a_o - expected) / std::abs(expected));
    rep.metrics["b_o_a_o_slope"] = number_or_null(fit_slope(ts, as));
    rep.metrics["b_o_slope_expected"] = -2.0 * delta;
    record_fixture("b_o_only", r, 1e-5);
  }
  {
    const double delta = p.delta;
    const InitialData d = build_initial_data(grid, delta, {0.0, 0.0, delta, 0.0});
    const FixtureRun r = run_fixture(d.u0, solver);
    double drift = 0.0;
    for (const auto& s : r.samples) drift = std::max(drift, std::abs(s.a_o - r.samples.front().a_o));
    rep.metrics["a_o_only_a_o_drift"] = drift;
    record_fixture("a_o_only", r, 1e-5);
  }
  {
    const double eps = p.epsilon;
    const double e2 = eps * eps;
    const InitialSeeds seeds = residual_seeds(grid, cfg.seed, 0.3 * e2, 0.3 * e2);
    const InitialData d = build_initial_data(grid, eps, {0.3 * eps, 0.3 * eps, 0.3 * eps, 0.3 * e2}, seeds);
    const FixtureRun r = run_fixture(d.u0, solver);
    double eta = 0.0;
    for (const auto& s : r.samples) eta = std::max(eta, (s.eta_e_h1 + s.eta_o_h1) / (e2 * (1.0 + s.time)));
    rep.metrics["generic_eta_growth_constant"] = eta;
    record_fixture("generic", r, 1e-5);
  }
  rep.metrics["discrepancy_table"] = table;
  return rep;
}

RunReport run_spectrum(const ScenarioConfig& cfg) {
  RunReport rep = start_report(cfg);
  const fs::path dir = out_dir(cfg);
  const Grid grid = cfg.grid.make();
  const auto& p = cfg.spectrum;

  std::vector<std::vector<double>> rows;
  json identities = json::object();
  auto add = [&](const std::string& prefix, const ResidualReport& r) {
    for (const auto& e : r.entries) {
      identities[prefix + e.name] = {{"value", e.value}, {"informational", e.informational}};
      rep.metrics[prefix + e.name] = e.value;
    }
    rep.metrics[prefix + "max_checked"] = r.max_checked();
  };
  add("identity.", identity_suite(grid, cfg.seed));
  add("root_space.", root_space_check(grid));
  {
    std::ofstream out(dir / "identities.json");
    out << identities.dump(2) << '\n';
  }
  rep.artifacts.push_back("identities.json");

  const Grid sgrid(p.n, p.length);
  for (const auto& name : p.operators) {
    const OperatorKind kind = operator_kind_from_string(name);
    const SpectrumReport s = discrete_spectrum(kind, p.n_eigs, sgrid);
    const std::string file = "eigenvalues_" + name + ".csv";
    write_eigenvalue_csv(dir / file, s);
    rep.artifacts.push_back(file);
    rep.metrics[name + ".gap_count"] = s.gap_count;
    rep.metrics[name + ".zero_cluster"] = s.zero_cluster;
    rep.metrics[name + ".max_gap_magnitude"] = s.max_gap_magnitude;
    rep.metrics[name + ".smallest_modulus"] = s.eigenvalues.empty() ? 0.0 : std::abs(s.eigenvalues.front());
    if (kind == OperatorKind::L_minus || kind == OperatorKind::L_plus) {
      rep.metrics[name + ".lowest_overlap_with_q"] = s.lowest_overlap_with_q;
    }
  }
  return rep;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  try {
    switch (cfg.scenario) {
      case Scenario::soliton_propagation: rep = run_soliton_propagation(cfg); break;
      case Scenario::blowup: rep = run_blowup(cfg); break;
      case Scenario::stability_window: rep = run_stability_window(cfg); break;
      case Scenario::lower_bound: rep = run_lower_bound(cfg); break;
      case Scenario::modulation_ode_check: rep = run_modulation_ode_check(cfg); break;
      case Scenario::spectrum: rep = run_spectrum(cfg); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rep = start_report(cfg);
    rep.status = "failed";
    rep.error = e.what();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  evaluate_thresholds(cfg, rep);

  const fs::path dir = out_dir(cfg);
  {
    std::ofstream out(dir / "report.json");
    out << rep.to_json().dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "timing.json");
    out << json{{"wall_seconds", rep.wall_seconds}}.dump(2) << '\n';
  }
  return rep;
}

}  // namespace nnls
