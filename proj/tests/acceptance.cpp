// Acceptance checks at desk scale. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "nnls/experiments.hpp"
#include "nnls/invariants.hpp"
#include "nnls/linops.hpp"
#include "nnls/modulation.hpp"
#include "nnls/modulation_rhs.hpp"
#include "nnls/solitons.hpp"

using namespace nnls;
namespace fs = std::filesystem;

namespace {

const cplx I(0.0, 1.0);
int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " | " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double sup(const Field& f) { return norm_lp(f, INFINITY); }

SolverConfig solver(double dt, double t_end, Scheme s = Scheme::if_rk4) {
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.scheme = s;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nnls_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

ScenarioConfig shipped(const std::string& name, const fs::path& out) {
  ScenarioConfig c = load_config(fs::path(NNLS_SOURCE_DIR) / "configs" / name);
  c.output_dir = out.string();
  return c;
}

Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  const auto x = g.points();
  for (int k = 0; k < 5; ++k) {
    const cplx c(u(rng), u(rng));
    const double x0 = 5.0 * u(rng), w = 1.0 + 0.5 * u(rng);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] += c * std::exp(-(x[j] - x0) * (x[j] - x0) / (w * w));
  }
  return f;
}

void soliton_oracle(const Grid& g) {
  const Field q = ground_state(1.0, g);
  double err = 0.0;
  evolve(q, solver(1e-3, 5.0), [&](double t, const Field& u) {
    err = std::max(err, norm_hs(u - standing_wave(1.0, t, g), 1.0));
  });
  // global error of the second-order split step at t = 5
  auto global = [&](double dt) {
    const Trajectory tr = evolve(q, solver(dt, 5.0, Scheme::strang_rk4));
    return sup(*tr.final_state - standing_wave(1.0, tr.final_time, g));
  };
  const double ratio = global(2e-3) / global(1e-3);
  report(1, err < 1e-6 && ratio >= 3.0 && ratio <= 6.0, "standing-wave oracle and convergence order",
         "sup H1 error " + fmt(err) + ", Strang error ratio dt 2e-3/1e-3 = " + fmt(ratio));
}

void two_parameter_oracle(const Grid& g) {
  const double T = *blowup_time(1.0, 0.9);
  double early = 0.0, late = 0.0;
  evolve(two_param_soliton(1.0, 0.9, 0.0, g), solver(1e-3, 0.8 * T), [&](double t, const Field& u) {
    const double e = sup(u - two_param_soliton(1.0, 0.9, t, g));
    if (t <= 1.0) early = std::max(early, e);
    late = std::max(late, e);
  });
  report(2, early < 1e-5 && late < 1e-3, "two-parameter soliton oracle",
         "sup error on [0,1] " + fmt(early) + ", up to 0.8 T " + fmt(late));
}

void blowup_times(const Grid& g) {
  std::string detail;
  bool ok = true;
  for (double beta : {0.9, 0.99}) {
    const double T = *blowup_time(1.0, beta);
    const Trajectory tr = evolve(two_param_soliton(1.0, beta, 0.0, g), solver(1e-3, 1.2 * T));
    double max_linf = 0.0;
    for (const auto& d : tr.diagnostics) max_linf = std::max(max_linf, d.linf);
    detail += "beta " + fmt(beta) + ": T " + fmt(T) + ", ";
    if (tr.blowup) {
      const double rel = std::abs(tr.blowup->time - T) / T;
      ok = ok && rel <= 0.02;
      detail += "detected at " + fmt(tr.blowup->time) + " (rel. error " + fmt(rel) + ", " +
                to_string(tr.blowup->criterion) + "); ";
    } else {
      ok = false;
      detail += "not detected by " + fmt(tr.final_time) + ", max Linf " + fmt(max_linf) + "; ";
    }
  }
  report(3, ok, "blow-up detection near the closed-form time", detail);
}

void conservation(const Grid& g) {
  std::mt19937_64 rng(11);
  const Field bump = random_field(g, rng);
  const std::vector<Field> data = {ground_state(1.0, g), two_param_soliton(1.0, 0.9, 0.0, g),
                                   ground_state(1.0, g) + (0.05 / norm_hs(bump, 1.0)) * bump};
  double dm = 0.0, dh = 0.0;
  for (const Field& u0 : data) {
    const InvariantReport i0 = invariants(u0, 0.0);
    evolve(u0, solver(1e-3, 5.0), [&](double t, const Field& u) {
      const InvariantReport it = invariants(u, t);
      dm = std::max(dm, std::abs(it.quasipower - i0.quasipower));
      dh = std::max(dh, std::abs(it.hamiltonian - i0.hamiltonian));
    });
  }
  const Field q = ground_state(1.0, g);
  const cplx m = quasipower(q), h = hamiltonian(q);
  const bool ok = dm < 1e-6 && dh < 1e-6 && std::abs(m - 2.0) < 1e-7 && std::abs(h + 2.0) < 1e-7;
  report(4, ok, "conservation and ground-state values",
         "drift M " + fmt(dm) + ", H " + fmt(dh) + "; M(Q) " + fmt(m.real()) + ", H(Q) " + fmt(h.real()) +
             " (target -2)");
}

void operator_identities(const Grid& g) {
  const ResidualReport id = identity_suite(g, 1, 20);
  const ResidualReport rs = root_space_check(g);
  const double kernels = std::max({id.at("L_minus_Q"), id.at("L_plus_dxQ"), id.at("L_plus_Qprime_plus_2Q"),
                                   id.at("L_minus_xQ_plus_2dxQ")});
  const double conj = std::max(id.at("conjugation_He"), id.at("conjugation_Ho"));
  double images = 0.0, second = 0.0;
  for (const auto& e : rs.entries) {
    if (e.informational) continue;
    if (e.name.find("generalized") != std::string::npos) {
      second = std::max(second, e.value);
    } else {
      images = std::max(images, e.value);
    }
  }
  const SpectrumReport s = discrete_spectrum(OperatorKind::H_e, 16, Grid(512, 30.0));
  const bool ok = kernels < 1e-7 && conj < 1e-10 && images < 1e-7 && second < 1e-6 && s.gap_count == 0;
  report(5, ok, "linearized operator identities and spectrum",
         "identities " + fmt(kernels) + ", conjugation " + fmt(conj) + ", kernel images " + fmt(images) +
             ", second applications " + fmt(second) + ", H_e gap eigenvalues " + std::to_string(s.gap_count) +
             " (zero cluster " + std::to_string(s.zero_cluster) + ")");
}

void modulation_round_trip(const Grid& g) {
  const ModulationFit f = fit_modulation(std::polar(1.0, 0.3) * ground_state(1.05, g));
  const double fit_err = std::max(std::abs(f.theta - 0.3), std::abs(f.alpha - 1.05));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double round = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double eps = 1e-2;
    ModulationCoords c{0.5 * d(rng), 1.0 + 0.02 * d(rng), eps * d(rng) / 3, eps * d(rng) / 3, eps * d(rng) / 3,
                       eps * eps * d(rng) / 3, Field(g), Field(g), Field(g)};
    const Field e = project_even_residual(random_field(g, rng));
    const Field o = project_odd_residual(random_field(g, rng));
    c.eta_e = (eps * eps / 3 / norm_hs(e, 1.0)) * e;
    c.eta_o = (eps * eps / 3 / norm_hs(o, 1.0)) * o;
    c.v = reconstruct_perturbation(c);
    const Field u = reconstruct(c);
    const ModulationCoords back = decompose(u, c.theta, c.alpha);
    round = std::max({round, sup(reconstruct(back) - u), std::abs(back.a_e - c.a_e), std::abs(back.b_e - c.b_e),
                      std::abs(back.a_o - c.a_o), std::abs(back.b_o - c.b_o), sup(back.eta_e - c.eta_e),
                      sup(back.eta_o - c.eta_o)});
  }

  const double eps = 1e-2;
  const Field r = random_field(g, rng);
  InitialSeeds seeds{project_even_residual(r), project_odd_residual(r)};
  *seeds.eta_e = (0.3 * eps * eps / norm_hs(*seeds.eta_e, 1.0)) * *seeds.eta_e;
  *seeds.eta_o = (0.3 * eps * eps / norm_hs(*seeds.eta_o, 1.0)) * *seeds.eta_o;
  const InitialData data = build_initial_data(g, eps, {0.3 * eps, 0.3 * eps, 0.3 * eps, 0.3 * eps * eps}, seeds);
  TrackerOptions opt;
  opt.evaluate_rhs = false;
  ModulationTracker tracker({}, opt);
  SolverConfig c = solver(1e-3, 2.0);
  c.record_every = 10;
  evolve(data.u0, c, tracker.hook());
  const double constraint = tracker.max_constraint_residual();
  const bool ok = fit_err < 1e-10 && round < 1e-10 && constraint < 1e-9 && !tracker.failure_time();
  report(6, ok, "modulation fit, decomposition round trip, constraints",
         "fit error " + fmt(fit_err) + ", round trip " + fmt(round) + ", constraint residual " + fmt(constraint));
}

void modulation_ode(const Grid& g) {
  SolverConfig c = solver(1e-3, 0.5);
  c.record_every = 10;
  ModulationTracker tracker;
  evolve(ground_state(1.0, g), c, tracker.hook());
  double solve_err = 0.0;
  for (const auto& s : tracker.samples()) solve_err = std::max(solve_err, std::abs(s.theta_dot + 1.0));
  const ConsistencyReport cr = consistency_check(tracker.samples());
  // finite differences of theta against the exact rate -1
  double fd_err = 0.0;
  const auto& s = tracker.samples();
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    fd_err = std::max(fd_err, std::abs((s[i + 1].theta - s[i - 1].theta) / (s[i + 1].time - s[i - 1].time) + 1.0));
  }

  const double delta = 1e-3;
  const InitialData d = build_initial_data(g, std::sqrt(delta), {0.0, 0.0, 0.0, delta});
  TrackerOptions opt;
  opt.evaluate_rhs = false;
  ModulationTracker bo({}, opt);
  evolve(d.u0, c, bo.hook());
  const double a_o = bo.samples().back().a_o;
  const double expected = -2.0 * delta * 0.5;
  const double rel = std::abs(a_o - expected) / std::abs(expected);
  const bool ok = solve_err < 1e-6 && fd_err < 1e-6 && cr.at("theta").max_abs_discrepancy < 1e-6 && rel < 0.15;
  report(7, ok, "modulation equations on the standing wave and the b_o fixture",
         "theta_dot error (solve) " + fmt(solve_err) + ", (finite differences) " + fmt(fd_err) + "; a_o(0.5) " +
             fmt(a_o) + " vs " + fmt(expected) + " (rel. " + fmt(rel) + ")");
}

void stability_window() {
  const fs::path out = scratch("stability");
  const RunReport r = run_scenario(shipped("stability_window.json", out));
  const auto& m = r.metrics;
  std::string windows;
  for (const auto& row : m.at("window_table")) {
    windows += fmt(row["epsilon"].get<double>()) + ":" + fmt(row["t_star"].get<double>()) +
               (row["censored"].get<bool>() ? "+" : "") + " ";
  }
  const bool monotone = m.at("t_star_monotone").get<bool>();
  const double exponent = m.at("xi_exponent").is_number() ? m.at("xi_exponent").get<double>() : NAN;
  const bool ok = r.status == "ok" && monotone && std::abs(exponent - 2.0) <= 0.3;
  report(8, ok, "stability window and Xi scaling",
         "T* (eps:T*, + = censored at t_max) " + windows + "; monotone " + (monotone ? "yes" : "no") +
             ", Xi exponent " + fmt(exponent) + ", C " + fmt(m.at("xi_constant").get<double>()));
}

void lower_bound() {
  const RunReport r = run_scenario(shipped("lower_bound.json", scratch("lower_bound")));
  const auto& m = r.metrics;
  const double lo = m.at("ratio_min").get<double>(), hi = m.at("ratio_max").get<double>();
  const double div = m.at("divergence_factor").get<double>();
  const bool ok = r.status == "ok" && lo >= 0.1 && hi <= 10.0 && div >= 3.0;
  report(9, ok, "lower bound bracket and L2 divergence",
         "ratio in [" + fmt(lo) + ", " + fmt(hi) + "] on [0,10], L2 growth factor at 0.99 T " + fmt(div));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  bool ok = true;
  int compared = 0;
  for (const char* name : {"soliton_propagation.json", "modulation_ode_check.json"}) {
    const fs::path a = scratch(std::string("det_a_") + name), b = scratch(std::string("det_b_") + name);
    const RunReport ra = run_scenario(shipped(name, a));
    run_scenario(shipped(name, b));
    for (const auto& art : ra.artifacts) {
      if (fs::path(art).extension() != ".csv") continue;
      ok = ok && fs::exists(a / art) && slurp(a / art) == slurp(b / art);
      ++compared;
    }
  }
  report(10, ok && compared > 0, "byte-identical CSVs across repeated runs",
         std::to_string(compared) + " CSV files compared");
}

}  // namespace

int main() {
  const Grid g(1024, 40.0);
  soliton_oracle(g);
  two_parameter_oracle(g);
  blowup_times(g);
  conservation(g);
  operator_identities(g);
  modulation_round_trip(g);
  modulation_ode(g);
  stability_window();
  lower_bound();
  determinism();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
