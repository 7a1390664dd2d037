#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nnls/experiments.hpp"

namespace nnls {

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  T v{};
  read(obj, key, v, where);
  out = v;
}

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + " must be positive");
}

json solver_to_json(const SolverConfig& s) {
  return {{"dt", s.dt},
          {"t_end", s.t_end},
          {"scheme", to_string(s.scheme)},
          {"nonlocal", s.nonlocal},
          {"blowup_linf_threshold", s.blowup_linf_threshold},
          {"blowup_spectral_tail_threshold", s.blowup_spectral_tail_threshold},
          {"record_every", s.record_every},
          {"snapshot_every", s.snapshot_every},
          {"blowup_refinements", s.blowup_refinements}};
}

SolverConfig solver_from_json(const json& j) {
  const std::string where = "solver";
  check_keys(j, {"dt", "t_end", "scheme", "nonlocal", "blowup_linf_threshold", "blowup_spectral_tail_threshold",
                 "record_every", "snapshot_every", "blowup_refinements"},
             where);
  SolverConfig s;
  read(j, "dt", s.dt, where);
  read(j, "t_end", s.t_end, where);
  std::string scheme = to_string(s.scheme);
  read(j, "scheme", scheme, where);
  s.scheme = scheme_from_string(scheme);
  read(j, "nonlocal", s.nonlocal, where);
  read(j, "blowup_linf_threshold", s.blowup_linf_threshold, where);
  read(j, "blowup_spectral_tail_threshold", s.blowup_spectral_tail_threshold, where);
  read(j, "record_every", s.record_every, where);
  read(j, "snapshot_every", s.snapshot_every, where);
  read(j, "blowup_refinements", s.blowup_refinements, where);
  s.validate();
  return s;
}

json params_to_json(const ScenarioConfig& c) {
  switch (c.scenario) {
    case Scenario::soliton_propagation: {
      json j = {{"alpha", c.propagation.alpha}};
      j["beta"] = c.propagation.beta ? json(*c.propagation.beta) : json(nullptr);
      return j;
    }
    case Scenario::blowup:
      return {{"alpha", c.blowup.alpha},
              {"beta", c.blowup.beta},
              {"t_end_factor", c.blowup.t_end_factor},
              {"tracking_fraction", c.blowup.tracking_fraction}};
    case Scenario::stability_window: {
      const auto& p = c.stability;
      return {{"epsilons", p.epsilons},         {"a_e", p.a_e},
              {"b_e", p.b_e},                   {"a_o", p.a_o},
              {"b_o", p.b_o},                   {"eta_e", p.eta_e},
              {"eta_o", p.eta_o},               {"crossing_constant", p.crossing_constant},
              {"t_max", p.t_max},               {"tier_constant", p.tier_constant},
              {"backward", p.backward}};
    }
    case Scenario::lower_bound: {
      const auto& p = c.lower_bound;
      return {{"alpha", p.alpha},
              {"beta", p.beta},
              {"t_max", p.t_max},
              {"samples", p.samples},
              {"quadrature_n", p.quadrature_n},
              {"quadrature_length", p.quadrature_length},
              {"divergence_fraction", p.divergence_fraction}};
    }
    case Scenario::modulation_ode_check: {
      const auto& p = c.modulation_ode;
      return {{"delta", p.delta},
              {"epsilon", p.epsilon},
              {"b_o_time", p.b_o_time},
              {"t_end", p.t_end},
              {"record_interval", p.record_interval}};
    }
    case Scenario::spectrum: {
      const auto& p = c.spectrum;
      return {{"n", p.n}, {"length", p.length}, {"n_eigs", p.n_eigs}, {"operators", p.operators}};
    }
  }
  return json::object();
}

void params_from_json(const json& j, ScenarioConfig& c) {
  const std::string where = "params";
  switch (c.scenario) {
    case Scenario::soliton_propagation:
      check_keys(j, {"alpha", "beta"}, where);
      read(j, "alpha", c.propagation.alpha, where);
      read(j, "beta", c.propagation.beta, where);
      require_positive(c.propagation.alpha, "params.alpha");
      if (c.propagation.beta) require_positive(*c.propagation.beta, "params.beta");
      break;
    case Scenario::blowup:
      check_keys(j, {"alpha", "beta", "t_end_factor", "tracking_fraction"}, where);
      read(j, "alpha", c.blowup.alpha, where);
      read(j, "beta", c.blowup.beta, where);
      read(j, "t_end_factor", c.blowup.t_end_factor, where);
      read(j, "tracking_fraction", c.blowup.tracking_fraction, where);
      require_positive(c.blowup.alpha, "params.alpha");
      require_positive(c.blowup.beta, "params.beta");
      require_positive(c.blowup.t_end_factor, "params.t_end_factor");
      if (!(c.blowup.tracking_fraction > 0.0 && c.blowup.tracking_fraction < 1.0)) {
        throw ConfigError("params.tracking_fraction must lie in (0, 1)");
      }
      break;
    case Scenario::stability_window: {
      auto& p = c.stability;
      check_keys(j, {"epsilons", "a_e", "b_e", "a_o", "b_o", "eta_e", "eta_o", "crossing_constant", "t_max",
                     "tier_constant", "backward"},
                 where);
      read(j, "epsilons", p.epsilons, where);
      read(j, "a_e", p.a_e, where);
      read(j, "b_e", p.b_e, where);
      read(j, "a_o", p.a_o, where);
      read(j, "b_o", p.b_o, where);
      read(j, "eta_e", p.eta_e, where);
      read(j, "eta_o", p.eta_o, where);
      read(j, "crossing_constant", p.crossing_constant, where);
      read(j, "t_max", p.t_max, where);
      read(j, "tier_constant", p.tier_constant, where);
      read(j, "backward", p.backward, where);
      if (p.epsilons.empty()) throw ConfigError("params.epsilons must not be empty");
      for (double e : p.epsilons) {
        if (!(e >= 0.0 && e <= 0.05)) throw ConfigError("params.epsilons entries must lie in [0, 0.05]");
      }
      if (p.eta_e < 0.0 || p.eta_o < 0.0) throw ConfigError("params.eta_e and params.eta_o must be non-negative");
      require_positive(p.crossing_constant, "params.crossing_constant");
      require_positive(p.t_max, "params.t_max");
      require_positive(p.tier_constant, "params.tier_constant");
      break;
    }
    case Scenario::lower_bound: {
      auto& p = c.lower_bound;
      check_keys(j, {"alpha", "beta", "t_max", "samples", "quadrature_n", "quadrature_length", "divergence_fraction"},
                 where);
      read(j, "alpha", p.alpha, where);
      read(j, "beta", p.beta, where);
      read(j, "t_max", p.t_max, where);
      read(j, "samples", p.samples, where);
      read(j, "quadrature_n", p.quadrature_n, where);
      read(j, "quadrature_length", p.quadrature_length, where);
      read(j, "divergence_fraction", p.divergence_fraction, where);
      require_positive(p.alpha, "params.alpha");
      require_positive(p.beta, "params.beta");
      if (std::abs(p.alpha - p.beta) > 0.1) throw ConfigError("params: |alpha - beta| must be at most 0.1");
      require_positive(p.t_max, "params.t_max");
      if (p.samples < 2) throw ConfigError("params.samples must be at least 2");
      Grid(p.quadrature_n, p.quadrature_length);
      if (!(p.divergence_fraction > 0.0 && p.divergence_fraction < 1.0)) {
        throw ConfigError("params.divergence_fraction must lie in (0, 1)");
      }
      break;
    }
    case Scenario::modulation_ode_check: {
      auto& p = c.modulation_ode;
      check_keys(j, {"delta", "epsilon", "b_o_time", "t_end", "record_interval"}, where);
      read(j, "delta", p.delta, where);
      read(j, "epsilon", p.epsilon, where);
      read(j, "b_o_time", p.b_o_time, where);
      read(j, "t_end", p.t_end, where);
      read(j, "record_interval", p.record_interval, where);
      require_positive(p.delta, "params.delta");
      require_positive(p.epsilon, "params.epsilon");
      require_positive(p.b_o_time, "params.b_o_time");
      require_positive(p.t_end, "params.t_end");
      require_positive(p.record_interval, "params.record_interval");
      break;
    }
    case Scenario::spectrum: {
      auto& p = c.spectrum;
      check_keys(j, {"n", "length", "n_eigs", "operators"}, where);
      read(j, "n", p.n, where);
      read(j, "length", p.length, where);
      read(j, "n_eigs", p.n_eigs, where);
      read(j, "operators", p.operators, where);
      Grid(p.n, p.length);
      if (p.n > 2048) throw ConfigError("params.n must be at most 2048 for dense spectra");
      if (p.n_eigs < 1) throw ConfigError("params.n_eigs must be positive");
      for (const auto& op : p.operators) operator_kind_from_string(op);
      break;
    }
  }
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::soliton_propagation: return "soliton_propagation";
    case Scenario::blowup: return "blowup";
    case Scenario::stability_window: return "stability_window";
    case Scenario::lower_bound: return "lower_bound";
    case Scenario::modulation_ode_check: return "modulation_ode_check";
    case Scenario::spectrum: return "spectrum";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& s) {
  for (auto sc : {Scenario::soliton_propagation, Scenario::blowup, Scenario::stability_window, Scenario::lower_bound,
                  Scenario::modulation_ode_check, Scenario::spectrum}) {
    if (to_string(sc) == s) return sc;
  }
  throw ConfigError("unknown scenario '" + s + "'");
}

json ScenarioConfig::to_json() const {
  json th = json::object();
  for (const auto& [name, t] : thresholds) {
    json b = json::object();
    if (t.min) b["min"] = *t.min;
    if (t.max) b["max"] = *t.max;
    th[name] = b;
  }
  json sw = json::object();
  for (const auto& [k, v] : sweep) sw[k] = v;
  return {{"schema_version", schema_version},
          {"scenario", to_string(scenario)},
          {"grid", {{"n", grid.n}, {"length", grid.length}}},
          {"solver", solver_to_json(solver)},
          {"params", params_to_json(*this)},
          {"thresholds", th},
          {"sweep", sw},
          {"seed", seed},
          {"output_dir", output_dir}};
}

ScenarioConfig parse_config(const json& j) {
  check_keys(j, {"schema_version", "scenario", "grid", "solver", "params", "thresholds", "sweep", "seed", "output_dir"},
             "config");
  ScenarioConfig c;
  if (!j.contains("schema_version")) throw ConfigError("missing key 'schema_version'");
  read(j, "schema_version", c.schema_version, "config");
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
  }
  if (!j.contains("scenario")) throw ConfigError("missing key 'scenario'");
  std::string scenario;
  read(j, "scenario", scenario, "config");
  c.scenario = scenario_from_string(scenario);

  if (j.contains("grid")) {
    check_keys(j.at("grid"), {"n", "length"}, "grid");
    read(j.at("grid"), "n", c.grid.n, "grid");
    read(j.at("grid"), "length", c.grid.length, "grid");
  }
  c.grid.make();
  if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
  params_from_json(j.contains("params") ? j.at("params") : json::object(), c);

  if (j.contains("thresholds")) {
    const json& th = j.at("thresholds");
    if (!th.is_object()) throw ConfigError("thresholds must be an object");
    for (auto it = th.begin(); it != th.end(); ++it) {
      const std::string where = "thresholds." + it.key();
      check_keys(it.value(), {"min", "max"}, where);
      Threshold t;
      read(it.value(), "min", t.min, where);
      read(it.value(), "max", t.max, where);
      if (!t.min && !t.max) throw ConfigError(where + " needs min or max");
      c.thresholds[it.key()] = t;
    }
  }
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    if (!sw.is_object()) throw ConfigError("sweep must be an object");
    for (auto it = sw.begin(); it != sw.end(); ++it) {
      if (!it.value().is_array()) throw ConfigError("sweep." + it.key() + " must be a list");
      c.sweep[it.key()] = it.value().get<std::vector<json>>();
    }
  }
  read(j, "seed", c.seed, "config");
  read(j, "output_dir", c.output_dir, "config");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::string content_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << json{{"n", f.grid().size()}, {"length", f.grid().length()}}.dump() << "\n";
  out << "x,re,im\n";
  const auto x = f.grid().points();
  for (std::size_t j = 0; j < f.size(); ++j) {
    out << format_number(x[j]) << ',' << format_number(f[j].real()) << ',' << format_number(f[j].imag()) << '\n';
  }
}

Field read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("# ", 0) != 0) throw ConfigError("field file lacks the grid header");
  const json meta = json::parse(line.substr(2));
  const Grid grid(meta.at("n").get<int>(), meta.at("length").get<double>());
  std::getline(in, line);
  std::vector<cplx> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string x, re, im;
    std::getline(ss, x, ',');
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    values.emplace_back(std::stod(re), std::stod(im));
  }
  if (static_cast<int>(values.size()) != grid.size()) throw ConfigError("field file row count does not match n");
  return Field(grid, std::move(values));
}

void write_eigenvalue_csv(const std::filesystem::path& path, const SpectrumReport& s, double zero_tolerance,
                          double edge_tolerance) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "index,re,im,gap_flag\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    const double m = std::abs(s.eigenvalues[i]);
    const int gap = (m > zero_tolerance && m < 1.0 - edge_tolerance) ? 1 : 0;
    out << i << ',' << format_number(s.eigenvalues[i].real()) << ',' << format_number(s.eigenvalues[i].imag()) << ','
        << gap << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const bool mod = !traj.modulation.empty() && traj.modulation.size() == traj.times.size();
  bool rhs = mod;
  for (const auto& m : traj.modulation) rhs = rhs && m.has_rhs;
  out << "t,L2,Linf,H1,ReM,ImM,ReH,ImH";
  if (mod) out << ",theta,alpha,a_e,b_e,a_o,b_o,eta_e,eta_o";
  if (rhs) out << ",theta_dot,alpha_dot,a_e_dot,b_e_dot,a_o_dot,b_o_dot";
  out << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Diagnostics& d = traj.diagnostics[i];
    std::vector<double> row{d.time,
                            d.l2,
                            d.linf,
                            d.h1,
                            d.invariants.quasipower.real(),
                            d.invariants.quasipower.imag(),
                            d.invariants.hamiltonian.real(),
                            d.invariants.hamiltonian.imag()};
    if (mod) {
      const ModulationSample& m = traj.modulation[i];
      row.insert(row.end(), {m.theta, m.alpha, m.a_e, m.b_e, m.a_o, m.b_o, m.eta_e_h1, m.eta_o_h1});
      if (rhs) row.insert(row.end(), {m.theta_dot, m.alpha_dot, m.a_e_dot, m.b_e_dot, m.a_o_dot, m.b_o_dot});
    }
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

}  // namespace nnls
