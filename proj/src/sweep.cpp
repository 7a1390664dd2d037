#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "nnls/experiments.hpp"

namespace nnls {

namespace {

json::json_pointer pointer_for(const std::string& dotted) {
  std::string p;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    p += "/" + dotted.substr(start, dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(p);
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return "\"" + v.dump() + "\"";
}

}  // namespace

bool SweepReport::all_thresholds_met() const {
  return !reports.empty() &&
         std::all_of(reports.begin(), reports.end(), [](const RunReport& r) { return r.thresholds_met(); });
}

std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& cfg) {
  if (cfg.sweep.empty()) throw ConfigError("sweep needs at least one list-valued parameter");
  std::vector<std::string> keys;
  std::vector<std::size_t> sizes;
  for (const auto& [k, v] : cfg.sweep) {
    if (v.empty()) throw ConfigError("sweep." + k + " must not be empty");
    keys.push_back(k);
    sizes.push_back(v.size());
  }
  std::size_t total = 1;
  for (auto s : sizes) total *= s;

  json base = cfg.to_json();
  base["sweep"] = json::object();
  std::vector<ScenarioConfig> cells;
  for (std::size_t c = 0; c < total; ++c) {
    json j = base;
    std::size_t rem = c;
    for (std::size_t k = keys.size(); k-- > 0;) {
      const std::size_t idx = rem % sizes[k];
      rem /= sizes[k];
      const auto ptr = pointer_for(keys[k]);
      if (keys[k] == "output_dir" || keys[k].rfind("sweep", 0) == 0) {
        throw ConfigError("sweep key '" + keys[k] + "' is not sweepable");
      }
      j[ptr] = cfg.sweep.at(keys[k])[idx];
    }
    char name[32];
    std::snprintf(name, sizeof name, "cell_%03zu", c);
    j["output_dir"] = (std::filesystem::path(cfg.output_dir) / name).string();
    cells.push_back(parse_config(j));
  }
  return cells;
}

int worker_count_from_env() {
  const char* v = std::getenv("NNLS_WORKERS");
  if (!v || !*v) return 1;
  const int n = std::atoi(v);
  if (n < 1) throw ConfigError("NNLS_WORKERS must be a positive integer");
  return n;
}

std::string aggregate_table(const std::vector<std::string>& keys, const std::vector<std::vector<json>>& cells,
                            const std::vector<RunReport>& reports) {
  std::set<std::string> metric_names;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.metrics) {
      if (v.is_number() || v.is_boolean() || v.is_null() || v.is_string()) metric_names.insert(k);
    }
  }
  std::string out = "cell";
  for (const auto& k : keys) out += "," + k;
  out += ",status,thresholds_met";
  for (const auto& m : metric_names) out += "," + m;
  out += "\n";
  for (std::size_t c = 0; c < reports.size(); ++c) {
    out += std::to_string(c);
    for (const auto& v : cells[c]) out += "," + csv_cell(v);
    out += "," + reports[c].status + "," + (reports[c].thresholds_met() ? "1" : "0");
    for (const auto& m : metric_names) {
      auto it = reports[c].metrics.find(m);
      out += "," + (it == reports[c].metrics.end() ? std::string() : csv_cell(it->second));
    }
    out += "\n";
  }
  return out;
}

SweepReport run_sweep(const ScenarioConfig& cfg) {
  const std::vector<ScenarioConfig> configs = expand_sweep(cfg);
  SweepReport sweep;
  for (const auto& [k, v] : cfg.sweep) sweep.keys.push_back(k);
  std::vector<std::size_t> sizes;
  for (const auto& k : sweep.keys) sizes.push_back(cfg.sweep.at(k).size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<json> values(sweep.keys.size());
    std::size_t rem = c;
    for (std::size_t k = sweep.keys.size(); k-- > 0;) {
      values[k] = cfg.sweep.at(sweep.keys[k])[rem % sizes[k]];
      rem /= sizes[k];
    }
    sweep.cells.push_back(std::move(values));
  }

  sweep.reports.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < configs.size();) {
      try {
        sweep.reports[c] = run_scenario(configs[c]);
      } catch (const std::exception& e) {
        RunReport r;
        r.config = configs[c].to_json();
        r.config_hash = content_hash(r.config);
        r.scenario = to_string(configs[c].scenario);
        r.status = "failed";
        r.error = e.what();
        sweep.reports[c] = std::move(r);
      }
    }
  };
  const int n_workers = std::min<int>(worker_count_from_env(), static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  sweep.aggregate_csv = (dir / "aggregate.csv").string();
  {
    std::ofstream out(sweep.aggregate_csv);
    out << aggregate_table(sweep.keys, sweep.cells, sweep.reports);
  }
  json summary = {{"config", cfg.to_json()},
                  {"config_hash", content_hash(cfg.to_json())},
                  {"keys", sweep.keys},
                  {"cells", json::array()},
                  {"all_thresholds_met", sweep.all_thresholds_met()}};
  std::map<std::string, double> maxima;
  for (std::size_t c = 0; c < sweep.reports.size(); ++c) {
    const RunReport& r = sweep.reports[c];
    char name[32];
    std::snprintf(name, sizeof name, "cell_%03zu", c);
    summary["cells"].push_back({{"cell", c},
                                {"dir", name},
                                {"values", sweep.cells[c]},
                                {"status", r.status},
                                {"error", r.error},
                                {"thresholds_met", r.thresholds_met()}});
    for (const auto& [k, v] : r.metrics) {
      if (v.is_number()) maxima[k] = std::max(maxima.count(k) ? maxima[k] : v.get<double>(), v.get<double>());
    }
  }
  json mx = json::object();
  for (const auto& [k, v] : maxima) mx[k] = v;
  summary["max_over_cells"] = mx;
  {
    std::ofstream out(dir / "sweep.json");
    out << summary.dump(2) << '\n';
  }
  return sweep;
}

}  // namespace nnls
