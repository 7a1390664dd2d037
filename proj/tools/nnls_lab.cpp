// nnls_lab: run, sweep, validate and summarise scenario configs.
//
// Exit codes: 0 when every configured threshold is met, 1 when a threshold is
// missed or a run failed, 2 on configuration errors.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nnls/experiments.hpp"

namespace fs = std::filesystem;
using nnls::json;

namespace {

void print_report(const json& r, std::ostream& os) {
  os << "scenario " << r.value("scenario", "?") << "  status " << r.value("status", "?") << "  hash "
     << r.value("config_hash", "?") << "\n";
  if (!r.value("error", std::string()).empty()) os << "  error: " << r["error"].get<std::string>() << "\n";
  for (auto it = r["metrics"].begin(); it != r["metrics"].end(); ++it) {
    if (it.value().is_structured()) continue;
    os << "  " << it.key() << " = " << it.value().dump() << "\n";
  }
  for (const auto& t : r["thresholds"]) {
    os << "  [" << (t["met"].get<bool>() ? "met" : "MISSED") << "] " << t["metric"].get<std::string>() << " = "
       << t["value"].dump() << " bound " << t["bound"].dump() << "\n";
  }
}

int report_dir(const fs::path& dir) {
  if (fs::exists(dir / "report.json")) {
    std::ifstream in(dir / "report.json");
    const json r = json::parse(in);
    print_report(r, std::cout);
    const std::string hash = nnls::content_hash(r["config"]);
    if (hash != r["config_hash"].get<std::string>()) {
      std::cout << "  config hash mismatch: recomputed " << hash << "\n";
      return 1;
    }
    return r["thresholds_met"].get<bool>() ? 0 : 1;
  }
  if (fs::exists(dir / "sweep.json")) {
    std::ifstream in(dir / "sweep.json");
    const json s = json::parse(in);
    std::vector<nnls::RunReport> reports;
    for (const auto& c : s["cells"]) {
      std::ifstream rin(dir / c["dir"].get<std::string>() / "report.json");
      nnls::RunReport r;
      if (rin) {
        const json rj = json::parse(rin);
        r.status = rj["status"];
        for (auto it = rj["metrics"].begin(); it != rj["metrics"].end(); ++it) r.metrics[it.key()] = it.value();
        for (const auto& t : rj["thresholds"]) {
          nnls::ThresholdResult tr;
          tr.metric = t["metric"];
          tr.met = t["met"];
          r.thresholds.push_back(tr);
        }
      } else {
        r.status = c["status"];
        r.error = c["error"];
      }
      reports.push_back(std::move(r));
    }
    std::vector<std::vector<json>> cells;
    for (const auto& c : s["cells"]) cells.push_back(c["values"].get<std::vector<json>>());
    const std::string table = nnls::aggregate_table(s["keys"].get<std::vector<std::string>>(), cells, reports);
    std::cout << table;
    std::ifstream ain(dir / "aggregate.csv");
    const std::string stored((std::istreambuf_iterator<char>(ain)), std::istreambuf_iterator<char>());
    if (stored != table) {
      std::cout << "aggregate.csv does not match the cell reports\n";
      return 1;
    }
    return s["all_thresholds_met"].get<bool>() ? 0 : 1;
  }
  std::cerr << "no report.json or sweep.json in " << dir << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the nonlocal NLS i u_t - u_xx = u^2 conj(u(-x))"};
  app.require_subcommand(1);
  std::string config_path, dir, out_override;

  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", out_override, "Override output_dir");
  auto* sweep = app.add_subcommand("sweep", "Run the cross product of the config's sweep lists");
  sweep->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--output-dir", out_override, "Override output_dir");
  auto* validate = app.add_subcommand("validate", "Check a config against the schema");
  validate->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  auto* report = app.add_subcommand("report", "Summarise a run or sweep directory");
  report->add_option("dir", dir, "Output directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*report) return report_dir(dir);
    nnls::ScenarioConfig cfg = nnls::load_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (*validate) {
      if (!cfg.sweep.empty()) nnls::expand_sweep(cfg);
      std::cout << "valid " << nnls::to_string(cfg.scenario) << " config, hash " << nnls::content_hash(cfg.to_json())
                << "\n";
      return 0;
    }
    if (*run) {
      if (!cfg.sweep.empty()) throw nnls::ConfigError("config has sweep lists; use the sweep subcommand");
      const nnls::RunReport r = nnls::run_scenario(cfg);
      print_report(r.to_json(), std::cout);
      std::cout << "wall " << r.wall_seconds << " s, output in " << cfg.output_dir << "\n";
      return r.thresholds_met() ? 0 : 1;
    }
    const nnls::SweepReport s = nnls::run_sweep(cfg);
    for (std::size_t c = 0; c < s.reports.size(); ++c) {
      std::cout << "cell " << c << " " << s.reports[c].status << (s.reports[c].thresholds_met() ? " met" : " MISSED")
                << (s.reports[c].error.empty() ? "" : "  " + s.reports[c].error) << "\n";
    }
    std::cout << "aggregate " << s.aggregate_csv << "\n";
    return s.all_thresholds_met() ? 0 : 1;
  } catch (const nnls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
