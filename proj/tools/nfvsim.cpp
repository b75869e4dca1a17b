#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "nfv/error.hpp"
#include "nfv/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Run NFV orchestration experiments and write per-run metrics as CSV."};
  std::string scenario_path, builtin, algorithm = "heuristic", out_path, emit_path;
  int reps = 1, jobs = 1;
  std::uint64_t seed = 1;
  std::optional<double> traffic_mult, delay_mult;
  std::optional<int> horizon, period, k_paths;
  bool strict = false, omit_timing = false;

  auto* source = app.add_option_group("source");
  source->add_option("--scenario", scenario_path, "scenario JSON file")->check(CLI::ExistingFile);
  source->add_option("--builtin", builtin, "built-in scenario")->check(CLI::IsMember({"small", "large"}));
  source->require_option(1);
  app.add_option("--algorithm", algorithm, "heuristic, bestfit or exact")->check(CLI::IsMember({"heuristic", "bestfit", "exact"}));
  app.add_option("--reps", reps, "repetitions")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed of the first repetition; repetition r uses seed + r");
  app.add_option("--traffic-mult", traffic_mult, "multiplier on ingress rates")->check(CLI::PositiveNumber);
  app.add_option("--delay-mult", delay_mult, "multiplier on physical link delays")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "planning window in steps")->check(CLI::PositiveNumber);
  app.add_option("--period", period, "steps committed per planner execution")->check(CLI::PositiveNumber);
  app.add_option("--k-paths", k_paths, "routes per datacenter pair")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "CSV output file (default: standard output)");
  app.add_option("--jobs", jobs, "repetitions run in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--validate-strict", strict, "list every constraint violation and stop at the first infeasible run");
  app.add_flag("--omit-timing", omit_timing, "write NA for wall times so output is reproducible");
  app.add_option("--emit-scenario", emit_path, "write the effective scenario as JSON and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    nfv::Scenario s = builtin.empty() ? nfv::load_scenario(scenario_path)
                      : builtin == "small" ? nfv::builtin_small_scale()
                                           : nfv::builtin_large_scale();
    if (traffic_mult) s.traffic_multiplier = *traffic_mult;
    if (delay_mult) s.delay_multiplier = *delay_mult;
    if (horizon) s.planner.horizon = *horizon;
    if (period) s.planner.period = *period;
    if (k_paths) s.k_paths = *k_paths;
    if (!app.get_option("--seed")->empty()) s.seed = seed;

    if (!emit_path.empty()) {
      std::ofstream f(emit_path);
      f << nfv::scenario_to_json(s);
      if (!f) throw nfv::Error("cannot write " + emit_path);
      return 0;
    }

    nfv::ExperimentConfig config;
    config.algorithm = nfv::parse_algorithm(algorithm);
    config.reps = reps;
    config.base_seed = s.seed;
    config.jobs = jobs;
    auto records = nfv::run_experiment(s, config);

    bool feasible = true;
    for (const auto& r : records) {
      if (r.feasibility.feasible()) continue;
      feasible = false;
      std::cerr << "seed " << r.seed << ": " << r.feasibility.summary() << "\n";
      if (strict) {
        std::cerr << r.feasibility.to_csv();
        break;
      }
    }

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw nfv::Error("cannot write " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    nfv::write_csv(out, s, records, {omit_timing, true});
    return feasible ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "nfvsim: " << e.what() << "\n";
    return 2;
  }
}
