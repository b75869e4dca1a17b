#include "nfv/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "nfv/bestfit.hpp"
#include "nfv/error.hpp"
#include "nfv/heuristic.hpp"

namespace nfv {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::heuristic: return "heuristic";
    case Algorithm::bestfit: return "bestfit";
    case Algorithm::exact: return "exact";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::heuristic, Algorithm::bestfit, Algorithm::exact}) {
    if (name == algorithm_name(a)) return a;
  }
  throw Error("unknown algorithm '" + name + "'");
}

RunRecord run_once(const Scenario& s, Algorithm algorithm, std::uint64_t seed, const ExactConfig& exact) {
  auto problem = instantiate(s, seed);
  const auto start = std::chrono::steady_clock::now();
  RunResult run = [&] {
    switch (algorithm) {
      case Algorithm::heuristic: return run_heuristic(problem, s.planner);
      case Algorithm::bestfit: return run_bestfit(problem);
      case Algorithm::exact: return solve_exact(problem, exact).run;
    }
    throw Error("unknown algorithm");
  }();
  const auto stop = std::chrono::steady_clock::now();
  RunRecord r;
  r.algorithm = algorithm;
  r.seed = seed;
  r.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  r.feasibility = validate(run.state, 0, problem->lifespan());
  r.metrics = compute_metrics(run.state);
  return r;
}

std::vector<RunRecord> run_experiment(const Scenario& s, const ExperimentConfig& config) {
  if (config.reps < 1) throw Error("reps must be at least 1");
  std::vector<RunRecord> records(static_cast<std::size_t>(config.reps));
  std::vector<std::exception_ptr> errors(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r; (r = next++) < records.size();) {
      try {
        records[r] = run_once(s, config.algorithm, config.base_seed + r, config.exact);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min(config.jobs, config.reps));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Stats {
  double mean = 0;
  double stderr_ = 0;
};

template <typename F>
Stats stats(const std::vector<RunRecord>& records, F value) {
  Stats s;
  const double n = static_cast<double>(records.size());
  for (const auto& r : records) s.mean += value(r);
  s.mean /= n;
  if (records.size() > 1) {
    double ss = 0;
    for (const auto& r : records) ss += (value(r) - s.mean) * (value(r) - s.mean);
    s.stderr_ = std::sqrt(ss / (n - 1) / n);
  }
  return s;
}

}  // namespace

void write_csv(std::ostream& out, const Scenario& s, const std::vector<RunRecord>& records, const CsvOptions& options) {
  if (options.header) {
    out << "scenario,algorithm,seed,traffic_multiplier,delay_multiplier,revenue,link_cost,cpu_cost,idle_cost,objective,"
           "served_traffic,cost_per_traffic";
    for (const auto& sv : s.services) out << ",frac_" << sv.id;
    out << ",wall_time_ms,revenue_stderr,objective_stderr\n";
  }
  if (records.empty()) return;
  const std::string prefix = s.name + ",";
  const std::string mults = num(s.traffic_multiplier) + "," + num(s.delay_multiplier);
  auto timing = [&](double ms) { return options.omit_timing ? std::string("NA") : num(ms); };

  for (const auto& r : records) {
    const auto& m = r.metrics;
    out << prefix << algorithm_name(r.algorithm) << ',' << r.seed << ',' << mults << ',' << num(m.revenue) << ','
        << num(m.link_cost) << ',' << num(m.cpu_cost) << ',' << num(m.idle_cost) << ',' << num(m.objective) << ','
        << num(m.served_traffic) << ',' << (m.cost_per_traffic ? num(*m.cost_per_traffic) : "NA");
    for (double f : m.fractions) out << ',' << num(f);
    out << ',' << timing(r.wall_time_ms) << ",NA,NA\n";
  }

  auto field = [&](auto get) { return num(stats(records, get).mean); };
  out << prefix << algorithm_name(records.front().algorithm) << ",mean," << mults << ','
      << field([](const RunRecord& r) { return r.metrics.revenue; }) << ','
      << field([](const RunRecord& r) { return r.metrics.link_cost; }) << ','
      << field([](const RunRecord& r) { return r.metrics.cpu_cost; }) << ','
      << field([](const RunRecord& r) { return r.metrics.idle_cost; }) << ','
      << field([](const RunRecord& r) { return r.metrics.objective; }) << ','
      << field([](const RunRecord& r) { return r.metrics.served_traffic; }) << ',';
  double cost = 0, traffic = 0;
  for (const auto& r : records) {
    cost += r.metrics.total_cost();
    traffic += r.metrics.served_traffic;
  }
  out << (traffic > 0 ? num(cost / traffic) : "NA");
  for (std::size_t i = 0; i < s.services.size(); ++i) {
    int offered = 0, admitted = 0;
    for (const auto& r : records) {
      offered += r.metrics.offered[i];
      admitted += r.metrics.admitted[i];
    }
    out << ',' << num(offered > 0 ? static_cast<double>(admitted) / offered : 1.0);
  }
  out << ',' << timing(stats(records, [](const RunRecord& r) { return r.wall_time_ms; }).mean) << ','
      << num(stats(records, [](const RunRecord& r) { return r.metrics.revenue; }).stderr_) << ','
      << num(stats(records, [](const RunRecord& r) { return r.metrics.objective; }).stderr_) << '\n';
}

}  // namespace nfv
