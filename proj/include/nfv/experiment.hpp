#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfv/exact.hpp"
#include "nfv/metrics.hpp"
#include "nfv/scenario.hpp"
#include "nfv/validate.hpp"

namespace nfv {

enum class Algorithm { heuristic, bestfit, exact };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct RunRecord {
  Algorithm algorithm = Algorithm::heuristic;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  FeasibilityReport feasibility;
  double wall_time_ms = 0;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::heuristic;
  int reps = 1;
  std::uint64_t base_seed = 1;  // repetition r uses base_seed + r
  int jobs = 1;
  ExactConfig exact;
};

/// Runs a single repetition and validates its final state.
RunRecord run_once(const Scenario& s, Algorithm algorithm, std::uint64_t seed, const ExactConfig& exact = {});

/// Runs every repetition, possibly in parallel; records come back in repetition order.
std::vector<RunRecord> run_experiment(const Scenario& s, const ExperimentConfig& config);

struct CsvOptions {
  bool omit_timing = false;
  bool header = true;
};

/// One row per record plus a final "mean" row. Fractions in the mean row pool
/// offered and admitted counts over all records.
void write_csv(std::ostream& out, const Scenario& s, const std::vector<RunRecord>& records, const CsvOptions& options = {});

}  // namespace nfv
