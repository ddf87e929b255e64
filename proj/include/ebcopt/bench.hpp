#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebcopt/data.hpp"
#include "ebcopt/problems.hpp"
#include "ebcopt/solvers.hpp"

namespace ebcopt {

struct AlgorithmSpec {
  std::string id;                         // ssg, asa, ssgs, asa2, psg, asa3, smd, sag
  std::map<std::string, double> params;   // gamma, beta, R0, p, step ...
};

struct SyntheticDataSpec {
  long long n = 0;
  int d = 0;
  int sparsity = 10;
  double density = 0.05;
  double noise_sd = 0.1;
  uint64_t seed = 1;
};

struct ProblemSpec {
  std::string registry_id;                      // either this ...
  std::string dataset_path;                     // ... or a dataset
  std::optional<SyntheticDataSpec> synthetic;   // or a generated one
  std::string loss = "square";                  // dataset mode: square | hinge
  double lambda = 0;
  double radius = 0;        // l1 radius for dataset mode; 0 = unconstrained box
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<long long> n_grid;
  int replicates = 1;
  uint64_t base_seed = 0;
  double delta = 0.1;
  std::string out_dir = "results";
  std::string metric = "excess_risk";  // or test_error
  int checkpoints = 32;
};

std::string serialize_config(const ExperimentConfig& c);
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// checks ids, grids, seeds; throws with a message naming the offender
void validate_config(const ExperimentConfig& c);

struct SummaryRow {
  std::string problem;
  std::string algorithm;
  long long n = 0;
  int replicate = 0;
  uint64_t seed = 0;
  long long samples_used = 0;
  double metric = 0;  // excess_risk or test_error per config
  int stage_count = 0;
  double wall_ms = 0;  // in-memory only, not serialized
  bool failed = false;
  std::string error;
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  std::string metric_name;
  std::vector<RunTrace> traces;  // one per successful cell, cell order
  int failures = 0;
};

// Executes every (algorithm, n, replicate) cell; deterministic for a given
// base seed regardless of thread count. Writes per-cell trace CSVs and
// summary.csv under out_dir when write_files is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads,
                                bool write_files = true);

std::string summary_csv(const ExperimentResult& r);

struct RateFit {
  std::vector<std::pair<long long, double>> medians;  // (n, median metric)
  double slope = 0;
  double intercept = 0;
  double residual = 0;
  std::optional<double> predicted_exponent;  // -1/(2-theta) when meta known
};

RateFit fit_rate(const std::vector<SummaryRow>& rows, const std::string& algorithm,
                 std::optional<double> theta = std::nullopt);

enum class PlotKind { ExcessVsN, TestErrorVsIteration };

// Self-contained SVG: log axes, one polyline per algorithm, legend, title.
std::string emit_plot(const std::vector<SummaryRow>& rows,
                      const std::vector<RunTrace>& traces, PlotKind kind,
                      const std::string& title);

// Single cell runner, exposed for tests; uses stream(base_seed, cell_index).
SummaryRow run_cell(const StochasticProblem& p, const AlgorithmSpec& alg, long long n,
                    int replicate, uint64_t base_seed, uint64_t cell_index,
                    const std::string& metric,
                    int checkpoints, RunTrace* trace_out, const SparseDataset* test_set,
                    const SparseDataset* train_set);

// Builds the problem from the spec (registry, dataset file, or synthetic);
// fills train_out/test_out with the splits in dataset modes.
StochasticProblem build_problem(const ProblemSpec& spec, SparseDataset* train_out,
                                SparseDataset* test_out);

}  // namespace ebcopt
