#pragma once

#include <vector>

#include "ebcopt/problems.hpp"
#include "ebcopt/rng.hpp"

namespace ebcopt {

// Empirical objective over a fixed sample: mean loss plus the regularizer.
double empirical_risk(const StochasticProblem& p, const std::vector<Datum>& samples,
                      const Vec& w);
Vec empirical_subgradient(const StochasticProblem& p, const std::vector<Datum>& samples,
                          const Vec& w);

// Deterministic empirical risk minimizer. Multi-epoch diminishing-step
// projected subgradient with best-iterate tracking, then a shrinking-grid
// polish at d <= 3 or a restart-stability certificate at higher d.
// Throws if the certified gap exceeds the tolerance.
Vec solve_erm(const StochasticProblem& p, const std::vector<Datum>& samples,
              double tolerance);

struct ErmStudyResult {
  std::vector<long long> n_grid;
  std::vector<std::vector<double>> excess;  // [n index][replicate], clamped at 0
  std::vector<double> median_excess;        // per n
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double theoretical_exponent = 0;  // -1/(2 - theta)
};

// Least-squares fit of log(y) vs log(x); entries with y <= floor are skipped.
// Returns {slope, intercept, slope_stderr}; needs >= 2 usable points.
struct LogLogFit {
  double slope = 0, intercept = 0, slope_stderr = 0;
  int used = 0;
};
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                     double y_floor);

ErmStudyResult erm_rate_study(const StochasticProblem& p,
                              const std::vector<long long>& n_grid, int replicates,
                              double tolerance, uint64_t base_seed);

double median(std::vector<double> v);

}  // namespace ebcopt
