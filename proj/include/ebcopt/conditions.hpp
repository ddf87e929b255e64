#pragma once

#include <string>
#include <vector>

#include "ebcopt/problems.hpp"
#include "ebcopt/rng.hpp"

namespace ebcopt {

// Upper-envelope fit of dist^2 <= alpha * excess^theta over a theta grid.
struct EbcEstimate {
  std::vector<double> theta_grid;
  std::vector<double> alpha_hat;   // max over admitted points of dist^2 / excess^theta
  std::vector<Vec> witnesses;      // argmax point per theta
  double recommended_theta = 0;    // largest theta with alpha_hat <= alpha_cap
  double excess_floor = 0;         // absolute floor actually applied
  int admitted = 0;
};

// default theta grid {0.05, 0.10, ..., 1.00}
std::vector<double> default_theta_grid();

// excess_floor_rel scales the max observed excess (default 1e-6).
EbcEstimate estimate_ebc(const StochasticProblem& p, const std::vector<Vec>& points,
                         const std::vector<double>& theta_grid, double excess_floor_rel,
                         double alpha_cap);

// Point source for the estimator: 70% uniform draws over W, 30% iterates of a
// short SSG trajectory (these concentrate near the optimal set).
std::vector<Vec> ebc_point_source(const StochasticProblem& p, int n, Rng& rng);

struct EbcViolation {
  Vec point;
  double margin;  // dist^2 - alpha * excess^theta (positive = violated)
};

std::vector<EbcViolation> check_ebc(const StochasticProblem& p, double theta,
                                    double alpha, const std::vector<Vec>& points);

// kappa(x) = (e^x - x - 1) / x^2, kappa(0) = 1/2
double kappa(double x);

struct ConditionCheckReport {
  std::string kind;  // "bernstein" or "central"
  Vec point;
  double theta = 0;
  double param = 0;    // B for bernstein, eta for central
  double epsilon = 0;  // central only
  double b = 0;        // central only
  double lhs = 0, rhs = 0;
  double margin = 0;   // rhs - lhs (log domain for central)
  double stderr_ = 0;
  long long mc_samples = 0;
  bool pass = false;
  bool trivial = false;  // w optimal, nothing to test
};

// E[(f(w,z) - f(w*,z))^2] <= B * (E[f(w,z) - f(w*,z)])^theta with w* the
// nearest optimal point. B <= 0 selects the default G^2 * alpha.
ConditionCheckReport check_bernstein(const StochasticProblem& p, const Vec& w,
                                     double theta, double B, long long mc_samples,
                                     Rng& rng);

// E[exp(eta (f(w*,z) - f(w,z)))] <= exp(eta epsilon) with
// eta = min(c eps^(1-theta), b), c = 1 / (alpha G^2 kappa(4 G R b)).
// Evaluated in the log domain (log-sum-exp), never clipped.
ConditionCheckReport check_central(const StochasticProblem& p, const Vec& w,
                                   double epsilon, double b, long long mc_samples,
                                   Rng& rng);

}  // namespace ebcopt
