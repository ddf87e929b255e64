#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ebcopt/geometry.hpp"
#include "ebcopt/problems.hpp"
#include "ebcopt/rng.hpp"

namespace ebcopt {

// Feasible region for one subroutine call: either W itself or W ∩ B(c, R).
struct Domain {
  FeasibleSet set;
  std::optional<BallCap> cap;

  static Domain plain(FeasibleSet s) { return Domain{std::move(s), std::nullopt}; }
  static Domain capped(FeasibleSet s, Vec center, double radius) {
    Domain d{std::move(s), std::nullopt};
    d.cap = BallCap{d.set, std::move(center), radius};
    return d;
  }

  Vec project(const Vec& x) const {
    return cap ? project_cap(*cap, x) : ebcopt::project(set, x);
  }
  bool contains(const Vec& x, double tol = 1e-9) const {
    return cap ? cap->contains(x, tol) : set.contains(x, tol);
  }
};

enum class StepRule { Asa, Asa2, Asa3 };

// Multi-stage driver state: m stages of n0 iterations, radius halving,
// per-stage step from the rule (Asa: R/(G*sqrt(n0+1)), Asa2: R*sqrt(n0)/(2G),
// Asa3: R/(G*sqrt(n0))).
struct StageSchedule {
  long long m = 0;
  long long n0 = 0;
  double G = 0, R0 = 0;
  std::vector<double> radii;  // R_0 .. R_m
  std::vector<double> steps;  // step for stage k at index k-1

  static StageSchedule make(long long n, double R0, double G, StepRule rule);
};

struct TracePoint {
  long long samples = 0;
  int stage = 0;
  double excess = 0;    // NaN when no risk oracle
  double eval = 0;      // NaN when no evaluator configured
  Vec iterate;          // the averaged iterate at this checkpoint
};

struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  long long samples_used = 0;
  int stage_count = 0;
  std::vector<TracePoint> points;
  Vec final_iterate;
  double wall_ms = 0;  // in-memory diagnostic only, never serialized
};

struct SolveOptions {
  int checkpoints = 32;
  bool record_iterates = true;
  std::function<double(const Vec&)> evaluator;  // e.g. held-out test error
};

struct SolveResult {
  Vec out;
  RunTrace trace;
};

// One SSG run: T projected subgradient updates with constant step, output the
// average of the T+1 iterates. The regularizer's subgradient, when present,
// is folded into the step (non-proximal handling).
SolveResult ssg(const StochasticProblem& p, const Domain& domain, const Vec& w1,
                double gamma, long long T, Rng& rng, const SolveOptions& opts = {});

// Multi-stage SSG on shrinking ball caps (radius and step halving).
SolveResult asa(const StochasticProblem& p, const Vec& w1, long long n, double R0,
                double G, Rng& rng, const SolveOptions& opts = {});

// Strongly-convex-regularized subgradient subroutine:
// w'_{t+1} = (1 - 2/t) w_t + (2/t) w_1 - (2 beta / t) g_t, projected onto W.
// No ball cap; output the average of the T+1 iterates. Requires T >= 3.
SolveResult ssgs(const StochasticProblem& p, const Vec& w1, double beta, long long T,
                 Rng& rng, const SolveOptions& opts = {});

// Multi-stage SSGS (projection-free variant of the stage driver).
SolveResult asa2(const StochasticProblem& p, const Vec& w1, long long n, double R0,
                 double G, Rng& rng, const SolveOptions& opts = {});

// Proximal stochastic gradient: each step solves
// argmin over the domain of 1/2||w - w_t||^2 + eta g'w + eta r(w)
// via soft-threshold + projection. Output averages w_1..w_T (denominator T).
SolveResult psg(const StochasticProblem& p, const Domain& domain, const Vec& w1,
                double gamma, long long T, Rng& rng, const SolveOptions& opts = {});

// Multi-stage PSG on shrinking ball caps. rho is the regularizer's Lipschitz
// constant (lambda * sqrt(d) for l1); requires n0 >= rho^2 / G^2.
SolveResult asa3(const StochasticProblem& p, const Vec& w1, long long n, double R0,
                 double G, double rho, Rng& rng, const SolveOptions& opts = {});

// Stochastic mirror descent with the p-norm divergence, averaged iterate.
SolveResult smd_pnorm(const StochasticProblem& p, const FeasibleSet& set, const Vec& w1,
                      double gamma, long long T, double pnorm, Rng& rng,
                      const SolveOptions& opts = {});

// Stochastic average gradient baseline on a finite-sum least squares problem,
// unconstrained, constant step. Rows are (label, sparse features).
struct SagRow {
  double label = 0;
  std::vector<std::pair<int, double>> feats;  // strictly increasing indices
};
SolveResult sag(const std::vector<SagRow>& rows, int dim, double step, int epochs,
                Rng& rng, const SolveOptions& opts = {});

}  // namespace ebcopt
