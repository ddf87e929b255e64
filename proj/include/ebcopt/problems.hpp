#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebcopt/geometry.hpp"
#include "ebcopt/rng.hpp"
#include "ebcopt/vec.hpp"

namespace ebcopt {

// Analytic constants attached to every instance. theta/alpha are the error
// bound parameters: dist(w, W*)^2 <= alpha * (P(w) - P*)^theta on W.
struct ProblemMeta {
  int dim = 0;
  double lipschitz_G = 0;                 // Lipschitz constant of the data term
  std::optional<double> smoothness_L;     // gradient Lipschitz constant, when smooth
  double radius_R = 0;                    // sup ||w||_2 over W
  double risk_min = 0;                    // P*
  double ebc_theta = 1;
  double ebc_alpha = 1;
  double l1_lambda = 0;                   // composite l1 weight (0 = none)
};

// A datum is a flat vector of reals; each instance documents its layout.
using Datum = std::vector<double>;

// Oracle bundle for one stochastic problem. `loss`/`subgradient` cover the
// data term f(w, z) only; `risk` is the full objective including any
// regularizer. Oracles are immutable after construction; RNG state is owned
// by the caller.
struct StochasticProblem {
  std::string name;
  ProblemMeta meta;
  FeasibleSet set;
  bool convex_per_sample = true;

  std::function<Datum(Rng&)> sample;
  std::function<double(const Vec&, const Datum&)> loss;
  std::function<Vec(const Vec&, const Datum&)> subgradient;
  std::function<double(const Vec&)> risk;          // empty if unavailable
  std::function<Vec(const Vec&)> nearest_optimal;  // projection onto W*; empty if unknown

  bool has_risk() const { return bool(risk); }
  bool has_optimal_set() const { return bool(nearest_optimal); }
  double excess(const Vec& w) const { return risk(w) - meta.risk_min; }
  double distance_to_optimal(const Vec& w) const {
    return dist2(w, nearest_optimal(w));
  }
  double regularizer_value(const Vec& w) const { return meta.l1_lambda * norm1(w); }
  // subgradient of the regularizer; zero vector when none
  Vec regularizer_subgradient(const Vec& w) const;
};

// A finite law over (x, y) pairs.
struct FiniteXYDistribution {
  std::vector<Vec> xs;
  std::vector<double> ys;
  std::vector<double> probs;  // normalized at construction

  void validate(int d) const;
};

// Expected square loss E[(w'x - y)^2] over a polyhedral set; risk from the
// closed-form second moments. theta = 1.
StochasticProblem make_least_squares(int d, const FiniteXYDistribution& dist,
                                     FeasibleSet set,
                                     std::function<Vec(const Vec&)> nearest_optimal);

// Expected hinge loss with a coordinate-basis sampler constructed so that
// |w'x| <= 1 on the box and E[yx] = mu exactly; risk(w) = 1 - w'mu.
// Requires mu != 0 and |mu_j| <= 1/d.
StochasticProblem make_hinge(int d, const Vec& mu, FeasibleSet set);

// E_z[w'(S - zz')w] - w'b with finite support for z; requires
// S - E[zz'] >= 0. Per-sample loss may be non-convex.
StochasticProblem make_shifted_quadratic(const std::vector<Vec>& S,
                                         const std::vector<Vec>& z_atoms,
                                         const std::vector<double>& z_probs,
                                         const Vec& b, FeasibleSet set,
                                         std::function<Vec(const Vec&)> nearest_optimal);

// Composite problem: base risk + lambda * ||w||_1. theta stays 1.
StochasticProblem make_l1_regularized(StochasticProblem base, double lambda,
                                      std::function<Vec(const Vec&)> nearest_optimal,
                                      double ebc_alpha);

// base risk + lambda * ||w||_p^p with even p; the p-norm term is
// deterministic and absorbed into the data term. theta = 2/p.
StochasticProblem make_pnorm_composite(StochasticProblem base, double lambda, int p,
                                       std::function<Vec(const Vec&)> nearest_optimal,
                                       double ebc_alpha);

// Newsvendor: c'x - E[Pi(x; z)] where the profit for each demand atom is a
// pointwise-min of linear pieces (slope vector, intercept).
struct NewsvendorAtom {
  double prob;
  std::vector<std::pair<Vec, double>> pieces;  // Pi(x) = min_i (a_i'x + c_i)
};
StochasticProblem make_newsvendor(const Vec& c, const std::vector<NewsvendorAtom>& atoms,
                                  FeasibleSet set,
                                  std::function<Vec(const Vec&)> nearest_optimal,
                                  double risk_min, double ebc_alpha);

// The benchmark registry: named, pre-validated instances.
const std::vector<std::string>& registry_ids();
StochasticProblem make_registry_problem(const std::string& id);

// Light sampling self-check run on registry admission; throws on violation.
void validate_instance(const StochasticProblem& p, Rng& rng, int n_points = 500,
                       int n_samples = 32);

// Near-uniform draw over the feasible set (exact for boxes and l2/l1 balls).
Vec sample_feasible(const FeasibleSet& set, Rng& rng);

}  // namespace ebcopt
