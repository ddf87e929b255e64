#pragma once

#include <optional>
#include <string>

#include "ebcopt/vec.hpp"

namespace ebcopt {

enum class SetKind { L2Ball, L1Ball, Box, NonnegativeBox };

std::string to_string(SetKind k);

// The constraint region W: a norm ball or a coordinate box.
// Balls carry a center (default origin); boxes carry per-coordinate bounds.
struct FeasibleSet {
  SetKind kind = SetKind::Box;
  int dim = 0;
  double radius = 0;  // balls only
  Vec center;         // balls only
  Vec lower, upper;   // boxes only

  static FeasibleSet l2_ball(int d, double r, Vec c = {});
  static FeasibleSet l1_ball(int d, double r, Vec c = {});
  static FeasibleSet box(Vec lo, Vec hi);
  static FeasibleSet linf_ball(int d, double r);  // box [-r, r]^d
  static FeasibleSet nonneg_box(Vec hi);

  bool contains(const Vec& x, double tol = 1e-9) const;

  // sup ||w||_2 over the set (the R of the Lipschitz/radius bookkeeping)
  double enclosing_radius() const;
  double diameter() const;
};

// Euclidean projection onto W.
Vec project(const FeasibleSet& set, const Vec& x);

// W intersected with a Euclidean ball B(cap_center, cap_radius).
// cap_radius = 0 degenerates to the single point cap_center.
struct BallCap {
  FeasibleSet base;
  Vec cap_center;
  double cap_radius = 0;

  bool contains(const Vec& x, double tol = 1e-9) const;
};

// Euclidean projection onto base ∩ B(c, R). If the plain base projection
// already lies in the cap it is returned; otherwise the Lagrange multiplier
// of the ball constraint is found by bisection (residual tolerance 1e-10,
// at most 200 steps after bracketing).
Vec project_cap(const BallCap& cap, const Vec& x);

// argmin over set of 1/2||w - x||^2 + t||w||_1. Soft-threshold then project;
// exact for box sets (the problem separates per coordinate), an approximation
// for ball sets (threshold-then-project, single pass).
Vec prox_l1(const Vec& x, double t, const FeasibleSet& set);

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0;
}

// Gradient of 1/2||w||_q^2 (primal -> dual link for the p-norm mirror map,
// q = p/(p-1)) and its inverse, the gradient of 1/2||th||_p^2.
Vec pnorm_link_to_dual(const Vec& w, double q);
Vec pnorm_link_to_primal(const Vec& theta, double p);

// One mirror-descent step with the p-norm divergence: map to the dual,
// take the gradient step, map back, then Euclidean-project onto the set
// when one is given. For p = 2 this is exactly the projected Euclidean step.
// The Euclidean projection of the constrained case is a documented
// approximation of the Bregman projection (exact for p = 2 and for the
// unconstrained case).
Vec mirror_step_pnorm(const Vec& w, const Vec& g, double step, double p,
                      const FeasibleSet* set);

}  // namespace ebcopt
