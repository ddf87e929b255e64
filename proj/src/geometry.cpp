#include "ebcopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ebcopt {

std::string to_string(SetKind k) {
  switch (k) {
    case SetKind::L2Ball: return "l2-ball";
    case SetKind::L1Ball: return "l1-ball";
    case SetKind::Box: return "box";
    case SetKind::NonnegativeBox: return "nonneg-box";
  }
  return "?";
}

static Vec default_center(int d, Vec c) {
  if (c.empty()) return Vec(d, 0.0);
  if (int(c.size()) != d) throw std::invalid_argument("center dimension mismatch");
  return c;
}

FeasibleSet FeasibleSet::l2_ball(int d, double r, Vec c) {
  if (d <= 0 || r <= 0) throw std::invalid_argument("l2_ball: need d > 0, r > 0");
  FeasibleSet s;
  s.kind = SetKind::L2Ball;
  s.dim = d;
  s.radius = r;
  s.center = default_center(d, std::move(c));
  return s;
}

FeasibleSet FeasibleSet::l1_ball(int d, double r, Vec c) {
  if (d <= 0 || r <= 0) throw std::invalid_argument("l1_ball: need d > 0, r > 0");
  FeasibleSet s;
  s.kind = SetKind::L1Ball;
  s.dim = d;
  s.radius = r;
  s.center = default_center(d, std::move(c));
  return s;
}

FeasibleSet FeasibleSet::box(Vec lo, Vec hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw std::invalid_argument("box: bad bounds");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("box: lower > upper");
  FeasibleSet s;
  s.kind = SetKind::Box;
  s.dim = int(lo.size());
  s.lower = std::move(lo);
  s.upper = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::linf_ball(int d, double r) {
  if (d <= 0 || r <= 0) throw std::invalid_argument("linf_ball: need d > 0, r > 0");
  return box(Vec(d, -r), Vec(d, r));
}

FeasibleSet FeasibleSet::nonneg_box(Vec hi) {
  for (double v : hi)
    if (!(v >= 0)) throw std::invalid_argument("nonneg_box: negative upper bound");
  Vec lo(hi.size(), 0.0);
  FeasibleSet s = box(std::move(lo), std::move(hi));
  s.kind = SetKind::NonnegativeBox;
  return s;
}

bool FeasibleSet::contains(const Vec& x, double tol) const {
  if (int(x.size()) != dim) return false;
  switch (kind) {
    case SetKind::L2Ball:
      return dist2(x, center) <= radius + tol;
    case SetKind::L1Ball:
      return norm1(sub(x, center)) <= radius + tol;
    case SetKind::Box:
    case SetKind::NonnegativeBox:
      for (int i = 0; i < dim; ++i)
        if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
      return true;
  }
  return false;
}

double FeasibleSet::enclosing_radius() const {
  switch (kind) {
    case SetKind::L2Ball:
      return norm2(center) + radius;
    case SetKind::L1Ball:
      return norm2(center) + radius;  // l1 ball sits inside the l2 ball of the same radius
    case SetKind::Box:
    case SetKind::NonnegativeBox: {
      double s = 0;
      for (int i = 0; i < dim; ++i) {
        double m = std::max(std::abs(lower[i]), std::abs(upper[i]));
        s += m * m;
      }
      return std::sqrt(s);
    }
  }
  return 0;
}

double FeasibleSet::diameter() const {
  switch (kind) {
    case SetKind::L2Ball:
      return 2 * radius;
    case SetKind::L1Ball:
      return 2 * radius;
    case SetKind::Box:
    case SetKind::NonnegativeBox: {
      double s = 0;
      for (int i = 0; i < dim; ++i) {
        double m = upper[i] - lower[i];
        s += m * m;
      }
      return std::sqrt(s);
    }
  }
  return 0;
}

// Sort-based threshold projection onto {||y||_1 <= r}. Ties in the sorted
// magnitudes break by index order; the projection itself is unique.
static Vec project_l1_origin(const Vec& x, double r) {
  if (norm1(x) <= r) return x;
  int d = int(x.size());
  Vec mag(d);
  for (int i = 0; i < d; ++i) mag[i] = std::abs(x[i]);
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return mag[a] > mag[b]; });
  double cum = 0, tau = 0;
  int rho = 0;
  for (int k = 0; k < d; ++k) {
    cum += mag[idx[k]];
    double t = (cum - r) / double(k + 1);
    if (mag[idx[k]] > t) {
      rho = k + 1;
      tau = t;
    }
  }
  (void)rho;
  Vec y(d);
  for (int i = 0; i < d; ++i) y[i] = sgn(x[i]) * std::max(0.0, mag[i] - tau);
  return y;
}

Vec project(const FeasibleSet& set, const Vec& x) {
  if (int(x.size()) != set.dim)
    throw std::invalid_argument("project: dimension mismatch");
  switch (set.kind) {
    case SetKind::L2Ball: {
      Vec v = sub(x, set.center);
      double n = norm2(v);
      if (n <= set.radius) return x;
      return add(set.center, scale(v, set.radius / n));
    }
    case SetKind::L1Ball: {
      Vec v = sub(x, set.center);
      return add(set.center, project_l1_origin(v, set.radius));
    }
    case SetKind::Box:
    case SetKind::NonnegativeBox: {
      Vec y(x.size());
      for (int i = 0; i < set.dim; ++i)
        y[i] = std::clamp(x[i], set.lower[i], set.upper[i]);
      return y;
    }
  }
  throw std::logic_error("unreachable");
}

bool BallCap::contains(const Vec& x, double tol) const {
  return base.contains(x, tol) && dist2(x, cap_center) <= cap_radius + tol;
}

Vec project_cap(const BallCap& cap, const Vec& x) {
  if (int(x.size()) != cap.base.dim)
    throw std::invalid_argument("project_cap: dimension mismatch");
  if (cap.cap_radius < 0) throw std::invalid_argument("project_cap: negative radius");
  if (cap.cap_radius == 0) return cap.cap_center;

  Vec y = project(cap.base, x);
  double resid = dist2(y, cap.cap_center) - cap.cap_radius;
  if (resid <= 0) return y;

  // KKT point of min 1/2||y-x||^2 over base ∩ B(c,R): for multiplier
  // lam >= 0 of the ball constraint, y(lam) = Pi_base((x + lam c)/(1 + lam)).
  // ||y(lam) - c|| decreases to 0 as lam -> inf (c is base-feasible), so the
  // active-constraint residual brackets a root.
  constexpr double tau_cap = 1e-10;
  constexpr int max_iter = 200;
  auto trial = [&](double lam) {
    Vec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      z[i] = (x[i] + lam * cap.cap_center[i]) / (1.0 + lam);
    return project(cap.base, z);
  };
  double lo = 0, hi = 1;
  double resid_hi = dist2(trial(hi), cap.cap_center) - cap.cap_radius;
  int doublings = 0;
  while (resid_hi > 0) {
    lo = hi;
    hi *= 2;
    resid_hi = dist2(trial(hi), cap.cap_center) - cap.cap_radius;
    if (++doublings > 100)
      throw std::runtime_error("project_cap: failed to bracket multiplier, residual " +
                               std::to_string(resid_hi));
  }
  Vec best = trial(hi);
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    Vec ym = trial(mid);
    double r = dist2(ym, cap.cap_center) - cap.cap_radius;
    if (r > 0) {
      lo = mid;
    } else {
      hi = mid;
      best = std::move(ym);
    }
    if (std::abs(r) <= tau_cap) return r <= 0 ? best : trial(hi);
  }
  return best;
}

Vec prox_l1(const Vec& x, double t, const FeasibleSet& set) {
  if (int(x.size()) != set.dim)
    throw std::invalid_argument("prox_l1: dimension mismatch");
  if (t < 0) throw std::invalid_argument("prox_l1: negative threshold");
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = soft_threshold(x[i], t);
  return project(set, y);
}

Vec pnorm_link_to_dual(const Vec& w, double q) {
  double n = 0;
  for (double v : w) n += std::pow(std::abs(v), q);
  if (n == 0) return zeros(w.size());
  n = std::pow(n, 1.0 / q);  // ||w||_q
  Vec th(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    th[i] = sgn(w[i]) * std::pow(std::abs(w[i]), q - 1) * std::pow(n, 2.0 - q);
  return th;
}

Vec pnorm_link_to_primal(const Vec& theta, double p) {
  double n = 0;
  for (double v : theta) n += std::pow(std::abs(v), p);
  if (n == 0) return zeros(theta.size());
  n = std::pow(n, 1.0 / p);  // ||theta||_p
  Vec w(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    w[i] = sgn(theta[i]) * std::pow(std::abs(theta[i]), p - 1) * std::pow(n, 2.0 - p);
  return w;
}

Vec mirror_step_pnorm(const Vec& w, const Vec& g, double step, double p,
                      const FeasibleSet* set) {
  if (p < 2) throw std::invalid_argument("mirror_step_pnorm: p < 2");
  check_same_dim(w, g);
  if (p == 2) {
    Vec y = w;
    axpy(-step, g, y);
    return set ? project(*set, y) : y;
  }
  double q = p / (p - 1);
  Vec th = pnorm_link_to_dual(w, q);
  axpy(-step, g, th);
  Vec y = pnorm_link_to_primal(th, p);
  return set ? project(*set, y) : y;
}

}  // namespace ebcopt
