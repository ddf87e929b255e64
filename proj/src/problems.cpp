#include "ebcopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ebcopt {

Vec StochasticProblem::regularizer_subgradient(const Vec& w) const {
  Vec g(w.size(), 0.0);
  if (meta.l1_lambda > 0)
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = meta.l1_lambda * sgn(w[i]);
  return g;
}

void FiniteXYDistribution::validate(int d) const {
  if (xs.empty() || xs.size() != ys.size() || xs.size() != probs.size())
    throw std::invalid_argument("distribution: inconsistent atom lists");
  for (const Vec& x : xs) {
    if (int(x.size()) != d) throw std::invalid_argument("distribution: bad x dimension");
    if (!all_finite(x)) throw std::invalid_argument("distribution: non-finite x");
  }
  for (double y : ys)
    if (!std::isfinite(y)) throw std::invalid_argument("distribution: non-finite y");
  double total = 0;
  for (double p : probs) {
    if (!(p >= 0)) throw std::invalid_argument("distribution: negative probability");
    total += p;
  }
  if (total <= 0) throw std::invalid_argument("distribution: zero total mass");
}

// sup over w in W of |w'x|
static double sup_abs_dot(const FeasibleSet& set, const Vec& x) {
  switch (set.kind) {
    case SetKind::L2Ball:
      return std::abs(dot(set.center, x)) + set.radius * norm2(x);
    case SetKind::L1Ball:
      return std::abs(dot(set.center, x)) + set.radius * norm_inf(x);
    case SetKind::Box:
    case SetKind::NonnegativeBox: {
      double s = 0;
      for (int i = 0; i < set.dim; ++i)
        s += std::max(std::abs(set.lower[i]), std::abs(set.upper[i])) * std::abs(x[i]);
      return s;
    }
  }
  return 0;
}

StochasticProblem make_least_squares(int d, const FiniteXYDistribution& dist,
                                     FeasibleSet set,
                                     std::function<Vec(const Vec&)> nearest_optimal) {
  dist.validate(d);
  if (set.dim != d) throw std::invalid_argument("make_least_squares: set dimension");
  double total = 0;
  for (double p : dist.probs) total += p;

  // second moments: A = E[xx'], v = E[yx], yy = E[y^2]
  std::vector<Vec> A(d, Vec(d, 0.0));
  Vec v(d, 0.0);
  double yy = 0;
  for (std::size_t a = 0; a < dist.xs.size(); ++a) {
    double p = dist.probs[a] / total;
    const Vec& x = dist.xs[a];
    for (int i = 0; i < d; ++i) {
      v[i] += p * dist.ys[a] * x[i];
      for (int j = 0; j < d; ++j) A[i][j] += p * x[i] * x[j];
    }
    yy += p * dist.ys[a] * dist.ys[a];
  }

  double G = 0, L = 0;
  for (std::size_t a = 0; a < dist.xs.size(); ++a) {
    const Vec& x = dist.xs[a];
    double reach = sup_abs_dot(set, x) + std::abs(dist.ys[a]);
    G = std::max(G, 2 * reach * norm2(x));
    L = std::max(L, 2 * dot(x, x));
  }

  StochasticProblem p;
  p.name = "least-squares";
  p.set = std::move(set);
  p.meta.dim = d;
  p.meta.lipschitz_G = G;
  p.meta.smoothness_L = L;
  p.meta.radius_R = p.set.enclosing_radius();
  p.meta.ebc_theta = 1;
  p.nearest_optimal = std::move(nearest_optimal);

  auto dd = dist;  // own a normalized copy
  for (double& q : dd.probs) q /= total;
  p.sample = [dd](Rng& rng) {
    std::size_t a = rng.categorical(dd.probs);
    Datum z = dd.xs[a];
    z.push_back(dd.ys[a]);
    return z;
  };
  p.loss = [d](const Vec& w, const Datum& z) {
    double m = -z[d];
    for (int i = 0; i < d; ++i) m += w[i] * z[i];
    return m * m;
  };
  p.subgradient = [d](const Vec& w, const Datum& z) {
    double m = -z[d];
    for (int i = 0; i < d; ++i) m += w[i] * z[i];
    Vec g(d);
    for (int i = 0; i < d; ++i) g[i] = 2 * m * z[i];
    return g;
  };
  p.risk = [A, v, yy, d](const Vec& w) {
    double r = yy;
    for (int i = 0; i < d; ++i) {
      r -= 2 * w[i] * v[i];
      for (int j = 0; j < d; ++j) r += w[i] * A[i][j] * w[j];
    }
    return r;
  };
  return p;
}

StochasticProblem make_hinge(int d, const Vec& mu, FeasibleSet set) {
  if (int(mu.size()) != d || set.dim != d)
    throw std::invalid_argument("make_hinge: dimension mismatch");
  double mu_norm = norm2(mu);
  if (mu_norm == 0) throw std::invalid_argument("make_hinge: mu must be nonzero");
  double min_nz = 1e300;
  for (double m : mu) {
    if (std::abs(m) > 1.0 / d + 1e-12)
      throw std::invalid_argument("make_hinge: need |mu_j| <= 1/d for the basis sampler");
    if (m != 0) min_nz = std::min(min_nz, std::abs(m));
  }

  StochasticProblem p;
  p.name = "hinge";
  p.meta.dim = d;
  p.meta.lipschitz_G = 1;  // ||x||_2 = 1 for basis vectors
  p.meta.radius_R = set.enclosing_radius();
  p.meta.ebc_theta = 1;
  // optimal set and alpha per set kind
  if (set.kind == SetKind::Box || set.kind == SetKind::NonnegativeBox) {
    double pstar = 1;
    for (int j = 0; j < d; ++j)
      pstar -= std::max(mu[j] * set.upper[j], mu[j] * set.lower[j]);
    p.meta.risk_min = pstar;
    p.meta.ebc_alpha = 2 * (set.diameter() / 2) / min_nz;
    // tighter bound for the symmetric unit box, the common case
    bool unit_box = true;
    for (int j = 0; j < d; ++j)
      unit_box = unit_box && set.lower[j] == -1 && set.upper[j] == 1;
    if (unit_box) p.meta.ebc_alpha = 2 / min_nz;
    FeasibleSet s = set;
    Vec mu_copy = mu;
    p.nearest_optimal = [s, mu_copy](const Vec& w) {
      Vec y(w.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (mu_copy[j] > 0) y[j] = s.upper[j];
        else if (mu_copy[j] < 0) y[j] = s.lower[j];
        else y[j] = std::clamp(w[j], s.lower[j], s.upper[j]);
      }
      return y;
    };
  } else if (set.kind == SetKind::L2Ball) {
    Vec wstar = add(set.center, scale(mu, set.radius / mu_norm));
    p.meta.risk_min = 1 - dot(wstar, mu);
    p.meta.ebc_alpha = 2 * set.radius / mu_norm;
    p.nearest_optimal = [wstar](const Vec&) { return wstar; };
  } else {
    // l1 ball: optimal vertex when the max-|mu| coordinate is unique
    int jbest = 0;
    for (int j = 1; j < d; ++j)
      if (std::abs(mu[j]) > std::abs(mu[jbest])) jbest = j;
    for (int j = 0; j < d; ++j)
      if (j != jbest && std::abs(std::abs(mu[j]) - std::abs(mu[jbest])) < 1e-12)
        throw std::invalid_argument("make_hinge: tied l1-ball optimal face unsupported");
    Vec wstar = set.center;
    wstar[jbest] += set.radius * sgn(mu[jbest]);
    p.meta.risk_min = 1 - dot(wstar, mu);
    double gap = 1e300;  // margin of the best vertex over the others
    for (int j = 0; j < d; ++j)
      if (j != jbest) gap = std::min(gap, std::abs(mu[jbest]) - std::abs(mu[j]));
    p.meta.ebc_alpha = 2 * (2 * set.radius) / std::max(gap, 1e-12);
    p.nearest_optimal = [wstar](const Vec&) { return wstar; };
  }

  // Datum layout: {j, s} where x = b e_j, s = y*b in {-1, +1}.
  int dd = d;
  Vec mu_copy = mu;
  p.sample = [dd, mu_copy](Rng& rng) {
    int j = int(rng.uniform_int(std::uint64_t(dd)));
    double pr = 0.5 * (1 + dd * mu_copy[j]);
    double s = rng.bernoulli(pr) ? 1.0 : -1.0;
    return Datum{double(j), s};
  };
  p.loss = [](const Vec& w, const Datum& z) {
    return std::max(0.0, 1 - z[1] * w[int(z[0])]);
  };
  // kink (margin exactly 1): return the zero-side element
  p.subgradient = [](const Vec& w, const Datum& z) {
    Vec g(w.size(), 0.0);
    if (1 - z[1] * w[int(z[0])] > 0) g[int(z[0])] = -z[1];
    return g;
  };
  p.risk = [mu_copy](const Vec& w) { return 1 - dot(w, mu_copy); };
  p.set = std::move(set);
  return p;
}

// Jacobi eigenvalue sweep for small symmetric matrices; returns eigenvalues.
static Vec sym_eigenvalues(std::vector<Vec> M) {
  int d = int(M.size());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += M[i][j] * M[i][j];
    if (off < 1e-24) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        if (std::abs(M[p][q]) < 1e-18) continue;
        double phi = 0.5 * std::atan2(2 * M[p][q], M[q][q] - M[p][p]);
        double c = std::cos(phi), s = std::sin(phi);
        for (int k = 0; k < d; ++k) {
          double mkp = M[k][p], mkq = M[k][q];
          M[k][p] = c * mkp - s * mkq;
          M[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < d; ++k) {
          double mpk = M[p][k], mqk = M[q][k];
          M[p][k] = c * mpk - s * mqk;
          M[q][k] = s * mpk + c * mqk;
        }
      }
  }
  Vec ev(d);
  for (int i = 0; i < d; ++i) ev[i] = M[i][i];
  return ev;
}

StochasticProblem make_shifted_quadratic(const std::vector<Vec>& S,
                                         const std::vector<Vec>& z_atoms,
                                         const std::vector<double>& z_probs,
                                         const Vec& b, FeasibleSet set,
                                         std::function<Vec(const Vec&)> nearest_optimal) {
  int d = int(S.size());
  if (set.dim != d || int(b.size()) != d)
    throw std::invalid_argument("make_shifted_quadratic: dimension mismatch");
  if (z_atoms.empty() || z_atoms.size() != z_probs.size())
    throw std::invalid_argument("make_shifted_quadratic: bad support");
  double total = 0;
  for (double p : z_probs) total += p;

  // M = S - E[zz']
  std::vector<Vec> M = S;
  for (std::size_t a = 0; a < z_atoms.size(); ++a) {
    double p = z_probs[a] / total;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M[i][j] -= p * z_atoms[a][i] * z_atoms[a][j];
  }
  Vec ev = sym_eigenvalues(M);
  for (double e : ev)
    if (e < -1e-9)
      throw std::invalid_argument("make_shifted_quadratic: S - E[zz'] has eigenvalue " +
                                  std::to_string(e));

  double max_norm = 0;
  for (const Vec& z : z_atoms) max_norm = std::max(max_norm, dot(z, z));
  double sfro = 0;
  for (const Vec& row : S) sfro += dot(row, row);
  sfro = std::sqrt(sfro);
  double R = set.enclosing_radius();

  StochasticProblem p;
  p.name = "shifted-quadratic";
  p.meta.dim = d;
  p.meta.lipschitz_G = 2 * (sfro + max_norm) * R + norm2(b);
  p.meta.smoothness_L = 2 * (sfro + max_norm);
  p.meta.radius_R = R;
  p.meta.ebc_theta = 1;
  p.convex_per_sample = false;
  p.nearest_optimal = std::move(nearest_optimal);
  p.set = std::move(set);

  std::vector<Vec> atoms = z_atoms;
  std::vector<double> probs = z_probs;
  std::vector<Vec> Scopy = S;
  Vec bcopy = b;
  p.sample = [atoms, probs](Rng& rng) { return atoms[rng.categorical(probs)]; };
  p.loss = [Scopy, bcopy, d](const Vec& w, const Datum& z) {
    double r = 0, wz = 0;
    for (int i = 0; i < d; ++i) {
      wz += w[i] * z[i];
      r -= w[i] * bcopy[i];
      for (int j = 0; j < d; ++j) r += w[i] * Scopy[i][j] * w[j];
    }
    return r - wz * wz;
  };
  p.subgradient = [Scopy, bcopy, d](const Vec& w, const Datum& z) {
    double wz = 0;
    for (int i = 0; i < d; ++i) wz += w[i] * z[i];
    Vec g(d);
    for (int i = 0; i < d; ++i) {
      g[i] = -bcopy[i] - 2 * wz * z[i];
      for (int j = 0; j < d; ++j) g[i] += 2 * Scopy[i][j] * w[j];
    }
    return g;
  };
  p.risk = [M, bcopy, d](const Vec& w) {
    double r = 0;
    for (int i = 0; i < d; ++i) {
      r -= w[i] * bcopy[i];
      for (int j = 0; j < d; ++j) r += w[i] * M[i][j] * w[j];
    }
    return r;
  };
  return p;
}

StochasticProblem make_l1_regularized(StochasticProblem base, double lambda,
                                      std::function<Vec(const Vec&)> nearest_optimal,
                                      double ebc_alpha) {
  if (lambda < 0) throw std::invalid_argument("make_l1_regularized: lambda < 0");
  if (!base.has_risk())
    throw std::invalid_argument("make_l1_regularized: base needs closed-form risk");
  StochasticProblem p = std::move(base);
  p.name += "+l1";
  p.meta.l1_lambda = lambda;
  p.meta.ebc_theta = 1;
  p.meta.ebc_alpha = ebc_alpha;
  if (nearest_optimal) p.nearest_optimal = std::move(nearest_optimal);
  auto base_risk = p.risk;
  p.risk = [base_risk, lambda](const Vec& w) { return base_risk(w) + lambda * norm1(w); };
  // risk_min must be recomputed by the caller via meta patching when the
  // regularizer moves the optimum; the registry instances keep W* fixed.
  if (p.has_optimal_set()) {
    Vec wstar = p.nearest_optimal(zeros(p.meta.dim));
    p.meta.risk_min = p.risk(wstar);
  }
  return p;
}

StochasticProblem make_pnorm_composite(StochasticProblem base, double lambda, int p_exp,
                                       std::function<Vec(const Vec&)> nearest_optimal,
                                       double ebc_alpha) {
  if (lambda < 0) throw std::invalid_argument("make_pnorm_composite: lambda < 0");
  if (p_exp < 2 || p_exp % 2 != 0)
    throw std::invalid_argument("make_pnorm_composite: p must be an even integer >= 2");
  StochasticProblem p = std::move(base);
  p.name += "+p" + std::to_string(p_exp);
  p.meta.ebc_theta = 2.0 / p_exp;
  p.meta.ebc_alpha = ebc_alpha;
  if (nearest_optimal) p.nearest_optimal = std::move(nearest_optimal);

  auto pen = [lambda, p_exp](const Vec& w) {
    double s = 0;
    for (double v : w) s += std::pow(std::abs(v), p_exp);
    return lambda * s;
  };
  auto base_risk = p.risk;
  p.risk = [base_risk, pen](const Vec& w) { return base_risk(w) + pen(w); };
  auto base_loss = p.loss;
  p.loss = [base_loss, pen](const Vec& w, const Datum& z) {
    return base_loss(w, z) + pen(w);
  };
  auto base_grad = p.subgradient;
  p.subgradient = [base_grad, lambda, p_exp](const Vec& w, const Datum& z) {
    Vec g = base_grad(w, z);
    for (std::size_t i = 0; i < w.size(); ++i)
      g[i] += lambda * p_exp * std::pow(std::abs(w[i]), p_exp - 1) * sgn(w[i]);
    return g;
  };
  // Lipschitz constant picks up the penalty gradient, bounded on W by the
  // coordinate-wise sup.
  double wmax = 0;
  if (p.set.kind == SetKind::Box || p.set.kind == SetKind::NonnegativeBox) {
    for (int i = 0; i < p.set.dim; ++i)
      wmax = std::max(wmax, std::max(std::abs(p.set.lower[i]), std::abs(p.set.upper[i])));
  } else {
    wmax = p.set.radius + norm_inf(p.set.center);
  }
  p.meta.lipschitz_G += lambda * p_exp * std::pow(wmax, p_exp - 1) * std::sqrt(double(p.meta.dim));
  if (p.has_optimal_set()) {
    Vec wstar = p.nearest_optimal(zeros(p.meta.dim));
    p.meta.risk_min = p.risk(wstar);
  }
  return p;
}

StochasticProblem make_newsvendor(const Vec& c, const std::vector<NewsvendorAtom>& atoms,
                                  FeasibleSet set,
                                  std::function<Vec(const Vec&)> nearest_optimal,
                                  double risk_min, double ebc_alpha) {
  if (atoms.empty()) throw std::invalid_argument("make_newsvendor: empty demand support");
  int d = set.dim;
  if (int(c.size()) != d) throw std::invalid_argument("make_newsvendor: cost dimension");
  for (const auto& a : atoms) {
    if (a.pieces.empty()) throw std::invalid_argument("make_newsvendor: atom without pieces");
    for (const auto& [slope, icpt] : a.pieces) {
      (void)icpt;
      if (int(slope.size()) != d)
        throw std::invalid_argument("make_newsvendor: piece dimension");
    }
  }

  double G = norm2(c);
  double maxslope = 0;
  for (const auto& a : atoms)
    for (const auto& [slope, icpt] : a.pieces) {
      (void)icpt;
      maxslope = std::max(maxslope, norm2(slope));
    }
  G += maxslope;

  StochasticProblem p;
  p.name = "newsvendor";
  p.meta.dim = d;
  p.meta.lipschitz_G = G;
  p.meta.radius_R = set.enclosing_radius();
  p.meta.risk_min = risk_min;
  p.meta.ebc_theta = 1;
  p.meta.ebc_alpha = ebc_alpha;
  p.nearest_optimal = std::move(nearest_optimal);
  p.set = std::move(set);

  // Datum layout: the atom index.
  std::vector<double> probs;
  for (const auto& a : atoms) probs.push_back(a.prob);
  auto atoms_copy = atoms;
  Vec cc = c;
  auto profit = [atoms_copy](const Vec& x, int a) {
    double best = 1e300;
    for (const auto& [slope, icpt] : atoms_copy[a].pieces)
      best = std::min(best, dot(slope, x) + icpt);
    return best;
  };
  p.sample = [probs](Rng& rng) { return Datum{double(rng.categorical(probs))}; };
  p.loss = [cc, profit](const Vec& x, const Datum& z) {
    return dot(cc, x) - profit(x, int(z[0]));
  };
  p.subgradient = [cc, atoms_copy](const Vec& x, const Datum& z) {
    const auto& pieces = atoms_copy[int(z[0])].pieces;
    std::size_t best = 0;
    double bestv = 1e300;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      double v = dot(pieces[i].first, x) + pieces[i].second;
      if (v < bestv) {
        bestv = v;
        best = i;
      }
    }
    Vec g = cc;
    axpy(-1.0, pieces[best].first, g);
    return g;
  };
  double total = 0;
  for (double q : probs) total += q;
  p.risk = [cc, probs, profit, total](const Vec& x) {
    double r = dot(cc, x);
    for (std::size_t a = 0; a < probs.size(); ++a)
      r -= probs[a] / total * profit(x, int(a));
    return r;
  };
  return p;
}

Vec sample_feasible(const FeasibleSet& set, Rng& rng) {
  int d = set.dim;
  switch (set.kind) {
    case SetKind::Box:
    case SetKind::NonnegativeBox: {
      Vec w(d);
      for (int i = 0; i < d; ++i) w[i] = rng.uniform(set.lower[i], set.upper[i]);
      return w;
    }
    case SetKind::L2Ball: {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = rng.normal();
      double n = norm2(v);
      if (n == 0) return set.center;
      double r = set.radius * std::pow(rng.uniform(), 1.0 / d);
      Vec w = set.center;
      axpy(r / n, v, w);
      return w;
    }
    case SetKind::L1Ball: {
      // uniform over the l1 ball: exponential spacings give a uniform
      // simplex point, then random signs and a radial factor
      Vec e(d);
      double s = 0;
      for (int i = 0; i < d; ++i) {
        double u = rng.uniform();
        while (u <= 0) u = rng.uniform();
        e[i] = -std::log(u);
        s += e[i];
      }
      double r = set.radius * std::pow(rng.uniform(), 1.0 / d);
      Vec w = set.center;
      for (int i = 0; i < d; ++i)
        w[i] += (rng.bernoulli(0.5) ? 1 : -1) * r * e[i] / s;
      return w;
    }
  }
  return zeros(d);
}

void validate_instance(const StochasticProblem& p, Rng& rng, int n_points,
                       int n_samples) {
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("instance '" + p.name + "' failed validation: " + what);
  };
  for (int i = 0; i < n_points; ++i) {
    Vec w = sample_feasible(p.set, rng);
    if (p.has_risk() && p.has_optimal_set()) {
      double exc = p.excess(w);
      if (exc < -1e-9) fail("risk below risk_min");
      double dd = p.distance_to_optimal(w);
      if (dd * dd > p.meta.ebc_alpha * std::pow(std::max(exc, 0.0), p.meta.ebc_theta) + 1e-9)
        fail("EBC violated at a sampled point");
    }
    Vec u = sample_feasible(p.set, rng);
    Datum z = p.sample(rng);
    if (std::abs(p.loss(w, z) - p.loss(u, z)) >
        p.meta.lipschitz_G * dist2(w, u) + 1e-9)
      fail("Lipschitz bound violated");
    Vec g = p.subgradient(w, z);
    if (norm2(g) > p.meta.lipschitz_G + 1e-9) fail("subgradient norm exceeds G");
    if (p.convex_per_sample) {
      double lhs = p.loss(u, z);
      double rhs = p.loss(w, z) + dot(g, sub(u, w));
      if (lhs < rhs - 1e-9) fail("subgradient inequality violated");
    }
  }
  if (p.has_risk()) {
    for (int rep = 0; rep < 4; ++rep) {
      Vec w = sample_feasible(p.set, rng);
      double mean = 0, m2 = 0;
      for (int i = 0; i < n_samples; ++i) {
        Datum z = p.sample(rng);
        double v = p.loss(w, z) + p.regularizer_value(w);
        double delta = v - mean;
        mean += delta / (i + 1);
        m2 += delta * (v - mean);
      }
      double se = std::sqrt(m2 / n_samples / std::max(1, n_samples - 1));
      if (std::abs(mean - p.risk(w)) > 4 * se + 1e-7)
        fail("Monte-Carlo risk mismatch");
    }
  }
}

// ---------------------------------------------------------------------------
// registry

static StochasticProblem make_square2pt(bool zero_noise) {
  FiniteXYDistribution dist;
  dist.xs = {{1.0}, {1.0}};
  dist.ys = zero_noise ? Vec{0.0, 0.0} : Vec{-1.0, 1.0};
  dist.probs = {0.5, 0.5};
  auto p = make_least_squares(1, dist, FeasibleSet::linf_ball(1, 1),
                              [](const Vec&) { return Vec{0.0}; });
  p.name = zero_noise ? "square2pt-zero" : "square2pt";
  p.meta.ebc_alpha = 1;       // dist^2 = w^2 = excess
  p.meta.risk_min = zero_noise ? 0.0 : 1.0;
  return p;
}

static StochasticProblem make_hinge5() {
  auto p = make_hinge(5, {0.18, -0.15, 0.12, -0.09, 0.06},
                      FeasibleSet::linf_ball(5, 1));
  p.name = "hinge5";
  return p;
}

static StochasticProblem make_shiftquad2() {
  std::vector<Vec> S = {{1, 0}, {0, 1}};
  std::vector<Vec> atoms = {{0, 0}, {std::sqrt(2.0), 0}};
  auto p = make_shifted_quadratic(S, atoms, {0.5, 0.5}, {0, 0},
                                  FeasibleSet::linf_ball(2, 1), [](const Vec& w) {
                                    return Vec{std::clamp(w[0], -1.0, 1.0), 0.0};
                                  });
  p.name = "shiftquad2";
  p.meta.ebc_alpha = 1;  // dist^2 = w2^2 = excess
  p.meta.risk_min = 0;
  return p;
}

static StochasticProblem make_l1reg1d() {
  auto p = make_l1_regularized(make_square2pt(false), 0.5,
                               [](const Vec&) { return Vec{0.0}; }, 1.0);
  p.name = "l1reg1d";
  return p;
}

static StochasticProblem make_newsvendor1() {
  // profit min(x, z), demand z in {1, 2} equiprobable, cost 0.5, x in [0, 3].
  // P is flat at -0.5 on [1, 2], so W* = [1, 2].
  std::vector<NewsvendorAtom> atoms(2);
  atoms[0] = {0.5, {{{1.0}, 0.0}, {{0.0}, 1.0}}};
  atoms[1] = {0.5, {{{1.0}, 0.0}, {{0.0}, 2.0}}};
  auto p = make_newsvendor({0.5}, atoms, FeasibleSet::nonneg_box({3.0}),
                           [](const Vec& w) { return Vec{std::clamp(w[0], 1.0, 2.0)}; },
                           -0.5, 2.0);
  p.name = "newsvendor1";
  return p;
}

static StochasticProblem make_pnorm4() {
  // base: zero-mean but skewed linear noise, risk identically 0 on [-1, 1];
  // the skew keeps iterate averaging from collapsing the quartic's
  // fluctuations by symmetry
  StochasticProblem base;
  base.name = "zero-linear";
  base.set = FeasibleSet::linf_ball(1, 1);
  base.meta.dim = 1;
  base.meta.lipschitz_G = 2;
  base.meta.radius_R = 1;
  base.meta.risk_min = 0;
  base.sample = [](Rng& rng) { return Datum{rng.bernoulli(1.0 / 3.0) ? 2.0 : -1.0}; };
  base.loss = [](const Vec& w, const Datum& z) { return z[0] * w[0]; };
  base.subgradient = [](const Vec&, const Datum& z) { return Vec{z[0]}; };
  base.risk = [](const Vec&) { return 0.0; };
  auto p = make_pnorm_composite(std::move(base), 1.0, 4,
                                [](const Vec&) { return Vec{0.0}; }, 1.0);
  p.name = "pnorm4";
  p.meta.risk_min = 0;
  return p;
}

const std::vector<std::string>& registry_ids() {
  static const std::vector<std::string> ids = {
      "square2pt", "hinge5", "shiftquad2", "l1reg1d", "newsvendor1", "pnorm4",
      "square2pt-zero"};
  return ids;
}

StochasticProblem make_registry_problem(const std::string& id) {
  StochasticProblem p;
  if (id == "square2pt") p = make_square2pt(false);
  else if (id == "square2pt-zero") p = make_square2pt(true);
  else if (id == "hinge5") p = make_hinge5();
  else if (id == "shiftquad2") p = make_shiftquad2();
  else if (id == "l1reg1d") p = make_l1reg1d();
  else if (id == "newsvendor1") p = make_newsvendor1();
  else if (id == "pnorm4") p = make_pnorm4();
  else throw std::invalid_argument("unknown problem id: " + id);
  Rng rng(0xEBC0);
  validate_instance(p, rng);
  return p;
}

}  // namespace ebcopt
