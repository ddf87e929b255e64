#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ebcopt/geometry.hpp"
#include "ebcopt/problems.hpp"
#include "ebcopt/rng.hpp"

using namespace ebcopt;

namespace {

// independent projection oracles, one different algorithm per set kind
Vec oracle_project(const FeasibleSet& s, const Vec& x) {
  switch (s.kind) {
    case SetKind::Box:
    case SetKind::NonnegativeBox: {
      Vec y(x.size());
      for (size_t i = 0; i < x.size(); ++i)
        y[i] = std::min(s.upper[i], std::max(s.lower[i], x[i]));
      return y;
    }
    case SetKind::L2Ball: {
      Vec d = sub(x, s.center);
      double n = norm2(d);
      if (n <= s.radius) return x;
      Vec y = s.center;
      axpy(s.radius / n, d, y);
      return y;
    }
    case SetKind::L1Ball: {
      Vec d = sub(x, s.center);
      if (norm1(d) <= s.radius) return x;
      // bisection on the soft-threshold level (not the sort-based method)
      double lo = 0, hi = norm_inf(d);
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi), sum = 0;
        for (double v : d) sum += std::max(0.0, std::abs(v) - mid);
        (sum > s.radius ? lo : hi) = mid;
      }
      double lam = 0.5 * (lo + hi);
      Vec y = s.center;
      for (size_t i = 0; i < d.size(); ++i)
        y[i] += sgn(d[i]) * std::max(0.0, std::abs(d[i]) - lam);
      return y;
    }
  }
  return x;
}

Vec random_point(int d, Rng& rng, double scale) {
  Vec x(d);
  for (double& v : x) v = rng.uniform(-scale, scale);
  return x;
}

double scalar_prox_oracle(double x, double t, double lo, double hi) {
  // coarse grid then ternary refinement of 1/2 (w-x)^2 + t|w|
  auto f = [&](double w) { return 0.5 * (w - x) * (w - x) + t * std::abs(w); };
  double best = lo, bw = f(lo);
  for (double w = lo; w <= hi; w += 1e-3) {
    double v = f(w);
    if (v < bw) {
      bw = v;
      best = w;
    }
  }
  double a = std::max(lo, best - 2e-3), b = std::min(hi, best + 2e-3);
  for (int it = 0; it < 200; ++it) {
    double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(m1) < f(m2))
      b = m2;
    else
      a = m1;
  }
  return 0.5 * (a + b);
}

// scalar link functions, written independently of the library versions
Vec scalar_to_dual(const Vec& w, double q) {
  double n = 0;
  for (double v : w) n += std::pow(std::abs(v), q);
  n = std::pow(n, 1.0 / q);
  Vec th(w.size(), 0.0);
  if (n == 0) return th;
  for (size_t i = 0; i < w.size(); ++i)
    th[i] = sgn(w[i]) * std::pow(std::abs(w[i]), q - 1) * std::pow(n, 2.0 - q);
  return th;
}

}  // namespace

TEST_CASE("projection pinned values") {
  auto b2 = FeasibleSet::l2_ball(2, 1.0);
  CHECK(dist2(project(b2, {0.3, 0.4}), Vec{0.3, 0.4}) < 1e-12);
  CHECK(dist2(project(b2, {3, 4}), Vec{0.6, 0.8}) < 1e-12);
  auto l1 = FeasibleSet::l1_ball(2, 1.0);
  CHECK(dist2(project(l1, {3, 1}), Vec{1, 0}) < 1e-9);
}

TEST_CASE("projection equals independent oracle, all kinds, d in 1..5") {
  Rng rng(101);
  for (int d = 1; d <= 5; ++d) {
    std::vector<FeasibleSet> sets = {
        FeasibleSet::l2_ball(d, 1.3), FeasibleSet::l1_ball(d, 0.8),
        FeasibleSet::box(Vec(d, -0.7), Vec(d, 1.1)), FeasibleSet::nonneg_box(Vec(d, 2.0))};
    for (const auto& s : sets)
      for (int i = 0; i < 1000; ++i) {
        Vec x = random_point(d, rng, 3.0);
        Vec p = project(s, x);
        CHECK(s.contains(p, 1e-9));
        CHECK((dist2(p, oracle_project(s, x))) <= 1e-6);
        // idempotence
        CHECK(dist2(project(s, p), p) < 1e-12);
      }
  }
}

TEST_CASE("projection optimality and nonexpansiveness") {
  Rng rng(7);
  std::vector<FeasibleSet> sets = {FeasibleSet::l2_ball(3, 1.0),
                                   FeasibleSet::l1_ball(3, 1.0),
                                   FeasibleSet::box(Vec(3, -1.0), Vec(3, 1.0))};
  for (const auto& s : sets) {
    for (int i = 0; i < 200; ++i) {
      Vec x = random_point(3, rng, 2.5);
      Vec p = project(s, x);
      for (int j = 0; j < 20; ++j) {
        Vec y = sample_feasible(s, rng);
        CHECK(dist2(p, x) <= dist2(y, x) + 1e-9);
      }
      Vec x2 = random_point(3, rng, 2.5);
      CHECK((dist2(project(s, x2), p)) <=
            (dist2(x2, x)) + 1e-9);
    }
  }
}

TEST_CASE("ball cap projection") {
  auto box = FeasibleSet::box(Vec(2, -1.0), Vec(2, 1.0));
  BallCap cap{box, {0.0, 0.0}, 0.5};
  Vec p = project_cap(cap, {3, 0});
  CHECK((dist2(p, Vec{0.5, 0})) < 1e-6);

  SUBCASE("inside the cap is fixed") {
    Vec q = project_cap(cap, {0.1, -0.2});
    CHECK(dist2(q, Vec{0.1, -0.2}) < 1e-12);
  }
  SUBCASE("inactive cap equals base projection") {
    BallCap wide{box, {0.0, 0.0}, 10.0};
    Vec x{2.2, -3.0};
    CHECK(dist2(project_cap(wide, x), project(box, x)) < 1e-12);
  }
  SUBCASE("radius zero degenerates to the center") {
    BallCap pt{box, {0.25, 0.5}, 0.0};
    CHECK(dist2(project_cap(pt, {3, 3}), Vec{0.25, 0.5}) < 1e-12);
  }
  SUBCASE("feasible for both and distance-optimal") {
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
      Vec x = random_point(2, rng, 3.0);
      Vec y = project_cap(cap, x);
      CHECK(box.contains(y, 1e-8));
      CHECK(dist2(y, cap.cap_center) <= cap.cap_radius + 1e-8);
      for (int j = 0; j < 200; ++j) {
        Vec z = random_point(2, rng, 1.0);
        if (!cap.contains(z, 0)) continue;
        CHECK(dist2(y, x) <= dist2(z, x) + 1e-9);
      }
    }
  }
  SUBCASE("grid oracle, resolution 1e-4 near the answer") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
      Vec x = random_point(2, rng, 2.0);
      Vec y = project_cap(cap, x);
      double best = 1e300;
      for (double a = -0.51; a <= 0.51; a += 1e-4)
        for (double b = -0.51; b <= 0.51; b += 2e-3) {
          Vec z{a, b};
          if (!cap.contains(z, 0)) continue;
          best = std::min(best, dist2(z, x));
        }
      // grid positions are coarse; compare achieved distances, not argmins
      CHECK(dist2(y, x) <= best + 1e-3);
    }
  }
}

TEST_CASE("prox_l1") {
  auto box = FeasibleSet::box(Vec(2, -1.0), Vec(2, 1.0));
  Vec p = prox_l1({0.9, -0.2}, 0.3, box);
  CHECK(dist2(p, Vec{0.6, 0.0}) < 1e-12);
  CHECK(dist2(prox_l1({0.5, -2.0}, 0.0, box), project(box, {0.5, -2.0})) < 1e-12);
  CHECK(dist2(prox_l1({0, 0}, 0.7, box), Vec{0.0, 0.0}) < 1e-12);

  SUBCASE("per-coordinate grid oracle on boxes") {
    Rng rng(3);
    auto b = FeasibleSet::box(Vec(4, -0.6), Vec(4, 1.2));
    for (int i = 0; i < 25; ++i) {
      Vec x = random_point(4, rng, 2.0);
      double t = rng.uniform(0.0, 0.8);
      Vec y = prox_l1(x, t, b);
      for (int j = 0; j < 4; ++j)
        CHECK(std::abs(y[j] - scalar_prox_oracle(x[j], t, -0.6, 1.2)) <= 1e-6);
    }
  }
}

TEST_CASE("p-norm mirror step") {
  SUBCASE("zero gradient is a fixed point") {
    Vec w{0.3, -0.5};
    Vec r = mirror_step_pnorm(w, {0, 0}, 0.7, 4.0, nullptr);
    CHECK((dist2(r, w)) < 1e-12);
  }
  SUBCASE("p=2 is the Euclidean step") {
    Rng rng(9);
    auto ball = FeasibleSet::l2_ball(3, 1.0);
    for (int i = 0; i < 1000; ++i) {
      Vec w = sample_feasible(ball, rng);
      Vec g = random_point(3, rng, 1.0);
      double step = rng.uniform(0.01, 0.5);
      Vec a = mirror_step_pnorm(w, g, step, 2.0, &ball);
      Vec e = w;
      axpy(-step, g, e);
      e = project(ball, e);
      CHECK((dist2(a, e)) <= 1e-10);
    }
  }
  SUBCASE("p=4 step from the origin") {
    Vec r = mirror_step_pnorm({0, 0}, {1, 0}, 1.0, 4.0, nullptr);
    CHECK((dist2(r, Vec{-1, 0})) < 1e-12);
  }
  SUBCASE("matches scalar link oracle") {
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
      Vec w = random_point(2, rng, 1.0);
      Vec g = random_point(2, rng, 1.0);
      double step = rng.uniform(0.01, 0.5);
      double p = 4.0, q = p / (p - 1.0);
      Vec th = scalar_to_dual(w, q);
      axpy(-step, g, th);
      Vec back = scalar_to_dual(th, p);  // the inverse link is the p-norm link
      Vec lib = mirror_step_pnorm(w, g, step, p, nullptr);
      CHECK((dist2(lib, back)) < 1e-9);
    }
  }
  SUBCASE("p < 2 rejected") {
    CHECK_THROWS(mirror_step_pnorm({0.0}, {1.0}, 0.1, 1.5, nullptr));
  }
}

TEST_CASE("dimension mismatch is a hard error") {
  auto b = FeasibleSet::l2_ball(2, 1.0);
  CHECK_THROWS(project(b, {1.0, 2.0, 3.0}));
}
