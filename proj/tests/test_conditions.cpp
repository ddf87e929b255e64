#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebcopt/conditions.hpp"

using namespace ebcopt;

TEST_CASE("kappa") {
  CHECK(kappa(0.0) == doctest::Approx(0.5));
  CHECK(kappa(1.0) == doctest::Approx(std::exp(1.0) - 2.0));
  CHECK(kappa(1e-9) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(kappa(-1.0) == doctest::Approx(std::exp(-1.0)));  // (1/e + 1 - 1 - ... )
  // both branches agree with the series value near the switchover
  CHECK(kappa(1.001e-5) == doctest::Approx(0.5 + 1.001e-5 / 6.0).epsilon(1e-9));
  CHECK(kappa(0.999e-5) == doctest::Approx(0.5 + 0.999e-5 / 6.0).epsilon(1e-9));
}

TEST_CASE("ebc estimation on the quadratic instance") {
  auto p = make_registry_problem("square2pt");
  Rng rng(42);
  auto pts = ebc_point_source(p, 2000, rng);
  auto est = estimate_ebc(p, pts, default_theta_grid(), 1e-6, 10.0);
  CHECK(est.admitted >= 100);
  CHECK(est.recommended_theta == doctest::Approx(1.0));
  // dist^2 = excess exactly, so the envelope at theta = 1 is exactly 1
  size_t last = est.theta_grid.size() - 1;
  CHECK(est.theta_grid[last] == doctest::Approx(1.0));
  CHECK(est.alpha_hat[last] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.witnesses.size() == est.theta_grid.size());
}

TEST_CASE("ebc estimation on the quartic instance") {
  auto p = make_registry_problem("pnorm4");
  Rng rng(7);
  auto pts = ebc_point_source(p, 4000, rng);
  auto est = estimate_ebc(p, pts, default_theta_grid(), 1e-6, 1.5);
  CHECK(est.recommended_theta == doctest::Approx(0.5));
  // alpha_hat at theta = 0.5 is ~1 (dist^2 = sqrt(excess) exactly); at
  // theta = 1 the small-excess points blow the envelope past the cap
  auto grid = est.theta_grid;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - 0.5) < 1e-12) CHECK(est.alpha_hat[i] <= 1.0 + 1e-6);
    if (std::abs(grid[i] - 1.0) < 1e-12) CHECK(est.alpha_hat[i] > 1.5);
  }
}

TEST_CASE("estimator admission control") {
  auto p = make_registry_problem("square2pt");
  std::vector<Vec> few(50, Vec{0.5});
  CHECK_THROWS(estimate_ebc(p, few, default_theta_grid(), 1e-6, 10.0));
}

TEST_CASE("check_ebc violation reporting") {
  auto p = make_registry_problem("square2pt");
  Rng rng(3);
  auto pts = ebc_point_source(p, 500, rng);
  CHECK(check_ebc(p, 1.0, 1.0, pts).empty());  // holds with equality
  auto viol = check_ebc(p, 1.0, 0.5, pts);     // alpha too small
  CHECK(!viol.empty());
  for (const auto& v : viol) CHECK(v.margin > 0);
  SUBCASE("optimal points never violate") {
    std::vector<Vec> opt(200, Vec{0.0});
    CHECK(check_ebc(p, 0.3, 0.1, opt).empty());
  }
}

TEST_CASE("bernstein condition on square2pt") {
  auto p = make_registry_problem("square2pt");
  // closed form at w = 1: f(w,z) - f(0,z) = w^2 - 2wy with y = +-1, so the
  // squared gap has mean 1 + 4 = 5; default B = G^2 alpha = 16, excess = 1
  Rng rng(11);
  auto rep = check_bernstein(p, {1.0}, 1.0, 0.0, 200000, rng);
  CHECK(rep.pass);
  CHECK(!rep.trivial);
  CHECK(rep.param == doctest::Approx(16.0));
  CHECK(rep.lhs == doctest::Approx(5.0).epsilon(0.02));
  CHECK(rep.rhs == doctest::Approx(16.0).epsilon(0.02));
  SUBCASE("a too-small B fails") {
    Rng rg(12);
    auto bad = check_bernstein(p, {1.0}, 1.0, 4.0, 200000, rg);
    CHECK(!bad.pass);
  }
  SUBCASE("optimal point is a trivial pass") {
    Rng rg(13);
    auto t = check_bernstein(p, {0.0}, 1.0, 0.0, 1000, rg);
    CHECK(t.pass);
    CHECK(t.trivial);
  }
}

TEST_CASE("bernstein condition holds across convex instances") {
  Rng rng(21);
  for (const auto& id : {"square2pt", "hinge5", "l1reg1d", "newsvendor1"}) {
    auto p = make_registry_problem(id);
    for (int i = 0; i < 10; ++i) {
      Vec w = sample_feasible(p.set, rng);
      auto rep = check_bernstein(p, w, p.meta.ebc_theta, 0.0, 40000, rng);
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("central condition") {
  auto p = make_registry_problem("square2pt");
  SUBCASE("optimal point passes") {
    Rng rng(31);
    auto rep = check_central(p, {0.0}, 0.1, 0.05, 20000, rng);
    CHECK(rep.pass);
  }
  SUBCASE("eta is independent of epsilon when theta = 1") {
    Rng r1(32), r2(33);
    auto a = check_central(p, {0.5}, 0.05, 0.05, 5000, r1);
    auto b = check_central(p, {0.5}, 0.2, 0.05, 5000, r2);
    CHECK(a.param == doctest::Approx(b.param));
    CHECK(a.param <= 0.05 + 1e-15);  // min(c, b) with b = 0.05
  }
  SUBCASE("holds at sampled feasible points") {
    Rng rng(34);
    for (int i = 0; i < 20; ++i) {
      Vec w = sample_feasible(p.set, rng);
      auto rep = check_central(p, w, 0.1, 0.05, 40000, rng);
      CHECK(rep.pass);
    }
  }
}
