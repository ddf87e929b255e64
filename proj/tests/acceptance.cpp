// End-to-end acceptance gate: one pass/fail line per criterion.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ebcopt/bench.hpp"
#include "ebcopt/conditions.hpp"
#include "ebcopt/erm.hpp"
#include "ebcopt/solvers.hpp"

using namespace ebcopt;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int num, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", num, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// --- criterion 1: geometry oracle equivalence --------------------------------

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

void criterion1() {
  Rng rng(0xC1);
  double worst = 0;
  bool cap_ok = true;
  for (int d = 1; d <= 5; ++d) {
    std::vector<FeasibleSet> sets = {
        FeasibleSet::l2_ball(d, 1.3), FeasibleSet::l1_ball(d, 0.8),
        FeasibleSet::box(Vec(d, -0.7), Vec(d, 1.1)), FeasibleSet::nonneg_box(Vec(d, 2.0))};
    for (const auto& s : sets)
      for (int i = 0; i < 1000; ++i) {
        Vec x(d);
        for (double& v : x) v = rng.uniform(-3.0, 3.0);
        worst = std::max(worst, dist2(project(s, x), oracle_project(s, x)));
      }
    // ball-cap feasibility
    auto base = FeasibleSet::box(Vec(d, -1.0), Vec(d, 1.0));
    for (int i = 0; i < 200; ++i) {
      Vec c(d), x(d);
      for (double& v : c) v = rng.uniform(-1.0, 1.0);
      for (double& v : x) v = rng.uniform(-3.0, 3.0);
      BallCap cap{base, c, rng.uniform(0.1, 1.5)};
      Vec y = project_cap(cap, x);
      if (!cap.contains(y, 1e-8)) cap_ok = false;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max projection deviation %.2e, cap feasibility %s",
                worst, cap_ok ? "ok" : "violated");
  report(1, "geometry oracle equivalence", worst <= 1e-6 && cap_ok, buf);
}

// --- criterion 2: schedule exactness -----------------------------------------

void criterion2() {
  struct Want {
    long long n, m, n0;
  };
  bool ok = true;
  std::string detail;
  for (Want w : {Want{100, 1, 100}, Want{1000, 2, 500}, Want{1000000, 7, 142857}}) {
    auto s = StageSchedule::make(w.n, 2.0, 4.0, StepRule::Asa);
    long long m_ref = (long long)std::floor(
                          0.5L * std::log2(2.0L * (long double)w.n /
                                           std::log2((long double)w.n))) -
                      1;
    bool row = s.m == w.m && s.n0 == w.n0 && s.m == m_ref;
    for (size_t k = 0; row && k < s.steps.size(); ++k) {
      double gamma_ref = s.radii[k] / (4.0 * std::sqrt(double(s.n0 + 1)));
      if (s.steps[k] != gamma_ref) row = false;
      if (k > 0 && s.radii[k] != s.radii[k - 1] * 0.5) row = false;
    }
    if (!row) ok = false;
    detail += "n=" + std::to_string(w.n) + "->(" + std::to_string(s.m) + "," +
              std::to_string(s.n0) + ") ";
  }
  report(2, "stage schedule exactness", ok, detail);
}

// --- criteria 3 / 4: adaptivity rate bands -----------------------------------

RateFit slope_study(const std::string& problem_id,
                    const std::vector<AlgorithmSpec>& algs, const std::string& alg,
                    uint64_t base_seed) {
  ExperimentConfig c;
  c.problem.registry_id = problem_id;
  c.algorithms = algs;
  c.n_grid = {1000, 10000, 100000, 1000000};
  c.replicates = 20;
  c.base_seed = base_seed;
  c.metric = "excess_risk";
  auto r = run_experiment(c, 8, false);
  return fit_rate(r.rows, alg);
}

void criterion3() {
  bool ok = true;
  std::string detail;
  for (const char* id : {"square2pt", "hinge5"}) {
    ExperimentConfig c;
    c.problem.registry_id = id;
    c.algorithms = {{"asa", {}}, {"ssg", {}}};
    c.n_grid = {1000, 10000, 100000, 1000000};
    c.replicates = 20;
    c.base_seed = 1;
    c.metric = "excess_risk";
    auto r = run_experiment(c, 8, false);
    double asa_slope = fit_rate(r.rows, "asa").slope;
    double ssg_slope = fit_rate(r.rows, "ssg").slope;
    bool asa_ok = asa_slope <= -0.8;
    bool ssg_ok = ssg_slope >= -0.62 && ssg_slope <= -0.38;
    if (!asa_ok || !ssg_ok) ok = false;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: asa %.3f (want <= -0.8, %s), ssg %.3f (want [-0.62,-0.38], %s); ",
                  id, asa_slope, asa_ok ? "ok" : "OUT", ssg_slope, ssg_ok ? "ok" : "OUT");
    detail += buf;
  }
  report(3, "theta=1 adaptivity slopes", ok, detail);
}

void criterion4() {
  auto fit = slope_study("pnorm4", {{"asa", {}}}, "asa", 1);
  bool ok = fit.slope >= -0.9 && fit.slope <= -0.45;
  char buf[96];
  std::snprintf(buf, sizeof buf, "asa slope %.3f, want [-0.9, -0.45]", fit.slope);
  report(4, "intermediate-theta adaptivity (p=4 composite)", ok, buf);
}

// --- criterion 5: high-probability bound -------------------------------------

void criterion5() {
  auto p = make_registry_problem("square2pt");
  const double R0 = 2.0, G = 4.0, delta = 0.1;
  const long long T = 10000;
  double bound = R0 * G * (1.0 + 4.0 * std::sqrt(2.0 * std::log(2.0 / delta))) /
                 std::sqrt(double(T + 1));
  double gamma = R0 / (G * std::sqrt(double(T + 1)));
  Domain dom = Domain::plain(p.set);
  int exceed = 0;
  for (int seed = 0; seed < 200; ++seed) {
    Rng rng = Rng::stream(0xB0B0, seed);
    Vec w1 = sample_feasible(p.set, rng);
    auto r = ssg(p, dom, w1, gamma, T, rng);
    if (p.excess(r.out) > bound) ++exceed;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "bound %.4f, exceedances %d/200 (allow <= 20)", bound,
                exceed);
  report(5, "high-probability excess bound", exceed <= 20, buf);
}

// --- criterion 6: EBC recovery -----------------------------------------------

void criterion6() {
  bool ok = true;
  std::string detail;
  for (const char* id :
       {"square2pt", "hinge5", "shiftquad2", "l1reg1d", "newsvendor1", "pnorm4"}) {
    auto p = make_registry_problem(id);
    Rng rng(0xEBC);
    auto pts = ebc_point_source(p, 100000, rng);
    auto est = estimate_ebc(p, pts, default_theta_grid(), 1e-6,
                            10.0 * p.meta.ebc_alpha);
    double err = std::abs(est.recommended_theta - p.meta.ebc_theta);
    if (err > 0.15 + 1e-9) ok = false;
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s %.2f/%.2f ", id, est.recommended_theta,
                  p.meta.ebc_theta);
    detail += buf;
  }
  report(6, "EBC recovery within +-0.15 (recommended/true)", ok, detail);
}

// --- criterion 7: Bernstein checker ------------------------------------------

void criterion7() {
  bool ok = true;
  std::string detail;
  Rng rng(0x7E57);
  for (const char* id : {"square2pt", "hinge5", "l1reg1d", "newsvendor1", "pnorm4"}) {
    auto p = make_registry_problem(id);
    int fails = 0;
    for (int i = 0; i < 100; ++i) {
      Vec w = sample_feasible(p.set, rng);
      auto rep = check_bernstein(p, w, p.meta.ebc_theta, 0.0, 20000, rng);
      if (!rep.pass) ++fails;
    }
    if (fails > 0) ok = false;
    detail += std::string(id) + (fails ? " FAIL " : " ok ");
  }
  // closed-form spot check at w = 1 on the two-point instance
  auto p = make_registry_problem("square2pt");
  Rng rg(0x5107);
  auto rep = check_bernstein(p, {1.0}, 1.0, 0.0, 400000, rg);
  bool spot = rep.pass && std::abs(rep.lhs - 5.0) <= 3.0 * rep.stderr_ + 1e-6 &&
              std::abs(rep.rhs - 16.0) <= 0.2;
  if (!spot) ok = false;
  char buf[96];
  std::snprintf(buf, sizeof buf, "spot lhs %.3f (5), rhs %.3f (16)", rep.lhs, rep.rhs);
  report(7, "relaxed Bernstein condition checker", ok, detail + buf);
}

// --- criterion 8: ERM rates --------------------------------------------------

void criterion8() {
  auto noisy = make_registry_problem("square2pt");
  auto zero = make_registry_problem("square2pt-zero");
  std::vector<long long> grid = {100, 400, 1600, 6400};
  auto rn = erm_rate_study(noisy, grid, 10, 1e-7, 2);
  auto rz = erm_rate_study(zero, grid, 10, 1e-9, 2);
  bool noisy_ok = rn.slope >= -1.3 && rn.slope <= -0.7;
  // directional check: the realizable variant must decay strictly faster.
  // When every zero-noise median sits at the solver floor the decay is
  // below any measurable slope, which satisfies the direction trivially.
  bool zero_floor = true;
  for (double m : rz.median_excess) zero_floor = zero_floor && m <= 1e-10;
  bool zero_ok = zero_floor || (!std::isnan(rz.slope) && rz.slope <= rn.slope - 0.3);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "noisy slope %.3f (want [-1.3,-0.7]); zero-noise %s (slope %.3f)",
                rn.slope, zero_floor ? "at solver floor" : "finite", rz.slope);
  report(8, "ERM excess-risk rates", noisy_ok && zero_ok, buf);
}

// --- criterion 9: sparse regression case study -------------------------------

std::vector<double> smooth(const std::vector<double>& v, int win) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    size_t lo = i >= size_t(win) ? i - win : 0;
    size_t hi = std::min(v.size() - 1, i + size_t(win));
    double s = 0;
    for (size_t j = lo; j <= hi; ++j) s += v[j];
    out[i] = s / double(hi - lo + 1);
  }
  return out;
}

void criterion9() {
  int asa_wins = 0;
  bool monotone_all = true;
  std::string detail;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig c;
    c.problem.synthetic = SyntheticDataSpec{75000, 1000, 10, 0.05, 0.1, 5};
    c.problem.loss = "square";
    c.problem.lambda = 0.01;
    c.problem.radius = 3.0;
    c.algorithms = {{"asa", {{"R0", 8.0}, {"G", 5.0}}},
                    {"psg", {{"gamma", 0.02}}},
                    {"smd", {{"gamma", 0.02}}},
                    {"sag", {}}};
    c.n_grid = {50000};
    c.replicates = 1;
    c.base_seed = seed;
    c.metric = "test_error";
    auto r = run_experiment(c, 4, false);
    double asa_err = 0, psg_err = 0;
    for (const auto& row : r.rows) {
      if (row.algorithm == "asa") asa_err = row.metric;
      if (row.algorithm == "psg") psg_err = row.metric;
    }
    if (asa_err <= psg_err) ++asa_wins;
    for (const auto& tr : r.traces) {
      std::vector<double> ys;
      for (const auto& tp : tr.points)
        if (std::isfinite(tp.eval)) ys.push_back(tp.eval);
      if (ys.size() < 3) continue;
      auto s = smooth(ys, 2);
      for (size_t i = 1; i < s.size(); ++i)
        if (s[i] > s[i - 1] * 1.01) monotone_all = false;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "s%llu asa %.4f psg %.4f; ",
                  (unsigned long long)seed, asa_err, psg_err);
    detail += buf;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "asa wins %d/5 (need >= 4), curves %s", asa_wins,
                monotone_all ? "monotone" : "NON-MONOTONE");
  report(9, "sparse l1 case-study ordering", asa_wins >= 4 && monotone_all,
         detail + buf);
}

// --- criterion 10: determinism and one-pass budget ---------------------------

std::string slurp_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::ostringstream all;
  for (const auto& f : files) {
    std::ifstream in(f);
    all << f.filename().string() << "\n" << in.rdbuf() << "\n";
  }
  return all.str();
}

void criterion10() {
  ExperimentConfig c;
  c.problem.registry_id = "hinge5";
  c.algorithms = {{"asa", {}}, {"asa2", {}}, {"ssg", {}}};
  c.n_grid = {1000, 5000};
  c.replicates = 3;
  c.base_seed = 77;
  c.metric = "excess_risk";

  c.out_dir = "/tmp/acc10_a";
  fs::remove_all(c.out_dir);
  auto r1 = run_experiment(c, 1);
  c.out_dir = "/tmp/acc10_b";
  fs::remove_all(c.out_dir);
  auto r2 = run_experiment(c, 8);

  bool identical = slurp_dir("/tmp/acc10_a") == slurp_dir("/tmp/acc10_b");

  // third run into the first directory again: rerun byte-stability on disk
  c.out_dir = "/tmp/acc10_c";
  fs::remove_all(c.out_dir);
  run_experiment(c, 3);
  bool rerun = slurp_dir("/tmp/acc10_b") == slurp_dir("/tmp/acc10_c");

  bool budget = true;
  for (const auto& row : r1.rows)
    if (row.algorithm.rfind("asa", 0) == 0 && row.samples_used > row.n) budget = false;
  for (const auto& row : r2.rows)
    if (row.algorithm.rfind("asa", 0) == 0 && row.samples_used > row.n) budget = false;

  char buf[128];
  std::snprintf(buf, sizeof buf, "serial==parallel %s, rerun stable %s, budget %s",
                identical ? "yes" : "NO", rerun ? "yes" : "NO", budget ? "ok" : "over");
  report(10, "determinism and one-pass budget", identical && rerun && budget, buf);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (g_failures)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures ? 1 : 0;
}
