#include "ebcopt/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace ebcopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// log-spaced checkpoint iterations in [1, T]
std::set<long long> checkpoint_iters(long long T, int count) {
  std::set<long long> cps;
  if (T <= 0 || count <= 0) return cps;
  for (int i = 0; i < count; ++i) {
    double f = count == 1 ? 1.0 : double(i) / (count - 1);
    long long t = llround(std::exp(std::log(double(T)) * f));
    cps.insert(std::clamp(t, 1LL, T));
  }
  cps.insert(T);
  return cps;
}

void record_point(const StochasticProblem& p, RunTrace& tr, const SolveOptions& opts,
                  long long samples, int stage, const Vec& avg) {
  TracePoint tp;
  tp.samples = samples;
  tp.stage = stage;
  tp.excess = p.has_risk() ? p.excess(avg) : kNaN;
  tp.eval = opts.evaluator ? opts.evaluator(avg) : kNaN;
  if (opts.record_iterates) tp.iterate = avg;
  tr.points.push_back(std::move(tp));
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// shared inner loop of SSG and SSGS; `update` maps (t, w_t, g_t) -> w'_{t+1}
// before projection
template <typename Update>
SolveResult averaged_subgradient_loop(const StochasticProblem& p, const Domain& domain,
                                      const Vec& w1, long long T, Rng& rng,
                                      const SolveOptions& opts, const char* algo,
                                      long long sample_offset, int stage,
                                      RunTrace* shared_trace, Update update) {
  if (!domain.contains(w1, 1e-8))
    throw std::invalid_argument(std::string(algo) + ": infeasible start point");
  Timer timer;
  RunTrace local;
  RunTrace& tr = shared_trace ? *shared_trace : local;
  if (!shared_trace) tr.algorithm = algo;

  Vec w = w1;
  Vec sum = w1;  // running sum of iterates w_1 .. w_t
  long long terms = 1;
  auto cps = checkpoint_iters(T, opts.checkpoints);
  for (long long t = 1; t <= T; ++t) {
    Datum z = p.sample(rng);
    ++tr.samples_used;
    Vec g = p.subgradient(w, z);
    Vec wnext = update(t, w, g);
    w = domain.project(wnext);
    axpy(1.0, w, sum);
    ++terms;
    if (cps.count(t)) {
      Vec avg = scale(sum, 1.0 / double(terms));
      record_point(p, tr, opts, sample_offset + t, stage, avg);
    }
  }
  Vec avg = scale(sum, 1.0 / double(terms));  // denominator T+1
  tr.final_iterate = avg;
  tr.wall_ms += timer.ms();
  if (!shared_trace) tr.stage_count = 1;
  return SolveResult{std::move(avg), std::move(local)};
}

}  // namespace

StageSchedule StageSchedule::make(long long n, double R0, double G, StepRule rule) {
  if (n < 100)
    throw std::invalid_argument(
        "stage schedule requires n >= 100 (adaptive-rate analysis precondition)");
  if (R0 <= 0 || G <= 0) throw std::invalid_argument("stage schedule: R0, G must be > 0");
  long double ln = (long double)n;
  long double inner = 2.0L * ln / log2l(ln);
  long long m = (long long)floorl(0.5L * log2l(inner)) - 1;
  if (m <= 0) throw std::invalid_argument("stage schedule: m computed to 0");
  StageSchedule s;
  s.m = m;
  s.n0 = n / m;
  s.G = G;
  s.R0 = R0;
  s.radii.resize(m + 1);
  s.steps.resize(m);
  s.radii[0] = R0;
  for (long long k = 1; k <= m; ++k) {
    double rk1 = s.radii[k - 1];
    switch (rule) {
      case StepRule::Asa:
        s.steps[k - 1] = rk1 / (G * std::sqrt(double(s.n0) + 1.0));
        break;
      case StepRule::Asa2:
        s.steps[k - 1] = rk1 * std::sqrt(double(s.n0)) / (2.0 * G);
        break;
      case StepRule::Asa3:
        s.steps[k - 1] = rk1 / (G * std::sqrt(double(s.n0)));
        break;
    }
    s.radii[k] = rk1 / 2.0;
  }
  return s;
}

SolveResult ssg(const StochasticProblem& p, const Domain& domain, const Vec& w1,
                double gamma, long long T, Rng& rng, const SolveOptions& opts) {
  if (gamma <= 0) throw std::invalid_argument("ssg: gamma must be > 0");
  if (T < 1) throw std::invalid_argument("ssg: T must be >= 1");
  auto res = averaged_subgradient_loop(
      p, domain, w1, T, rng, opts, "ssg", 0, 0, nullptr,
      [&](long long, const Vec& w, const Vec& g) {
        Vec y = w;
        axpy(-gamma, g, y);
        if (p.meta.l1_lambda > 0) axpy(-gamma, p.regularizer_subgradient(w), y);
        return y;
      });
  res.trace.algorithm = "ssg";
  return res;
}

SolveResult ssgs(const StochasticProblem& p, const Vec& w1, double beta, long long T,
                 Rng& rng, const SolveOptions& opts) {
  if (T < 3) throw std::invalid_argument("ssgs: T must be >= 3");
  if (beta <= 0) throw std::invalid_argument("ssgs: beta must be > 0");
  Domain dom = Domain::plain(p.set);
  // literal recursion, including the t = 1 coefficient 1 - 2/1 = -1
  auto res = averaged_subgradient_loop(
      p, dom, w1, T, rng, opts, "ssgs", 0, 0, nullptr,
      [&](long long t, const Vec& w, const Vec& g) {
        double a = 1.0 - 2.0 / double(t);
        double b = 2.0 / double(t);
        double c = 2.0 * beta / double(t);
        Vec y = scale(w, a);
        axpy(b, w1, y);
        axpy(-c, g, y);
        if (p.meta.l1_lambda > 0) axpy(-c, p.regularizer_subgradient(w), y);
        return y;
      });
  res.trace.algorithm = "ssgs";
  return res;
}

SolveResult psg(const StochasticProblem& p, const Domain& domain, const Vec& w1,
                double gamma, long long T, Rng& rng, const SolveOptions& opts) {
  if (gamma <= 0) throw std::invalid_argument("psg: gamma must be > 0");
  if (T < 1) throw std::invalid_argument("psg: T must be >= 1");
  if (!domain.contains(w1, 1e-8)) throw std::invalid_argument("psg: infeasible start");
  Timer timer;
  RunTrace tr;
  tr.algorithm = "psg";

  double thresh = gamma * p.meta.l1_lambda;
  Vec w = w1;
  Vec sum = w1;  // sum of w_1 .. w_t, output averages w_1 .. w_T
  long long terms = 1;
  auto cps = checkpoint_iters(T, opts.checkpoints);
  for (long long t = 1; t <= T; ++t) {
    Datum z = p.sample(rng);
    ++tr.samples_used;
    Vec g = p.subgradient(w, z);  // data term only
    Vec y = w;
    axpy(-gamma, g, y);
    // prox of t||.||_1 then projection onto the domain
    for (double& v : y) v = soft_threshold(v, thresh);
    w = domain.project(y);
    if (t < T) {
      axpy(1.0, w, sum);
      ++terms;
    }
    if (cps.count(t)) {
      Vec avg = scale(sum, 1.0 / double(terms));
      record_point(p, tr, opts, t, 0, avg);
    }
  }
  Vec avg = scale(sum, 1.0 / double(terms));  // denominator T
  tr.final_iterate = avg;
  tr.stage_count = 1;
  tr.wall_ms = timer.ms();
  return SolveResult{std::move(avg), std::move(tr)};
}

namespace {

// shared multi-stage driver for asa / asa2 / asa3
template <typename Stage>
SolveResult staged_driver(const StochasticProblem& p, const Vec& w1, long long n,
                          double R0, double G, StepRule rule, const char* algo,
                          const SolveOptions& opts, Stage run_stage) {
  if (!p.set.contains(w1, 1e-8))
    throw std::invalid_argument(std::string(algo) + ": infeasible start point");
  StageSchedule sched = StageSchedule::make(n, R0, G, rule);
  Timer timer;
  RunTrace tr;
  tr.algorithm = algo;
  Vec what = w1;
  for (long long k = 1; k <= sched.m; ++k) {
    what = run_stage(sched, k, what, tr);
    tr.stage_count = int(k);
  }
  tr.final_iterate = what;
  tr.wall_ms = timer.ms();
  return SolveResult{std::move(what), std::move(tr)};
}

}  // namespace

SolveResult asa(const StochasticProblem& p, const Vec& w1, long long n, double R0,
                double G, Rng& rng, const SolveOptions& opts) {
  return staged_driver(
      p, w1, n, R0, G, StepRule::Asa, "asa", opts,
      [&](const StageSchedule& s, long long k, const Vec& wk, RunTrace& tr) {
        Domain dom = Domain::capped(p.set, wk, s.radii[k - 1]);
        long long offset = tr.samples_used;
        auto res = averaged_subgradient_loop(
            p, dom, wk, s.n0, rng, opts, "asa", offset, int(k), &tr,
            [&](long long, const Vec& w, const Vec& g) {
              Vec y = w;
              axpy(-s.steps[k - 1], g, y);
              if (p.meta.l1_lambda > 0)
                axpy(-s.steps[k - 1], p.regularizer_subgradient(w), y);
              return y;
            });
        return res.out;
      });
}

SolveResult asa2(const StochasticProblem& p, const Vec& w1, long long n, double R0,
                 double G, Rng& rng, const SolveOptions& opts) {
  return staged_driver(
      p, w1, n, R0, G, StepRule::Asa2, "asa2", opts,
      [&](const StageSchedule& s, long long k, const Vec& wk, RunTrace& tr) {
        Domain dom = Domain::plain(p.set);  // no cap anywhere
        long long offset = tr.samples_used;
        double beta = s.steps[k - 1];
        auto res = averaged_subgradient_loop(
            p, dom, wk, s.n0, rng, opts, "asa2", offset, int(k), &tr,
            [&, wk](long long t, const Vec& w, const Vec& g) {
              double a = 1.0 - 2.0 / double(t);
              double b = 2.0 / double(t);
              double c = 2.0 * beta / double(t);
              Vec y = scale(w, a);
              axpy(b, wk, y);
              axpy(-c, g, y);
              if (p.meta.l1_lambda > 0) axpy(-c, p.regularizer_subgradient(w), y);
              return y;
            });
        return res.out;
      });
}

SolveResult asa3(const StochasticProblem& p, const Vec& w1, long long n, double R0,
                 double G, double rho, Rng& rng, const SolveOptions& opts) {
  StageSchedule probe = StageSchedule::make(n, R0, G, StepRule::Asa3);
  if (double(probe.n0) < rho * rho / (G * G))
    throw std::invalid_argument(
        "asa3: n0 < rho^2/G^2 (proximal-stage analysis precondition)");
  return staged_driver(
      p, w1, n, R0, G, StepRule::Asa3, "asa3", opts,
      [&](const StageSchedule& s, long long k, const Vec& wk, RunTrace& tr) {
        Domain dom = Domain::capped(p.set, wk, s.radii[k - 1]);
        double gamma = s.steps[k - 1];
        double thresh = gamma * p.meta.l1_lambda;
        long long offset = tr.samples_used;
        // PSG stage: prox step inside the averaged loop, denominator n0 + 1
        // is NOT used here; the stage output follows the proximal averaging
        // (w_1 .. w_T, denominator T).
        Timer timer;
        Vec w = wk;
        Vec sum = wk;
        long long terms = 1;
        auto cps = checkpoint_iters(s.n0, opts.checkpoints);
        for (long long t = 1; t <= s.n0; ++t) {
          Datum z = p.sample(rng);
          ++tr.samples_used;
          Vec g = p.subgradient(w, z);
          Vec y = w;
          axpy(-gamma, g, y);
          for (double& v : y) v = soft_threshold(v, thresh);
          w = dom.project(y);
          if (t < s.n0) {
            axpy(1.0, w, sum);
            ++terms;
          }
          if (cps.count(t)) {
            Vec avg = scale(sum, 1.0 / double(terms));
            record_point(p, tr, opts, offset + t, int(k), avg);
          }
        }
        tr.wall_ms += timer.ms();
        return scale(sum, 1.0 / double(terms));
      });
}

SolveResult smd_pnorm(const StochasticProblem& p, const FeasibleSet& set, const Vec& w1,
                      double gamma, long long T, double pnorm, Rng& rng,
                      const SolveOptions& opts) {
  if (pnorm < 2) throw std::invalid_argument("smd_pnorm: p < 2");
  Domain dom = Domain::plain(set);
  auto res = averaged_subgradient_loop(
      p, dom, w1, T, rng, opts, "smd", 0, 0, nullptr,
      [&](long long, const Vec& w, const Vec& g) {
        Vec gg = g;
        if (p.meta.l1_lambda > 0) axpy(1.0, p.regularizer_subgradient(w), gg);
        return mirror_step_pnorm(w, gg, gamma, pnorm, nullptr);
      });
  res.trace.algorithm = "smd";
  return res;
}

SolveResult sag(const std::vector<SagRow>& rows, int dim, double step, int epochs,
                Rng& rng, const SolveOptions& opts) {
  if (rows.empty()) throw std::invalid_argument("sag: empty training set");
  Timer timer;
  RunTrace tr;
  tr.algorithm = "sag";
  std::size_t N = rows.size();
  Vec w = zeros(dim);
  Vec grad_sum = zeros(dim);            // sum of stored per-example gradients
  std::vector<double> resid(N, 0.0);    // stored residual scalar 2(w'x - y)
  std::vector<char> seen(N, 0);
  long long seen_count = 0;

  long long T = (long long)epochs * (long long)N;
  auto cps = checkpoint_iters(T, opts.checkpoints);
  for (long long t = 1; t <= T; ++t) {
    std::size_t i = std::size_t(rng.uniform_int(N));
    ++tr.samples_used;
    double pred = 0;
    for (auto [j, v] : rows[i].feats) pred += w[j] * v;
    double r_new = 2.0 * (pred - rows[i].label);
    double delta = r_new - resid[i];
    for (auto [j, v] : rows[i].feats) grad_sum[j] += delta * v;
    resid[i] = r_new;
    if (!seen[i]) {
      seen[i] = 1;
      ++seen_count;
    }
    axpy(-step / double(seen_count), grad_sum, w);
    if (cps.count(t)) {
      TracePoint tp;
      tp.samples = t;
      tp.stage = 0;
      tp.excess = kNaN;
      tp.eval = opts.evaluator ? opts.evaluator(w) : kNaN;
      if (opts.record_iterates) tp.iterate = w;
      tr.points.push_back(std::move(tp));
    }
  }
  tr.final_iterate = w;
  tr.stage_count = 1;
  tr.wall_ms = timer.ms();
  return SolveResult{std::move(w), std::move(tr)};
}

}  // namespace ebcopt
