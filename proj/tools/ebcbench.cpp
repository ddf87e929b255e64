#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebcopt/bench.hpp"
#include "ebcopt/conditions.hpp"
#include "ebcopt/erm.hpp"

namespace fs = std::filesystem;
using namespace ebcopt;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// dotted-path overrides applied to the raw config JSON
std::string apply_overrides(std::string text, const std::vector<std::string>& ovr) {
  if (ovr.empty()) return text;
  json j = json::parse(text);
  for (const std::string& kv : ovr) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("override must be key=value: " + kv);
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json* cur = &j;
    size_t pos = 0;
    while (true) {
      size_t dot = key.find('.', pos);
      std::string part = key.substr(pos, dot - pos);
      if (dot == std::string::npos) {
        json parsed;
        try {
          parsed = json::parse(val);
        } catch (const json::exception&) {
          parsed = val;  // bare string
        }
        (*cur)[part] = parsed;
        break;
      }
      cur = &(*cur)[part];
      pos = dot + 1;
    }
  }
  return j.dump();
}

ExperimentConfig config_from(const std::string& path, const std::vector<std::string>& ovr,
                             const std::string& out_dir, uint64_t seed, bool seed_set) {
  if (path.empty()) throw std::runtime_error("--config is required for this command");
  ExperimentConfig cfg = parse_config(apply_overrides(read_file(path), ovr));
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed_set) cfg.base_seed = seed;
  return cfg;
}

std::vector<SummaryRow> read_summary(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty summary " + path);
  std::vector<SummaryRow> rows;
  while (std::getline(f, line)) {
    std::istringstream ls(line);
    std::string tok;
    SummaryRow r;
    std::getline(ls, r.problem, ',');
    std::getline(ls, r.algorithm, ',');
    std::getline(ls, tok, ',');
    r.n = std::stoll(tok);
    std::getline(ls, tok, ',');
    r.replicate = std::stoi(tok);
    std::getline(ls, tok, ',');
    r.seed = std::stoull(tok);
    std::getline(ls, tok, ',');
    r.samples_used = std::stoll(tok);
    std::getline(ls, tok, ',');
    if (tok.rfind("error:", 0) == 0) {
      r.failed = true;
      r.error = tok.substr(6);
      r.metric = std::nan("");
    } else {
      r.metric = std::stod(tok);
    }
    std::getline(ls, tok, ',');  // wall_ms, blank
    std::getline(ls, tok, ',');
    r.stage_count = std::stoi(tok);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ebcbench: adaptive stochastic approximation benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, summary_path, algorithm, problem_id, plot_kind;
  std::vector<std::string> overrides;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--seed", seed, "base seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--override", overrides, "config override key=value (repeatable)");

  auto* c_run = app.add_subcommand("run", "execute every (algorithm, n, replicate) cell");
  auto* c_fit = app.add_subcommand("fit", "fit a log-log rate from a summary CSV");
  c_fit->add_option("--summary", summary_path, "summary.csv path")->required();
  c_fit->add_option("--algorithm", algorithm, "algorithm id")->required();
  auto* c_plot = app.add_subcommand("plot", "emit an SVG plot from results");
  c_plot->add_option("--summary", summary_path, "summary.csv path")->required();
  c_plot->add_option("--kind", plot_kind, "excess-vs-n | testerror-vs-iteration")
      ->default_val("excess-vs-n");
  auto* c_ebc = app.add_subcommand("estimate-ebc", "estimate (theta, alpha) on a problem");
  c_ebc->add_option("--problem", problem_id, "registry problem id")->required();
  auto* c_cond = app.add_subcommand("check-conditions",
                                    "Monte-Carlo moment condition checks");
  c_cond->add_option("--problem", problem_id, "registry problem id")->required();
  auto* c_erm = app.add_subcommand("erm-study", "empirical risk minimization rate study");
  c_erm->add_option("--problem", problem_id, "registry problem id")->required();
  auto* c_val = app.add_subcommand("validate", "validate a config file");
  app.add_subcommand("list-problems", "list registry problem ids");
  for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
    sc->fallthrough();

  CLI11_PARSE(app, argc, argv);
  std::string verb = app.get_subcommands().front()->get_name();

  try {
    if (verb == "list-problems") {
      for (const std::string& id : registry_ids()) std::cout << id << "\n";
      return 0;
    }
    if (verb == "validate") {
      (void)c_val;
      ExperimentConfig cfg = config_from(config_path, overrides, out_dir, seed, seed_set);
      validate_config(cfg);
      std::cout << "config ok\n";
      return 0;
    }
    if (verb == "run") {
      (void)c_run;
      ExperimentConfig cfg = config_from(config_path, overrides, out_dir, seed, seed_set);
      ExperimentResult res = run_experiment(cfg, threads, true);
      std::cout << "cells: " << res.rows.size() << ", failures: " << res.failures
                << ", out: " << cfg.out_dir << "\n";
      for (const SummaryRow& r : res.rows)
        if (r.failed)
          std::cerr << "cell " << r.algorithm << " n=" << r.n << " r=" << r.replicate
                    << " failed: " << r.error << "\n";
      return res.failures ? 2 : 0;
    }
    if (verb == "fit") {
      auto rows = read_summary(summary_path);
      RateFit f = fit_rate(rows, algorithm);
      std::cout << "algorithm=" << algorithm << " slope=" << f.slope
                << " intercept=" << f.intercept << " residual=" << f.residual << "\n";
      for (auto& [n, m] : f.medians) std::cout << "  n=" << n << " median=" << m << "\n";
      return 0;
    }
    if (verb == "plot") {
      auto rows = read_summary(summary_path);
      PlotKind kind;
      if (plot_kind == "excess-vs-n")
        kind = PlotKind::ExcessVsN;
      else if (plot_kind == "testerror-vs-iteration")
        kind = PlotKind::TestErrorVsIteration;
      else
        throw std::runtime_error("unknown plot kind " + plot_kind);
      std::vector<RunTrace> traces;
      if (kind == PlotKind::TestErrorVsIteration) {
        // reload traces from the summary's directory
        fs::path dir = fs::path(summary_path).parent_path();
        for (auto& e : fs::directory_iterator(dir)) {
          std::string name = e.path().filename().string();
          if (name.rfind("trace_", 0) != 0) continue;
          RunTrace t;
          size_t us = name.find('_', 6);
          t.algorithm = name.substr(6, us - 6);
          std::ifstream tf(e.path());
          std::string line;
          std::getline(tf, line);
          while (std::getline(tf, line)) {
            std::istringstream ls(line);
            std::string tok;
            TracePoint tp;
            std::getline(ls, tok, ',');
            tp.samples = std::stoll(tok);
            std::getline(ls, tok, ',');
            tp.stage = std::stoi(tok);
            std::getline(ls, tok, ',');
            tp.eval = std::stod(tok);
            t.points.push_back(tp);
          }
          traces.push_back(std::move(t));
        }
      }
      std::string svg = emit_plot(rows, traces, kind, "ebcbench: " + plot_kind);
      fs::path outp = out_dir.empty() ? fs::path("plot.svg")
                                      : fs::path(out_dir) / "plot.svg";
      if (!out_dir.empty()) fs::create_directories(out_dir);
      std::ofstream(outp) << svg;
      std::cout << "wrote " << outp.string() << "\n";
      return 0;
    }
    if (verb == "estimate-ebc") {
      StochasticProblem p = make_registry_problem(problem_id);
      Rng rng(seed_set ? seed : 0xEBCu);
      auto pts = ebc_point_source(p, 100000, rng);
      EbcEstimate est = estimate_ebc(p, pts, default_theta_grid(), 1e-6,
                                     10.0 * p.meta.ebc_alpha);
      std::cout << "problem=" << problem_id << " recommended_theta="
                << est.recommended_theta << " admitted=" << est.admitted << "\n";
      for (size_t i = 0; i < est.theta_grid.size(); ++i)
        std::cout << "  theta=" << est.theta_grid[i] << " alpha_hat=" << est.alpha_hat[i]
                  << "\n";
      return 0;
    }
    if (verb == "check-conditions") {
      StochasticProblem p = make_registry_problem(problem_id);
      if (!p.convex_per_sample)
        throw std::runtime_error("moment checks need per-sample convexity");
      Rng rng(seed_set ? seed : 0xC0DEu);
      std::cout << "condition,theta,parameter,margin,stderr,pass\n";
      bool all = true;
      for (int i = 0; i < 20; ++i) {
        Vec w = sample_feasible(p.set, rng);
        auto rb = check_bernstein(p, w, p.meta.ebc_theta, 0, 20000, rng);
        std::cout << rb.kind << ',' << rb.theta << ',' << rb.param << ',' << rb.margin
                  << ',' << rb.stderr_ << ',' << (rb.pass ? "1" : "0") << "\n";
        auto rc = check_central(p, w, 0.1, 0.5 / (p.meta.lipschitz_G * p.meta.radius_R),
                                20000, rng);
        std::cout << rc.kind << ',' << rc.theta << ',' << rc.param << ',' << rc.margin
                  << ',' << rc.stderr_ << ',' << (rc.pass ? "1" : "0") << "\n";
        all = all && rb.pass && rc.pass;
      }
      return all ? 0 : 2;
    }
    if (verb == "erm-study") {
      StochasticProblem p = make_registry_problem(problem_id);
      std::vector<long long> grid = {100, 400, 1600, 6400};
      ErmStudyResult r = erm_rate_study(p, grid, 10, 1e-8, seed_set ? seed : 7);
      std::cout << "problem=" << problem_id << " slope=" << r.slope
                << " theoretical=" << r.theoretical_exponent << "\n";
      for (size_t i = 0; i < grid.size(); ++i)
        std::cout << "  n=" << grid[i] << " median_excess=" << r.median_excess[i]
                  << "\n";
      return 0;
    }
    std::cerr << "unknown verb " << verb << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
