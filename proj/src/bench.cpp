#include "ebcopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ebcopt/erm.hpp"

namespace ebcopt {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json params_to_json(const std::map<std::string, double>& m) {
  json j = json::object();
  for (auto& [k, v] : m) j[k] = v;
  return j;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  json jp;
  if (!c.problem.registry_id.empty()) jp["registry_id"] = c.problem.registry_id;
  if (!c.problem.dataset_path.empty()) jp["dataset"] = c.problem.dataset_path;
  if (c.problem.synthetic) {
    const auto& s = *c.problem.synthetic;
    jp["synthetic"] = {{"n", s.n},          {"d", s.d},
                       {"sparsity", s.sparsity}, {"density", s.density},
                       {"noise_sd", s.noise_sd}, {"seed", s.seed}};
  }
  if (c.problem.registry_id.empty()) {
    jp["loss"] = c.problem.loss;
    jp["lambda"] = c.problem.lambda;
    jp["radius"] = c.problem.radius;
  }
  j["problem"] = jp;
  j["algorithms"] = json::array();
  for (const auto& a : c.algorithms)
    j["algorithms"].push_back({{"id", a.id}, {"params", params_to_json(a.params)}});
  j["n_grid"] = c.n_grid;
  j["replicates"] = c.replicates;
  j["base_seed"] = c.base_seed;
  j["delta"] = c.delta;
  j["out"] = c.out_dir;
  j["metric"] = c.metric;
  j["checkpoints"] = c.checkpoints;
  return j.dump(2);
}

ExperimentConfig parse_config(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig c;
  const json& jp = j.at("problem");
  c.problem.registry_id = jp.value("registry_id", std::string());
  c.problem.dataset_path = jp.value("dataset", std::string());
  if (jp.contains("synthetic")) {
    const json& js = jp["synthetic"];
    SyntheticDataSpec s;
    s.n = js.value("n", 0LL);
    s.d = js.value("d", 0);
    s.sparsity = js.value("sparsity", 10);
    s.density = js.value("density", 0.05);
    s.noise_sd = js.value("noise_sd", 0.1);
    s.seed = js.value("seed", (uint64_t)1);
    c.problem.synthetic = s;
  }
  c.problem.loss = jp.value("loss", std::string("square"));
  c.problem.lambda = jp.value("lambda", 0.0);
  c.problem.radius = jp.value("radius", 0.0);
  for (const json& ja : j.at("algorithms")) {
    AlgorithmSpec a;
    a.id = ja.at("id").get<std::string>();
    if (ja.contains("params"))
      for (auto& [k, v] : ja["params"].items()) a.params[k] = v.get<double>();
    c.algorithms.push_back(std::move(a));
  }
  c.n_grid = j.at("n_grid").get<std::vector<long long>>();
  c.replicates = j.value("replicates", 1);
  c.base_seed = j.value("base_seed", (uint64_t)0);
  c.delta = j.value("delta", 0.1);
  c.out_dir = j.value("out", std::string("results"));
  c.metric = j.value("metric", std::string("excess_risk"));
  c.checkpoints = j.value("checkpoints", 32);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config(os.str());
}

void validate_config(const ExperimentConfig& c) {
  static const std::set<std::string> known_algs = {"ssg",  "asa", "ssgs", "asa2",
                                                   "psg",  "asa3", "smd", "sag"};
  int sources = (!c.problem.registry_id.empty()) + (!c.problem.dataset_path.empty()) +
                (c.problem.synthetic.has_value());
  if (sources != 1)
    throw std::invalid_argument("config: exactly one of registry_id, dataset, synthetic");
  if (!c.problem.registry_id.empty()) {
    auto ids = registry_ids();
    if (std::find(ids.begin(), ids.end(), c.problem.registry_id) == ids.end())
      throw std::invalid_argument("config: unknown problem id '" + c.problem.registry_id + "'");
  }
  if (c.problem.loss != "square" && c.problem.loss != "hinge")
    throw std::invalid_argument("config: loss must be square or hinge");
  if (c.algorithms.empty()) throw std::invalid_argument("config: no algorithms");
  for (const auto& a : c.algorithms)
    if (!known_algs.count(a.id))
      throw std::invalid_argument("config: unknown algorithm '" + a.id + "'");
  if (c.n_grid.empty()) throw std::invalid_argument("config: empty n_grid");
  for (long long n : c.n_grid)
    if (n <= 0) throw std::invalid_argument("config: n values must be positive");
  if (c.replicates < 1) throw std::invalid_argument("config: replicates < 1");
  if (c.metric != "excess_risk" && c.metric != "test_error")
    throw std::invalid_argument("config: metric must be excess_risk or test_error");
  if (c.metric == "excess_risk" && c.problem.registry_id.empty())
    throw std::invalid_argument("config: excess_risk needs a registry problem");
}

StochasticProblem build_problem(const ProblemSpec& spec, SparseDataset* train_out,
                                SparseDataset* test_out) {
  if (!spec.registry_id.empty()) return make_registry_problem(spec.registry_id);

  SparseDataset full;
  if (spec.synthetic) {
    const auto& s = *spec.synthetic;
    full = synth_sparse_regression((int)s.n, s.d, s.sparsity, s.density, s.noise_sd,
                                   s.seed);
  } else {
    full = load_libsvm(spec.dataset_path);
  }
  SplitResult sp = split(full, 4, 1, 1, 0xDA7Au);
  if (train_out) *train_out = sp.train;
  if (test_out) *test_out = sp.test;

  int d = full.max_feature;
  double half = spec.radius > 0 ? spec.radius : 10.0;
  FeasibleSet set = FeasibleSet::box(Vec(d, -half), Vec(d, half));
  EmpiricalLoss loss =
      spec.loss == "hinge" ? EmpiricalLoss::Hinge : EmpiricalLoss::Square;
  return empirical_problem(sp.train, loss, set, spec.lambda);
}

namespace {

double param_or(const AlgorithmSpec& a, const std::string& key, double fallback) {
  auto it = a.params.find(key);
  return it == a.params.end() ? fallback : it->second;
}

}  // namespace

SummaryRow run_cell(const StochasticProblem& p, const AlgorithmSpec& alg, long long n,
                    int replicate, uint64_t base_seed, uint64_t cell_index,
                    const std::string& metric, int checkpoints, RunTrace* trace_out,
                    const SparseDataset* test_set, const SparseDataset* train_set) {
  SummaryRow row;
  row.problem = p.name;
  row.algorithm = alg.id;
  row.n = n;
  row.replicate = replicate;
  row.seed = cell_index;

  auto t0 = std::chrono::steady_clock::now();
  try {
    Rng rng = Rng::stream(base_seed, cell_index);
    double G = p.meta.lipschitz_G;
    double R = p.meta.radius_R;
    // random feasible start on analytic instances: the set center coincides
    // with the optimum on the symmetric ones and would hide the bias term of
    // the bounds; empirical problems start at the origin as usual
    Vec w1;
    if (p.has_optimal_set()) {
      w1 = sample_feasible(p.set, rng);
    } else {
      w1 = p.set.center.empty() ? zeros(p.set.dim) : p.set.center;
      if (!p.set.contains(w1, 1e-9)) w1 = project(p.set, w1);
    }

    SolveOptions opts;
    opts.checkpoints = checkpoints;
    opts.record_iterates = false;
    EmpiricalLoss tl =
        p.name == "empirical-hinge" ? EmpiricalLoss::Hinge : EmpiricalLoss::Square;
    if (metric == "test_error" && test_set)
      opts.evaluator = [test_set, tl](const Vec& w) {
        return evaluate_loss(*test_set, tl, w);
      };

    SolveResult res;
    if (alg.id == "ssg") {
      double gamma = param_or(alg, "gamma", R / (G * std::sqrt((double)n + 1.0)));
      res = ssg(p, Domain::plain(p.set), w1, gamma, n, rng, opts);
    } else if (alg.id == "psg") {
      double gamma = param_or(alg, "gamma", R / (G * std::sqrt((double)n)));
      res = psg(p, Domain::plain(p.set), w1, gamma, n, rng, opts);
    } else if (alg.id == "ssgs") {
      double beta = param_or(alg, "beta", R * std::sqrt((double)n) / (2.0 * G));
      res = ssgs(p, w1, beta, n, rng, opts);
    } else if (alg.id == "asa" || alg.id == "asa2" || alg.id == "asa3") {
      double R0 = param_or(alg, "R0", 2.0 * R);
      double Ga = param_or(alg, "G", G);
      double rho = p.meta.l1_lambda * std::sqrt((double)p.set.dim);
      std::string id = alg.id;
      if (id == "asa" && p.meta.l1_lambda > 0) id = "asa3";  // composite objective
      if (id == "asa")
        res = asa(p, w1, n, R0, Ga, rng, opts);
      else if (id == "asa2")
        res = asa2(p, w1, n, R0, Ga, rng, opts);
      else
        res = asa3(p, w1, n, R0, Ga, rho, rng, opts);
    } else if (alg.id == "smd") {
      int d = p.set.dim;
      double pn = param_or(alg, "p", std::max(2.0, 2.0 * std::log((double)d)));
      double gamma = param_or(alg, "gamma", R / (G * std::sqrt((double)n + 1.0)));
      res = smd_pnorm(p, p.set, w1, gamma, n, pn, rng, opts);
    } else if (alg.id == "sag") {
      if (!train_set) throw std::runtime_error("sag needs a finite training set");
      std::vector<SagRow> rows;
      double lmax = 0;
      for (const SparseRow& r : train_set->rows) {
        SagRow sr;
        sr.label = r.label;
        sr.feats = r.features;
        double nx = 0;
        for (auto& [j, v] : r.features) nx += v * v;
        lmax = std::max(lmax, 2.0 * nx);
        rows.push_back(std::move(sr));
      }
      double step = param_or(alg, "step", 1.0 / std::max(1e-12, lmax));
      int epochs = std::max(1, (int)(n / std::max<size_t>(1, rows.size())));
      res = sag(rows, p.set.dim, step, epochs, rng, opts);
    } else {
      throw std::invalid_argument("unknown algorithm '" + alg.id + "'");
    }

    row.samples_used = res.trace.samples_used;
    row.stage_count = res.trace.stage_count;
    if (metric == "test_error" && opts.evaluator)
      row.metric = opts.evaluator(res.out);
    else if (p.has_risk())
      row.metric = p.excess(res.out);
    else
      row.metric = std::nan("");
    if (trace_out) {
      *trace_out = std::move(res.trace);
      trace_out->algorithm = alg.id;
      trace_out->seed = cell_index;
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
    row.metric = std::nan("");
  }
  auto t1 = std::chrono::steady_clock::now();
  row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads,
                                bool write_files) {
  validate_config(cfg);
  SparseDataset train, test;
  StochasticProblem p = build_problem(cfg.problem, &train, &test);

  struct Cell {
    const AlgorithmSpec* alg;
    long long n;
    int rep;
    uint64_t cell_index;
  };
  std::vector<Cell> cells;
  uint64_t ci = 0;
  for (const auto& a : cfg.algorithms)
    for (long long n : cfg.n_grid)
      for (int r = 0; r < cfg.replicates; ++r) cells.push_back({&a, n, r, ci++});

  ExperimentResult result;
  result.metric_name = cfg.metric;
  result.rows.resize(cells.size());
  result.traces.resize(cells.size());

  const SparseDataset* test_ptr = cfg.problem.registry_id.empty() ? &test : nullptr;
  const SparseDataset* train_ptr = cfg.problem.registry_id.empty() ? &train : nullptr;

  auto work = [&](size_t i) {
    const Cell& c = cells[i];
    result.rows[i] =
        run_cell(p, *c.alg, c.n, c.rep, cfg.base_seed, c.cell_index, cfg.metric,
                 cfg.checkpoints, &result.traces[i], test_ptr, train_ptr);
  };

  if (threads <= 1) {
    for (size_t i = 0; i < cells.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int nthreads = std::min<size_t>(threads, cells.size());
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : pool) th.join();
  }

  for (const auto& r : result.rows)
    if (r.failed) result.failures++;

  if (write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    // single collector: all files written here, sequentially
    for (size_t i = 0; i < cells.size(); ++i) {
      const Cell& c = cells[i];
      std::ostringstream name;
      name << "trace_" << c.alg->id << "_n" << c.n << "_r" << c.rep << ".csv";
      std::ofstream f(fs::path(cfg.out_dir) / name.str());
      f << "samples,stage," << cfg.metric << "\n";
      for (const TracePoint& tp : result.traces[i].points) {
        double v = cfg.metric == "test_error" ? tp.eval : tp.excess;
        f << tp.samples << ',' << tp.stage << ',' << fmt_double(v) << '\n';
      }
    }
    std::ofstream s(fs::path(cfg.out_dir) / "summary.csv");
    s << summary_csv(result);
  }
  return result;
}

std::string summary_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << "problem,algorithm,n,replicate,seed,samples_used," << r.metric_name
     << ",wall_ms,stage_count\n";
  for (const SummaryRow& row : r.rows) {
    // wall_ms left blank: timings are nondeterministic, reruns must be
    // byte-identical
    os << row.problem << ',' << row.algorithm << ',' << row.n << ','
       << row.replicate << ',' << row.seed << ',' << row.samples_used << ','
       << (row.failed ? ("error:" + row.error) : fmt_double(row.metric)) << ",,"
       << row.stage_count << '\n';
  }
  return os.str();
}

RateFit fit_rate(const std::vector<SummaryRow>& rows, const std::string& algorithm,
                 std::optional<double> theta) {
  std::map<long long, std::vector<double>> by_n;
  for (const SummaryRow& r : rows)
    if (r.algorithm == algorithm && !r.failed && std::isfinite(r.metric))
      by_n[r.n].push_back(r.metric);
  if (by_n.size() < 4)
    throw std::invalid_argument("fit_rate: need >= 4 n values for '" + algorithm + "'");

  RateFit fit;
  std::vector<double> xs, ys;
  for (auto& [n, v] : by_n) {
    double med = median(v);
    fit.medians.emplace_back(n, med);
    if (med > 0) {
      xs.push_back((double)n);
      ys.push_back(med);
    }
  }
  LogLogFit f = fit_loglog(xs, ys, 0.0);
  fit.slope = f.slope;
  fit.intercept = f.intercept;
  double ss = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double res = std::log(ys[i]) - (f.intercept + f.slope * std::log(xs[i]));
    ss += res * res;
  }
  fit.residual = ss;
  if (theta) fit.predicted_exponent = -1.0 / (2.0 - *theta);
  return fit;
}

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;  // already log10-transformed
};

std::string render_svg(const std::vector<Series>& series, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel) {
  const double W = 720, H = 480, ml = 70, mr = 160, mt = 50, mb = 55;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
     << title << "</text>\n";
  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
     << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
     << H - mb << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 14
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 "
     << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";
  // decade tick labels on both log axes
  for (int e = (int)std::ceil(xmin); e <= (int)std::floor(xmax); ++e)
    os << "<text x=\"" << px(e) << "\" y=\"" << H - mb + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">1e" << e << "</text>\n";
  for (int e = (int)std::ceil(ymin); e <= (int)std::floor(ymax); ++e)
    os << "<text x=\"" << ml - 8 << "\" y=\"" << py(e) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const char* col = colors[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (auto& [x, y] : series[si].pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    double ly = mt + 20 + 20 * si;
    os << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - mr + 40
       << "\" y2=\"" << ly << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - mr + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
       << series[si].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string emit_plot(const std::vector<SummaryRow>& rows,
                      const std::vector<RunTrace>& traces, PlotKind kind,
                      const std::string& title) {
  std::vector<Series> series;
  if (kind == PlotKind::ExcessVsN) {
    std::map<std::string, std::map<long long, std::vector<double>>> grouped;
    for (const SummaryRow& r : rows)
      if (!r.failed && std::isfinite(r.metric) && r.metric > 0)
        grouped[r.algorithm][r.n].push_back(r.metric);
    for (auto& [alg, by_n] : grouped) {
      Series s;
      s.label = alg;
      for (auto& [n, v] : by_n)
        s.pts.emplace_back(std::log10((double)n), std::log10(median(v)));
      if (!s.pts.empty()) series.push_back(std::move(s));
    }
  } else {
    std::set<std::string> seen;
    for (const RunTrace& t : traces) {
      if (t.points.empty() || seen.count(t.algorithm)) continue;
      seen.insert(t.algorithm);
      Series s;
      s.label = t.algorithm;
      for (const TracePoint& tp : t.points)
        if (tp.samples > 0 && std::isfinite(tp.eval) && tp.eval > 0)
          s.pts.emplace_back(std::log10((double)tp.samples), std::log10(tp.eval));
      if (!s.pts.empty()) series.push_back(std::move(s));
    }
  }
  if (series.empty()) throw std::runtime_error("emit_plot: no plottable series");
  bool vs_n = kind == PlotKind::ExcessVsN;
  return render_svg(series, title, vs_n ? "n (log10)" : "samples (log10)",
                    vs_n ? "median excess risk (log10)" : "test error (log10)");
}

}  // namespace ebcopt
