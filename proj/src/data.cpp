#include "ebcopt/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ebcopt {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  std::ostringstream os;
  os << "libsvm parse error at line " << line << ": " << what;
  throw std::runtime_error(os.str());
}

double parse_num(const std::string& tok, int line) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "non-numeric token '" + tok + "'");
  }
  if (pos != tok.size()) parse_fail(line, "non-numeric token '" + tok + "'");
  if (!std::isfinite(v)) parse_fail(line, "non-finite value '" + tok + "'");
  return v;
}

double dot_sparse(const SparseRow& r, const Vec& w) {
  double s = 0;
  for (auto& [j, v] : r.features)
    if (j < (int)w.size()) s += v * w[j];
  return s;
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in) {
  SparseDataset d;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank or comment-only line
    SparseRow row;
    row.label = parse_num(tok, lineno);
    int prev = 0;
    while (ls >> tok) {
      size_t colon = tok.find(':');
      if (colon == std::string::npos) parse_fail(lineno, "expected idx:val, got '" + tok + "'");
      double idx_d = parse_num(tok.substr(0, colon), lineno);
      int idx = (int)idx_d;
      if (idx_d != idx || idx <= 0) parse_fail(lineno, "index must be a positive integer");
      if (idx <= prev) parse_fail(lineno, "non-increasing index at line " + std::to_string(lineno));
      prev = idx;
      double val = parse_num(tok.substr(colon + 1), lineno);
      row.features.emplace_back(idx - 1, val);
      d.max_feature = std::max(d.max_feature, idx);
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

SparseDataset parse_libsvm_string(const std::string& text) {
  std::istringstream is(text);
  return parse_libsvm(is);
}

SparseDataset load_libsvm(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return parse_libsvm(f);
}

std::string serialize_libsvm(const SparseDataset& d) {
  std::ostringstream os;
  os.precision(17);
  for (const SparseRow& r : d.rows) {
    os << r.label;
    for (auto& [j, v] : r.features) os << ' ' << (j + 1) << ':' << v;
    os << '\n';
  }
  return os.str();
}

SplitResult split(const SparseDataset& d, double r_train, double r_val, double r_test,
                  uint64_t seed) {
  if (d.rows.empty()) throw std::invalid_argument("split: empty dataset");
  if (r_train < 0 || r_val < 0 || r_test < 0 || r_train + r_val + r_test <= 0)
    throw std::invalid_argument("split: ratios must be nonnegative with positive sum");
  double tot = r_train + r_val + r_test;

  std::vector<size_t> perm(d.rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.uniform_int((std::uint64_t)i)]);

  size_t n = d.rows.size();
  size_t n_train = (size_t)std::llround(n * r_train / tot);
  size_t n_val = (size_t)std::llround(n * (r_train + r_val) / tot) - n_train;
  SplitResult out;
  out.train.max_feature = out.validation.max_feature = out.test.max_feature = d.max_feature;
  for (size_t i = 0; i < n; ++i) {
    const SparseRow& r = d.rows[perm[i]];
    if (i < n_train)
      out.train.rows.push_back(r);
    else if (i < n_train + n_val)
      out.validation.rows.push_back(r);
    else
      out.test.rows.push_back(r);
  }
  return out;
}

double evaluate_loss(const SparseDataset& d, EmpiricalLoss loss, const Vec& w) {
  if (d.rows.empty()) throw std::invalid_argument("evaluate_loss: empty dataset");
  double s = 0;
  for (const SparseRow& r : d.rows) {
    double m = dot_sparse(r, w);
    if (loss == EmpiricalLoss::Square) {
      double e = m - r.label;
      s += e * e;
    } else {
      s += std::max(0.0, 1.0 - r.label * m);
    }
  }
  return s / d.rows.size();
}

double evaluate_error(const SparseDataset& d, const Vec& w) {
  if (d.rows.empty()) throw std::invalid_argument("evaluate_error: empty dataset");
  long long bad = 0;
  for (const SparseRow& r : d.rows) {
    double m = dot_sparse(r, w);
    if ((m >= 0 ? 1.0 : -1.0) * r.label <= 0) ++bad;
  }
  return (double)bad / d.rows.size();
}

StochasticProblem empirical_problem(const SparseDataset& train, EmpiricalLoss loss,
                                    const FeasibleSet& set, double lambda) {
  if (train.rows.empty()) throw std::invalid_argument("empirical_problem: empty train set");
  if (loss == EmpiricalLoss::Hinge)
    for (const SparseRow& r : train.rows)
      if (r.label != 1.0 && r.label != -1.0)
        throw std::invalid_argument("empirical_problem: hinge labels must be +-1");

  auto rows = std::make_shared<std::vector<SparseRow>>(train.rows);
  int d = set.dim;

  StochasticProblem p;
  p.name = loss == EmpiricalLoss::Square ? "empirical-square" : "empirical-hinge";
  p.set = set;
  p.meta.dim = d;
  p.meta.radius_R = set.enclosing_radius();
  p.meta.l1_lambda = lambda;
  p.convex_per_sample = true;

  double max_xnorm = 0, max_label = 0;
  for (const SparseRow& r : *rows) {
    double nx = 0;
    for (auto& [j, v] : r.features) nx += v * v;
    max_xnorm = std::max(max_xnorm, std::sqrt(nx));
    max_label = std::max(max_label, std::abs(r.label));
  }
  double wmax = p.meta.radius_R;
  if (loss == EmpiricalLoss::Square)
    p.meta.lipschitz_G = 2.0 * (max_xnorm * wmax + max_label) * max_xnorm;
  else
    p.meta.lipschitz_G = max_xnorm;

  p.sample = [n = (long long)rows->size()](Rng& rng) -> Datum {
    return {(double)rng.uniform_int((std::uint64_t)n)};
  };
  p.loss = [rows, loss](const Vec& w, const Datum& z) {
    const SparseRow& r = (*rows)[(size_t)z[0]];
    double m = dot_sparse(r, w);
    if (loss == EmpiricalLoss::Square) {
      double e = m - r.label;
      return e * e;
    }
    return std::max(0.0, 1.0 - r.label * m);
  };
  p.subgradient = [rows, loss, d](const Vec& w, const Datum& z) {
    const SparseRow& r = (*rows)[(size_t)z[0]];
    double m = dot_sparse(r, w);
    Vec g = zeros(d);
    if (loss == EmpiricalLoss::Square) {
      double c = 2.0 * (m - r.label);
      for (auto& [j, v] : r.features) g[j] = c * v;
    } else if (1.0 - r.label * m > 0) {
      for (auto& [j, v] : r.features) g[j] = -r.label * v;
    }
    return g;
  };
  SparseDataset ds;
  ds.rows = *rows;
  ds.max_feature = train.max_feature;
  p.risk = [ds, loss, lambda](const Vec& w) {
    return evaluate_loss(ds, loss, w) + lambda * norm1(w);
  };
  // no nearest_optimal oracle: optimal set unknown on empirical data
  p.meta.ebc_theta = 1.0;
  p.meta.ebc_alpha = 0.0;
  return p;
}

SparseDataset synth_sparse_regression(int n, int d, int s, double density,
                                      double noise_sd, uint64_t seed) {
  if (n <= 0 || d <= 0 || s <= 0 || s > d)
    throw std::invalid_argument("synth_sparse_regression: bad sizes");
  Rng rng(seed);
  Vec wstar = zeros(d);
  for (int j = 0; j < s; ++j) wstar[j] = (j % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.1 * j);

  SparseDataset ds;
  ds.max_feature = d;
  for (int i = 0; i < n; ++i) {
    SparseRow r;
    double y = 0;
    for (int j = 0; j < d; ++j) {
      if (rng.uniform() < density) {
        double v = rng.normal();
        r.features.emplace_back(j, v);
        y += v * wstar[j];
      }
    }
    r.label = y + noise_sd * rng.normal();
    ds.rows.push_back(std::move(r));
  }
  return ds;
}

}  // namespace ebcopt
