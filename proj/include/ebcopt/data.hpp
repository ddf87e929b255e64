#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ebcopt/problems.hpp"
#include "ebcopt/rng.hpp"

namespace ebcopt {

struct SparseRow {
  double label = 0;
  std::vector<std::pair<int, double>> features;  // 0-based, strictly increasing
};

struct SparseDataset {
  std::vector<SparseRow> rows;
  int max_feature = 0;  // dimension: highest 0-based index + 1

  size_t size() const { return rows.size(); }
};

// libsvm text format: "label idx:val idx:val ...", 1-based indices, '#'
// starts a comment. Malformed input throws with the offending line number.
SparseDataset parse_libsvm(std::istream& in);
SparseDataset parse_libsvm_string(const std::string& text);
SparseDataset load_libsvm(const std::string& path);

std::string serialize_libsvm(const SparseDataset& d);

// Deterministic shuffled partition; ratios normalized, disjoint, exhaustive.
struct SplitResult {
  SparseDataset train, validation, test;
};
SplitResult split(const SparseDataset& d, double r_train, double r_val, double r_test,
                  uint64_t seed);

enum class EmpiricalLoss { Square, Hinge };

// Uniform distribution over the rows. Datum is the row index. The risk
// oracle is the exact empirical average; there is no optimal-set oracle.
StochasticProblem empirical_problem(const SparseDataset& train, EmpiricalLoss loss,
                                    const FeasibleSet& set, double lambda);

// mean loss of w over a held-out set
double evaluate_loss(const SparseDataset& d, EmpiricalLoss loss, const Vec& w);
// classification error rate (sign mismatches), hinge-style labels
double evaluate_error(const SparseDataset& d, const Vec& w);

// Sparse regression generator: planted sparse w with s nonzeros, features
// with the given density, labels x.w + noise.
SparseDataset synth_sparse_regression(int n, int d, int s, double density,
                                      double noise_sd, uint64_t seed);

}  // namespace ebcopt
