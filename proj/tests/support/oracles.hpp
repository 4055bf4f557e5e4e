/**
 * Copyright 2026 The rashdx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef RASHDX_TESTS_ORACLES_HPP_
#define RASHDX_TESTS_ORACLES_HPP_

// Reference implementations used only by the tests. They are written
// straight from the formulas, deliberately naive, and share no code with
// the library beyond plain data types.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// NT-Xent over 2N rows with 1-based pairing (2k-1, 2k), transcribed term by
// term: s(i,j) is the temperature-scaled cosine, l(i,j) the negative log of
// exp(s(i,j)) over the sum of exp(s(i,k)) for k != i, and the loss is
// 1/(2N) * sum_{k=1..N} [ l(2k-1, 2k) + l(2k, 2k-1) ].
inline double nt_xent_double_loop(const Eigen::MatrixXd &z, double tau) {
  const int two_n = static_cast<int>(z.rows());
  const int n = two_n / 2;
  auto row = [&](int one_based) { return z.row(one_based - 1); };
  auto s = [&](int i, int j) {
    double dot = 0.0, ni = 0.0, nj = 0.0;
    for (int d = 0; d < z.cols(); ++d) {
      dot += row(i)(d) * row(j)(d);
      ni += row(i)(d) * row(i)(d);
      nj += row(j)(d) * row(j)(d);
    }
    return dot / (tau * std::sqrt(ni) * std::sqrt(nj));
  };
  auto l = [&](int i, int j) {
    double denom = 0.0;
    for (int k = 1; k <= two_n; ++k) {
      if (k != i) denom += std::exp(s(i, k));
    }
    return -std::log(std::exp(s(i, j)) / denom);
  };
  double total = 0.0;
  for (int k = 1; k <= n; ++k) total += l(2 * k - 1, 2 * k) + l(2 * k, 2 * k - 1);
  return total / two_n;
}

// Central differences of f at x, one coordinate at a time.
inline Eigen::MatrixXd central_difference(const std::function<double(const Eigen::MatrixXd &)> &f,
                                          const Eigen::MatrixXd &x, double h) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      Eigen::MatrixXd plus = x, minus = x;
      plus(i, j) += h;
      minus(i, j) -= h;
      g(i, j) = (f(plus) - f(minus)) / (2.0 * h);
    }
  }
  return g;
}

struct OneVsRest {
  double tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> precision, recall, specificity, f1;
};

// Classifies every cell of the matrix as TP/FP/FN/TN for class c, then
// applies the textbook ratios.
inline OneVsRest one_vs_rest(const std::array<std::array<std::uint64_t, 8>, 8> &m, int c) {
  OneVsRest r;
  for (int t = 0; t < 8; ++t) {
    for (int p = 0; p < 8; ++p) {
      const double v = static_cast<double>(m[t][p]);
      if (t == c && p == c) r.tp += v;
      else if (t == c) r.fn += v;
      else if (p == c) r.fp += v;
      else r.tn += v;
    }
  }
  if (r.tp + r.fp > 0) r.precision = r.tp / (r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = r.tp / (r.tp + r.fn);
  if (r.tn + r.fp > 0) r.specificity = r.tn / (r.tn + r.fp);
  if (r.precision && r.recall && (*r.precision + *r.recall) > 0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  return r;
}

struct ThresholdCounts {
  std::size_t total = 0, above = 0, above_correct = 0, below = 0, below_correct = 0;
};

inline ThresholdCounts count_threshold(const std::vector<double> &p, const std::vector<bool> &ok, double threshold) {
  ThresholdCounts c;
  c.total = p.size();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] < threshold)) {
      ++c.above;
      if (ok[i]) ++c.above_correct;
    } else {
      ++c.below;
      if (ok[i]) ++c.below_correct;
    }
  }
  return c;
}

inline Eigen::MatrixXd random_batch(std::mt19937_64 &rng, int n_pairs, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd z(2 * n_pairs, dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = g(rng);
  return z;
}

}  // namespace oracle

#endif  // RASHDX_TESTS_ORACLES_HPP_
