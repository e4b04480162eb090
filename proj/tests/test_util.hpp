#pragma once

#include <Eigen/Dense>
#include <random>

#include "speclab/words.hpp"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline speclab::words::Word random_reduced_word(std::mt19937_64& g, int rank,
                                                int len) {
  using namespace speclab::words;
  std::uniform_int_distribution<int> idx(1, rank);
  std::uniform_int_distribution<int> sgn(0, 1);
  Word w;
  while (w.length() < len) {
    Letter l = static_cast<Letter>(sgn(g) ? idx(g) : -idx(g));
    if (!w.letters.empty() && w.letters.back() == inverse(l)) continue;
    w.letters.push_back(l);
  }
  return w;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& g, int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = d(g);
  return m;
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& g, int n) {
  Eigen::MatrixXd m = random_matrix(g, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1;
  return q;
}

}  // namespace testutil
