#pragma once

// Brute-force ridge regression over all circular shifts, solved as a dense
// linear system. Independent reference for the Fourier-domain filter path.

#include <Eigen/Dense>

#include "cftrack/features.hpp"
#include "cftrack/mat.hpp"

namespace test_support {

/// Response operator of the correlate() convention: row n of X holds the
/// sample values that multiply the filter when the response is evaluated at
/// displacement n, i.e. X[n, (d,j)] = x_d(j + n mod shape).
inline Eigen::MatrixXd correlation_matrix(const cftrack::FeatureMap& x) {
  const int R = x.rows, C = x.cols, N = R * C, D = x.depth;
  Eigen::MatrixXd X(N, D * N);
  for (int nr = 0; nr < R; ++nr)
    for (int nc = 0; nc < C; ++nc) {
      const int n = nr * C + nc;
      for (int d = 0; d < D; ++d)
        for (int jr = 0; jr < R; ++jr)
          for (int jc = 0; jc < C; ++jc)
            X(n, d * N + jr * C + jc) =
                x.at((jr + nr) % R, (jc + nc) % C, d);
    }
  return X;
}

/// Solves (X^T X + lambda I) w = X^T y and returns the spatial filter.
inline cftrack::FeatureMap dense_ridge_solve(const cftrack::FeatureMap& x,
                                             const cftrack::Mat2d& y,
                                             double lambda) {
  const int R = x.rows, C = x.cols, N = R * C, D = x.depth;
  const Eigen::MatrixXd X = correlation_matrix(x);
  Eigen::VectorXd yv(N);
  for (int i = 0; i < N; ++i) yv(i) = y.data[i];

  Eigen::MatrixXd A = X.transpose() * X;
  A.diagonal().array() += lambda;
  const Eigen::VectorXd w = A.ldlt().solve(X.transpose() * yv);

  cftrack::FeatureMap out(R, C, D);
  for (int d = 0; d < D; ++d)
    for (int i = 0; i < N; ++i) out.channel(d)[i] = w(d * N + i);
  return out;
}

}  // namespace test_support
