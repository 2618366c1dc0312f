#pragma once

// Shared generators and independent reference implementations for the test
// suites. Everything here is deliberately brute-force and kept free of the
// library's transform path.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cftrack/features.hpp"
#include "cftrack/image.hpp"
#include "cftrack/mat.hpp"
#include "cftrack/spectral.hpp"

namespace test_support {

using cftrack::FeatureMap;
using cftrack::Image;
using cftrack::Mat2d;

inline Mat2d random_map(int rows, int cols, std::mt19937& rng, double lo = -1.0,
                        double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Mat2d m(rows, cols);
  for (auto& v : m.data) v = dist(rng);
  return m;
}

inline FeatureMap random_feature_map(int rows, int cols, int depth,
                                     std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  FeatureMap fm(rows, cols, depth);
  for (auto& v : fm.data) v = dist(rng);
  return fm;
}

/// Real random map whose DFT magnitudes are bounded away from zero
/// (uniform in [0.6, 1.4] * amplitude with random phases). Keeps every
/// frequency bin well-conditioned for solver-equivalence checks.
inline FeatureMap spectrally_conditioned_map(int rows, int cols, int depth,
                                             double amplitude,
                                             std::mt19937& rng) {
  std::uniform_real_distribution<double> mag(0.6, 1.4);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  FeatureMap fm(rows, cols, depth);
  const int n = rows * cols;
  for (int d = 0; d < depth; ++d) {
    std::vector<std::complex<double>> spec(n);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const int i = r * cols + c;
        const int mr = (rows - r) % rows;
        const int mc = (cols - c) % cols;
        const int j = mr * cols + mc;
        if (j < i) continue;  // fill each conjugate pair once
        const double m = mag(rng) * amplitude;
        if (j == i) {
          spec[i] = {m, 0.0};  // self-conjugate bin must be real
        } else {
          const double p = phase(rng);
          spec[i] = std::polar(m, p);
          spec[j] = std::conj(spec[i]);
        }
      }
    // Inverse DFT by direct summation; independent of the library FFT.
    double* out = fm.channel(d);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        std::complex<double> acc(0, 0);
        for (int kr = 0; kr < rows; ++kr)
          for (int kc = 0; kc < cols; ++kc) {
            const double ang = 2.0 * M_PI * (double(kr) * r / rows +
                                             double(kc) * c / cols);
            acc += spec[kr * cols + kc] *
                   std::complex<double>(std::cos(ang), std::sin(ang));
          }
        out[r * cols + c] = acc.real() / n;
      }
  }
  return fm;
}

inline FeatureMap circular_shift(const FeatureMap& m, int dr, int dc) {
  FeatureMap out(m.rows, m.cols, m.depth, m.cell_size);
  for (int d = 0; d < m.depth; ++d)
    for (int r = 0; r < m.rows; ++r)
      for (int c = 0; c < m.cols; ++c)
        out.at((r + dr) % m.rows, (c + dc) % m.cols, d) = m.at(r, c, d);
  return out;
}

inline Image random_color_image(int h, int w, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Image img(h, w, 3);
  for (auto& v : img.data) v = dist(rng);
  return img;
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace test_support
