#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "cftrack/features.hpp"
#include "cftrack/mat.hpp"

namespace cftrack {

/// Per-channel stack of 2-D Fourier coefficients, planar layout [d][r][c].
/// Scaling convention: forward transform unnormalized, inverse divided by
/// rows*cols, so ifft2(fft2(m)) == m.
struct Spectrum {
  int rows = 0;
  int cols = 0;
  int depth = 0;
  std::vector<std::complex<double>> data;

  Spectrum() = default;
  Spectrum(int r, int c, int d)
      : rows(r), cols(c), depth(d),
        data(static_cast<size_t>(r) * c * d, std::complex<double>(0, 0)) {}

  std::complex<double>* channel(int d) {
    return data.data() + static_cast<size_t>(d) * rows * cols;
  }
  const std::complex<double>* channel(int d) const {
    return data.data() + static_cast<size_t>(d) * rows * cols;
  }
  size_t plane_size() const { return static_cast<size_t>(rows) * cols; }
  bool same_shape(const Spectrum& o) const {
    return rows == o.rows && cols == o.cols && depth == o.depth;
  }
};

namespace detail {

// FFTW plan creation is not thread-safe; execution via the new-array API is.
// Plans are created FFTW_UNALIGNED so they can be reused with any buffer.
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache c;
    return c;
  }

  fftw_plan get(int rows, int cols, int sign) {
    const Key key{rows, cols, sign};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(static_cast<size_t>(rows) * cols);
    std::vector<std::complex<double>> out(in.size());
    fftw_plan p = fftw_plan_dft_2d(
        rows, cols, reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  using Key = std::tuple<int, int, int>;
  FftPlanCache() = default;
  ~FftPlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

inline void dft_plane(const std::complex<double>* in, std::complex<double>* out,
                      int rows, int cols, int sign) {
  fftw_plan p = FftPlanCache::instance().get(rows, cols, sign);
  // fftw_execute_dft does not modify the input for out-of-place c2c plans,
  // so the const_cast is safe.
  fftw_execute_dft(p,
                   reinterpret_cast<fftw_complex*>(
                       const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

/// Per-channel 2-D DFT (forward, unnormalized).
inline Spectrum fft2(const FeatureMap& map) {
  Spectrum spec(map.rows, map.cols, map.depth);
  const size_t n = spec.plane_size();
  std::vector<std::complex<double>> in(n);
  for (int d = 0; d < map.depth; ++d) {
    const double* src = map.channel(d);
    for (size_t i = 0; i < n; ++i) in[i] = src[i];
    detail::dft_plane(in.data(), spec.channel(d), map.rows, map.cols,
                      FFTW_FORWARD);
  }
  return spec;
}

inline Spectrum fft2(const Mat2d& m) {
  FeatureMap fm;
  fm.rows = m.rows;
  fm.cols = m.cols;
  fm.depth = 1;
  fm.data = m.data;
  return fft2(fm);
}

/// Inverse of fft2 (scaled by 1/N). The imaginary residue is checked against
/// a tolerance scaled to the output magnitude and then discarded.
inline FeatureMap ifft2(const Spectrum& spec) {
  FeatureMap map;
  map.rows = spec.rows;
  map.cols = spec.cols;
  map.depth = spec.depth;
  map.data.resize(spec.data.size());
  const size_t n = spec.plane_size();
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<std::complex<double>> out(n);
  double max_imag = 0.0, max_real = 0.0;
  for (int d = 0; d < spec.depth; ++d) {
    detail::dft_plane(spec.channel(d), out.data(), spec.rows, spec.cols,
                      FFTW_BACKWARD);
    double* dst = map.channel(d);
    for (size_t i = 0; i < n; ++i) {
      dst[i] = out[i].real() * scale;
      max_imag = std::max(max_imag, std::abs(out[i].imag()) * scale);
      max_real = std::max(max_real, std::abs(dst[i]));
    }
  }
  if (max_imag > 1e-8 * std::max(1.0, max_real))
    throw std::runtime_error("ifft2: spectrum is not conjugate-symmetric");
  return map;
}

inline Mat2d ifft2_plane(const Spectrum& spec) {
  if (spec.depth != 1) throw std::invalid_argument("expected single channel");
  FeatureMap m = ifft2(spec);
  Mat2d out(m.rows, m.cols);
  out.data = std::move(m.data);
  return out;
}

/// Circular cross-correlation response, summed over channels:
///   resp = ifft2( sum_d  z_hat_d * conj(w_hat_d) ).
/// The conjugate sits on the filter so that when z is w circularly shifted
/// by (dr, dc), the response peaks at (dr, dc).
inline Mat2d correlate(const Spectrum& z_spec, const Spectrum& w_spec) {
  if (!z_spec.same_shape(w_spec))
    throw std::invalid_argument("correlate: shape mismatch");
  Spectrum prod(z_spec.rows, z_spec.cols, 1);
  const size_t n = z_spec.plane_size();
  for (int d = 0; d < z_spec.depth; ++d) {
    const std::complex<double>* z = z_spec.channel(d);
    const std::complex<double>* w = w_spec.channel(d);
    for (size_t i = 0; i < n; ++i) prod.data[i] += z[i] * std::conj(w[i]);
  }
  return ifft2_plane(prod);
}

/// Direct O(N^2) circular cross-correlation, summed over channels:
///   resp(n) = sum_d sum_m z_d(m) * w_d(m - n mod N).
/// Reference route for correlate(); intended for small maps.
inline Mat2d correlate_spatial(const FeatureMap& z, const FeatureMap& w) {
  if (z.rows != w.rows || z.cols != w.cols || z.depth != w.depth)
    throw std::invalid_argument("correlate_spatial: shape mismatch");
  Mat2d resp(z.rows, z.cols);
  for (int dr = 0; dr < z.rows; ++dr) {
    for (int dc = 0; dc < z.cols; ++dc) {
      double acc = 0.0;
      for (int d = 0; d < z.depth; ++d) {
        const double* zp = z.channel(d);
        const double* wp = w.channel(d);
        for (int r = 0; r < z.rows; ++r) {
          const int wr = (r - dr + z.rows) % z.rows;
          for (int c = 0; c < z.cols; ++c) {
            const int wc = (c - dc + z.cols) % z.cols;
            acc += zp[r * z.cols + c] * wp[wr * z.cols + wc];
          }
        }
      }
      resp.at(dr, dc) = acc;
    }
  }
  return resp;
}

/// Row-major first occurrence of the maximum value.
inline std::pair<int, int> argmax(const Mat2d& m) {
  int br = 0, bc = 0;
  double best = m.data.empty() ? 0.0 : m.data[0];
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c)
      if (m.at(r, c) > best) {
        best = m.at(r, c);
        br = r;
        bc = c;
      }
  return {br, bc};
}

}  // namespace cftrack
