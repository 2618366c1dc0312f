#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "cftrack/features.hpp"
#include "cftrack/reliability.hpp"
#include "cftrack/spectral.hpp"

namespace cftrack {

struct AdmmConfig {
  double lambda1 = 0.01;  // filter energy regularizer
  double lambda2 = 25.0;  // context patch weight
  double rho0 = 5.0;      // initial penalty
  double beta = 3.0;      // penalty multiplier
  double rho_max = 25.0;  // penalty cap
  int max_iters = 5;

  void validate() const {
    if (lambda1 <= 0 || lambda2 < 0 || rho0 <= 0 || beta <= 1.0 ||
        rho_max < rho0 || max_iters < 1)
      throw std::invalid_argument("invalid ADMM configuration");
  }
};

/// Penalty values used in each iteration: rho0, then min(rho_max, beta*rho).
inline std::vector<double> penalty_schedule(const AdmmConfig& cfg) {
  cfg.validate();
  std::vector<double> s;
  double rho = cfg.rho0;
  for (int i = 0; i < cfg.max_iters; ++i) {
    s.push_back(rho);
    rho = std::min(cfg.rho_max, cfg.beta * rho);
  }
  return s;
}

/// Jointly learned filter state: base filter w, masked filter w_r = r .* w,
/// its spectrum, the Fourier dual variable and the Lagrangian multiplier.
/// Detection uses w_r (via wr_hat).
struct JointFilter {
  FeatureMap w;
  FeatureMap w_r;
  Spectrum wr_hat;
  Spectrum wc_hat;
  Spectrum i_hat;
  double rho = 0.0;
  std::vector<double> rho_schedule;
};

/// Closed-form ridge filter, the no-context no-mask baseline:
///   w_hat_d = (a_hat_d .* conj(y_hat)) / (sum_d |a_hat_d|^2 + lambda).
/// The shared denominator sums over channels (joint least squares); the
/// conjugate placement matches the correlate() convention, under which this
/// equals the dense normal-equations solve over all circular shifts.
inline Spectrum ridge_filter(const Spectrum& a0_spec, const Spectrum& y_spec,
                             double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (y_spec.depth != 1) throw std::invalid_argument("label must be single-channel");
  if (a0_spec.rows != y_spec.rows || a0_spec.cols != y_spec.cols)
    throw std::invalid_argument("ridge_filter: shape mismatch");

  const size_t n = a0_spec.plane_size();
  std::vector<double> denom(n, lambda);
  for (int d = 0; d < a0_spec.depth; ++d) {
    const std::complex<double>* a = a0_spec.channel(d);
    for (size_t i = 0; i < n; ++i) denom[i] += std::norm(a[i]);
  }
  Spectrum w(a0_spec.rows, a0_spec.cols, a0_spec.depth);
  for (int d = 0; d < a0_spec.depth; ++d) {
    const std::complex<double>* a = a0_spec.channel(d);
    std::complex<double>* out = w.channel(d);
    for (size_t i = 0; i < n; ++i)
      out[i] = a[i] * std::conj(y_spec.data[i]) / denom[i];
  }
  return w;
}

/// ADMM solve of the joint discrimination/reliability objective. Element-wise
/// Fourier-domain iterations:
///   (1) wc_hat <- (a0_hat .* conj(y_hat) + rho*wr_hat - i_hat) / (D + rho)
///       with D = sum_d |a0_hat_d|^2 + lambda2 * sum_i sum_d |ai_hat_d|^2,
///       shared across channels; context labels are identically zero so the
///       context patches appear only in D.
///   (2) w <- ifft2(rho*wc_hat + i_hat) / (lambda1 + rho);  w_r <- r .* w
///   (3) i_hat <- i_hat + rho * (wc_hat - wr_hat)
///   (4) rho <- min(rho_max, beta * rho)
/// Cold start (wr_hat = 0, i_hat = 0) every call.
inline JointFilter admm_solve(const Spectrum& a0_spec,
                              std::span<const Spectrum> ctx_specs,
                              const Spectrum& y_spec,
                              const ReliabilityMask& mask,
                              const AdmmConfig& cfg) {
  cfg.validate();
  if (y_spec.depth != 1) throw std::invalid_argument("label must be single-channel");
  if (a0_spec.rows != y_spec.rows || a0_spec.cols != y_spec.cols)
    throw std::invalid_argument("admm_solve: label shape mismatch");
  if (mask.rows != a0_spec.rows || mask.cols != a0_spec.cols)
    throw std::invalid_argument("admm_solve: mask shape mismatch");
  for (const auto& c : ctx_specs)
    if (!c.same_shape(a0_spec))
      throw std::invalid_argument("admm_solve: context shape mismatch");

  const int rows = a0_spec.rows, cols = a0_spec.cols, depth = a0_spec.depth;
  const size_t n = a0_spec.plane_size();

  // Shared real denominator: target energy + weighted context energy.
  std::vector<double> denom_base(n, 0.0);
  for (int d = 0; d < depth; ++d) {
    const std::complex<double>* a = a0_spec.channel(d);
    for (size_t i = 0; i < n; ++i) denom_base[i] += std::norm(a[i]);
  }
  for (const auto& ctx : ctx_specs)
    for (int d = 0; d < depth; ++d) {
      const std::complex<double>* a = ctx.channel(d);
      for (size_t i = 0; i < n; ++i) denom_base[i] += cfg.lambda2 * std::norm(a[i]);
    }

  std::vector<std::complex<double>> rhs(n);
  for (size_t i = 0; i < n; ++i) rhs[i] = std::conj(y_spec.data[i]);

  JointFilter f;
  f.wc_hat = Spectrum(rows, cols, depth);
  f.i_hat = Spectrum(rows, cols, depth);
  f.wr_hat = Spectrum(rows, cols, depth);
  double rho = cfg.rho0;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    f.rho_schedule.push_back(rho);

    // (1) dual variable update
    for (int d = 0; d < depth; ++d) {
      const std::complex<double>* a = a0_spec.channel(d);
      const std::complex<double>* wr = f.wr_hat.channel(d);
      const std::complex<double>* ih = f.i_hat.channel(d);
      std::complex<double>* wc = f.wc_hat.channel(d);
      for (size_t i = 0; i < n; ++i)
        wc[i] = (a[i] * rhs[i] + rho * wr[i] - ih[i]) / (denom_base[i] + rho);
    }

    // (2) spatial filter and mask projection
    Spectrum blend(rows, cols, depth);
    for (size_t i = 0; i < f.wc_hat.data.size(); ++i)
      blend.data[i] = rho * f.wc_hat.data[i] + f.i_hat.data[i];
    f.w = ifft2(blend);
    const double inv = 1.0 / (cfg.lambda1 + rho);
    for (auto& v : f.w.data) v *= inv;

    f.w_r = f.w;
    for (int d = 0; d < depth; ++d) {
      double* p = f.w_r.channel(d);
      for (size_t i = 0; i < n; ++i)
        if (!mask.cells[i]) p[i] = 0.0;
    }
    f.wr_hat = fft2(f.w_r);

    // (3) multiplier ascent
    for (size_t i = 0; i < f.i_hat.data.size(); ++i)
      f.i_hat.data[i] += rho * (f.wc_hat.data[i] - f.wr_hat.data[i]);

    for (const auto& v : f.wc_hat.data)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("diverged");

    // (4) penalty growth
    rho = std::min(cfg.rho_max, cfg.beta * rho);
  }
  f.rho = f.rho_schedule.back();
  return f;
}

/// L2 norm of wc_hat - wr_hat across all channels (consensus residual).
inline double filter_residual(const JointFilter& f) {
  if (!f.wc_hat.same_shape(f.wr_hat))
    throw std::invalid_argument("filter spectra shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < f.wc_hat.data.size(); ++i)
    acc += std::norm(f.wc_hat.data[i] - f.wr_hat.data[i]);
  return std::sqrt(acc);
}

}  // namespace cftrack
