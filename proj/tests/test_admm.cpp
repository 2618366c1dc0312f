#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "cftrack/admm.hpp"
#include "cftrack/features.hpp"
#include "cftrack/spectral.hpp"
#include "dense_oracle.hpp"
#include "test_support.hpp"

using namespace cftrack;
using test_support::dense_ridge_solve;
using test_support::random_feature_map;
using test_support::random_map;
using test_support::rel_l2;
using test_support::spectrally_conditioned_map;

namespace {

AdmmConfig defaults() { return AdmmConfig{}; }

AdmmConfig long_schedule() {
  AdmmConfig cfg;
  cfg.max_iters = 50;
  cfg.rho_max = 1e6;
  return cfg;
}

double rel_spectrum_err(const Spectrum& a, const Spectrum& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    num += std::norm(a.data[i] - b.data[i]);
    den += std::norm(b.data[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("ridge filter on a delta sample reproduces the label") {
  FeatureMap x(8, 8, 1);
  x.at(0, 0, 0) = 1.0;
  const LabelMap y = gaussian_label(8, 8, 1.2);
  const Spectrum w = ridge_filter(fft2(x), fft2(y), 1e-9);
  const Spectrum ys = fft2(y);
  for (size_t i = 0; i < w.data.size(); ++i)
    CHECK(std::abs(w.data[i] - ys.data[i]) < 1e-6);
}

TEST_CASE("ridge filter of a zero label is zero") {
  std::mt19937 rng(3);
  const Spectrum a = fft2(random_feature_map(6, 6, 2, rng));
  const Spectrum w = ridge_filter(a, fft2(Mat2d(6, 6, 0.0)), 0.01);
  for (const auto& v : w.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("ridge filter matches the dense circular-shift ridge solve") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMap x = random_feature_map(8, 8, 1, rng);
    const Mat2d y = random_map(8, 8, rng);
    const double lambda = 0.01;

    const FeatureMap w_fast = ifft2(ridge_filter(fft2(x), fft2(y), lambda));
    const FeatureMap w_dense = dense_ridge_solve(x, y, lambda);
    CHECK(rel_l2(w_fast.data, w_dense.data) < 1e-8);
  }
}

TEST_CASE("ridge filter matches the dense solve with multiple channels") {
  std::mt19937 rng(6);
  const FeatureMap x = random_feature_map(6, 5, 3, rng);
  const Mat2d y = random_map(6, 5, rng);
  const FeatureMap w_fast = ifft2(ridge_filter(fft2(x), fft2(y), 0.1));
  const FeatureMap w_dense = dense_ridge_solve(x, y, 0.1);
  CHECK(rel_l2(w_fast.data, w_dense.data) < 1e-8);
}

TEST_CASE("ADMM with all-ones mask and no context converges to the ridge filter") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = trial % 2 ? 16 : 8;
    const int cols = trial % 3 ? 16 : 12;
    const int depth = 1 + trial % 3;
    const FeatureMap x = spectrally_conditioned_map(rows, cols, depth, 40.0, rng);
    const LabelMap y = gaussian_label(rows, cols, 1.5);
    const Spectrum a = fft2(x);
    const Spectrum ys = fft2(y);

    const auto mask = ReliabilityMask::all_ones(rows, cols);
    const JointFilter f = admm_solve(a, {}, ys, mask, long_schedule());
    const Spectrum ridge = ridge_filter(a, ys, defaults().lambda1);
    CHECK(rel_spectrum_err(f.wr_hat, ridge) < 1e-4);

    // Residual collapses along with the equivalence.
    double wc_norm = 0.0;
    for (const auto& v : f.wc_hat.data) wc_norm += std::norm(v);
    CHECK(filter_residual(f) < 1e-3 * std::sqrt(wc_norm));
  }
}

TEST_CASE("ADMM with the default 5-iteration schedule stays close to the ridge filter") {
  std::mt19937 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureMap x = spectrally_conditioned_map(12, 10, 2, 40.0, rng);
    const LabelMap y = gaussian_label(12, 10, 1.2);
    const Spectrum a = fft2(x);
    const Spectrum ys = fft2(y);
    const JointFilter f =
        admm_solve(a, {}, ys, ReliabilityMask::all_ones(12, 10), defaults());
    const Spectrum ridge = ridge_filter(a, ys, defaults().lambda1);
    CHECK(rel_spectrum_err(f.wr_hat, ridge) < 5e-2);
  }
}

TEST_CASE("first ADMM iteration matches the closed form exactly") {
  std::mt19937 rng(15);
  const FeatureMap x = random_feature_map(8, 8, 2, rng);
  const FeatureMap ctx = random_feature_map(8, 8, 2, rng);
  const LabelMap y = gaussian_label(8, 8, 1.0);
  const Spectrum a = fft2(x);
  const Spectrum c = fft2(ctx);
  const Spectrum ys = fft2(y);

  AdmmConfig cfg;
  cfg.max_iters = 1;
  std::vector<Spectrum> ctxs{c};
  const JointFilter f =
      admm_solve(a, ctxs, ys, ReliabilityMask::all_ones(8, 8), cfg);

  const size_t n = a.plane_size();
  for (int d = 0; d < 2; ++d) {
    const auto* av = a.channel(d);
    const auto* wc = f.wc_hat.channel(d);
    for (size_t i = 0; i < n; ++i) {
      double denom = cfg.rho0;
      for (int dd = 0; dd < 2; ++dd) {
        denom += std::norm(a.channel(dd)[i]);
        denom += cfg.lambda2 * std::norm(c.channel(dd)[i]);
      }
      const std::complex<double> expected =
          av[i] * std::conj(ys.data[i]) / denom;
      CHECK(std::abs(wc[i] - expected) < 1e-12);
    }
  }
}

TEST_CASE("penalty sequence under defaults is 5, 15, 25, 25, 25") {
  const auto sched = penalty_schedule(defaults());
  REQUIRE(sched.size() == 5);
  CHECK(sched[0] == 5.0);
  CHECK(sched[1] == 15.0);
  CHECK(sched[2] == 25.0);
  CHECK(sched[3] == 25.0);
  CHECK(sched[4] == 25.0);

  std::mt19937 rng(21);
  const FeatureMap x = random_feature_map(6, 6, 1, rng);
  const JointFilter f =
      admm_solve(fft2(x), {}, fft2(gaussian_label(6, 6, 1.0)),
                 ReliabilityMask::all_ones(6, 6), defaults());
  CHECK(f.rho_schedule == sched);
}

TEST_CASE("masked-out cells of the solved filter are exactly zero") {
  std::mt19937 rng(25);
  const FeatureMap x = random_feature_map(10, 10, 3, rng);
  ReliabilityMask mask(10, 10, 1);
  mask.informative = true;
  std::uniform_int_distribution<int> coin(0, 1);
  for (auto& c : mask.cells) c = static_cast<uint8_t>(coin(rng));

  const JointFilter f = admm_solve(fft2(x), {}, fft2(gaussian_label(10, 10, 1.0)),
                                   mask, defaults());
  for (int d = 0; d < 3; ++d)
    for (int r = 0; r < 10; ++r)
      for (int c = 0; c < 10; ++c)
        if (!mask.at(r, c)) CHECK(std::abs(f.w_r.at(r, c, d)) == 0.0);
}

TEST_CASE("context term suppresses the response on a duplicated context patch") {
  std::mt19937 rng(27);
  const FeatureMap x = spectrally_conditioned_map(12, 12, 1, 10.0, rng);
  const Spectrum a = fft2(x);
  const Spectrum ys = fft2(gaussian_label(12, 12, 1.5));
  const auto mask = ReliabilityMask::all_ones(12, 12);
  std::vector<Spectrum> ctx{a};  // the context patch equals the target patch

  AdmmConfig with_ctx = defaults();
  AdmmConfig without_ctx = defaults();
  without_ctx.lambda2 = 1e-12;  // effectively disabled, keeps config valid

  const JointFilter f1 = admm_solve(a, ctx, ys, mask, with_ctx);
  const JointFilter f0 = admm_solve(a, ctx, ys, mask, without_ctx);

  const Mat2d resp1 = correlate(a, f1.wr_hat);
  const Mat2d resp0 = correlate(a, f0.wr_hat);
  const double peak1 = *std::max_element(resp1.data.begin(), resp1.data.end());
  const double peak0 = *std::max_element(resp0.data.begin(), resp0.data.end());
  CHECK(peak1 < peak0);
}

TEST_CASE("solver output is deterministic") {
  std::mt19937 rng(33);
  const FeatureMap x = random_feature_map(9, 7, 2, rng);
  ReliabilityMask mask(9, 7, 1);
  mask.cells[5] = 0;
  mask.cells[17] = 0;
  const Spectrum a = fft2(x);
  const Spectrum ys = fft2(gaussian_label(9, 7, 1.0));
  const JointFilter f1 = admm_solve(a, {}, ys, mask, defaults());
  const JointFilter f2 = admm_solve(a, {}, ys, mask, defaults());
  CHECK(f1.w_r.data == f2.w_r.data);
  CHECK(f1.wc_hat.data == f2.wc_hat.data);
  CHECK(f1.i_hat.data == f2.i_hat.data);
}

TEST_CASE("relative residual does not grow between iteration 1 and 5") {
  std::mt19937 rng(35);
  for (int seed = 0; seed < 20; ++seed) {
    const FeatureMap x = spectrally_conditioned_map(8, 8, 1, 20.0, rng);
    const Spectrum a = fft2(x);
    const Spectrum ys = fft2(gaussian_label(8, 8, 1.0));
    const auto mask = ReliabilityMask::all_ones(8, 8);

    AdmmConfig one = defaults();
    one.max_iters = 1;
    const JointFilter f1 = admm_solve(a, {}, ys, mask, one);
    const JointFilter f5 = admm_solve(a, {}, ys, mask, defaults());

    auto rel_res = [](const JointFilter& f) {
      double n = 0.0;
      for (const auto& v : f.wc_hat.data) n += std::norm(v);
      return filter_residual(f) / std::sqrt(n);
    };
    CHECK(rel_res(f5) <= rel_res(f1) + 1e-12);
  }
}

TEST_CASE("residual of an internally consistent filter is zero") {
  JointFilter f;
  f.wc_hat = Spectrum(4, 4, 2);
  f.wr_hat = Spectrum(4, 4, 2);
  for (size_t i = 0; i < f.wc_hat.data.size(); ++i) {
    f.wc_hat.data[i] = {double(i), -double(i)};
    f.wr_hat.data[i] = f.wc_hat.data[i];
  }
  CHECK(filter_residual(f) == 0.0);
}

TEST_CASE("non-finite input raises the divergence error") {
  FeatureMap x(6, 6, 1);
  x.at(2, 2, 0) = 1.0;
  Spectrum a = fft2(x);
  a.data[3] = {std::nan(""), 0.0};
  CHECK_THROWS_WITH(admm_solve(a, {}, fft2(gaussian_label(6, 6, 1.0)),
                               ReliabilityMask::all_ones(6, 6), defaults()),
                    "diverged");
}

TEST_CASE("shape mismatches are rejected") {
  std::mt19937 rng(39);
  const Spectrum a = fft2(random_feature_map(6, 6, 1, rng));
  const Spectrum y_bad = fft2(Mat2d(5, 6, 0.0));
  CHECK_THROWS_AS(admm_solve(a, {}, y_bad, ReliabilityMask::all_ones(6, 6),
                             defaults()),
                  std::invalid_argument);

  const Spectrum y = fft2(Mat2d(6, 6, 0.0));
  CHECK_THROWS_AS(admm_solve(a, {}, y, ReliabilityMask::all_ones(5, 6), defaults()),
                  std::invalid_argument);

  std::vector<Spectrum> ctx{fft2(random_feature_map(6, 5, 1, rng))};
  CHECK_THROWS_AS(admm_solve(a, ctx, y, ReliabilityMask::all_ones(6, 6), defaults()),
                  std::invalid_argument);

  CHECK_THROWS_AS(ridge_filter(a, y, 0.0), std::invalid_argument);
}
