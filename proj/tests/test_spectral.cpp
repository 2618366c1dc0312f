#include <catch2/catch.hpp>

#include <complex>
#include <random>

#include "cftrack/spectral.hpp"
#include "test_support.hpp"

using namespace cftrack;
using test_support::circular_shift;
using test_support::random_feature_map;

namespace {

FeatureMap delta_map(int rows, int cols) {
  FeatureMap m(rows, cols, 1);
  m.at(0, 0, 0) = 1.0;
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double mx = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    mx = std::max(mx, std::abs(a[i] - b[i]));
  return mx;
}

}  // namespace

TEST_CASE("fft2 of a delta map is all ones") {
  const Spectrum s = fft2(delta_map(5, 7));
  for (const auto& v : s.data) {
    CHECK(v.real() == Approx(1.0).margin(1e-12));
    CHECK(v.imag() == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("fft2 of a constant map is a single DC coefficient") {
  FeatureMap m(4, 6, 1);
  for (auto& v : m.data) v = 3.25;
  const Spectrum s = fft2(m);
  CHECK(s.data[0].real() == Approx(3.25 * 24));
  for (size_t i = 1; i < s.data.size(); ++i)
    CHECK(std::abs(s.data[i]) == Approx(0.0).margin(1e-10));
}

TEST_CASE("fft2/ifft2 roundtrip is exact to 1e-10") {
  std::mt19937 rng(7);
  const FeatureMap m = random_feature_map(8, 8, 3, rng);
  const FeatureMap back = ifft2(fft2(m));
  CHECK(max_abs_diff(m.data, back.data) < 1e-10);
}

TEST_CASE("ifft2 of an all-ones spectrum is a delta map") {
  Spectrum s(6, 4, 1);
  for (auto& v : s.data) v = {1.0, 0.0};
  const FeatureMap m = ifft2(s);
  CHECK(m.at(0, 0, 0) == Approx(1.0));
  for (size_t i = 1; i < m.data.size(); ++i)
    CHECK(m.data[i] == Approx(0.0).margin(1e-12));
}

TEST_CASE("ifft2 is linear") {
  std::mt19937 rng(11);
  const Spectrum s1 = fft2(random_feature_map(6, 6, 1, rng));
  const Spectrum s2 = fft2(random_feature_map(6, 6, 1, rng));
  Spectrum mix(6, 6, 1);
  const double a = 2.5, b = -1.75;
  for (size_t i = 0; i < mix.data.size(); ++i)
    mix.data[i] = a * s1.data[i] + b * s2.data[i];
  const FeatureMap lhs = ifft2(mix);
  const FeatureMap m1 = ifft2(s1), m2 = ifft2(s2);
  for (size_t i = 0; i < lhs.data.size(); ++i)
    CHECK(lhs.data[i] == Approx(a * m1.data[i] + b * m2.data[i]).margin(1e-10));
}

TEST_CASE("conjugate-symmetric spectrum inverts to a real map") {
  // Conjugate symmetry is constructed by transforming a random real map.
  std::mt19937 rng(13);
  const Spectrum s = fft2(random_feature_map(8, 6, 2, rng));
  CHECK_NOTHROW(ifft2(s));  // residue guard below 1e-10 would throw otherwise
}

TEST_CASE("autocorrelation peak equals signal energy at zero shift") {
  std::mt19937 rng(17);
  const FeatureMap z = random_feature_map(7, 7, 1, rng);
  const Spectrum zs = fft2(z);
  const Mat2d resp = correlate(zs, zs);
  double energy = 0.0;
  for (double v : z.data) energy += v * v;
  CHECK(resp.at(0, 0) == Approx(energy));
  auto [pr, pc] = argmax(resp);
  CHECK(pr == 0);
  CHECK(pc == 0);
}

TEST_CASE("shifting the sample shifts the response peak to the shift") {
  std::mt19937 rng(19);
  const FeatureMap w = random_feature_map(9, 11, 2, rng);
  const FeatureMap z = circular_shift(w, 2, 3);
  const Mat2d resp = correlate(fft2(z), fft2(w));
  auto [pr, pc] = argmax(resp);
  CHECK(pr == 2);
  CHECK(pc == 3);

  // Spatial route agrees on the same construction.
  const Mat2d ref = correlate_spatial(z, w);
  auto [rr, rc] = argmax(ref);
  CHECK(rr == 2);
  CHECK(rc == 3);
}

TEST_CASE("correlate matches the spatial reference on random pairs") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 4 + trial % 5;
    const int cols = 4 + (trial * 3) % 6;
    const FeatureMap z = random_feature_map(rows, cols, 1, rng);
    const FeatureMap w = random_feature_map(rows, cols, 1, rng);
    const Mat2d fast = correlate(fft2(z), fft2(w));
    const Mat2d slow = correlate_spatial(z, w);
    CHECK(max_abs_diff(fast.data, slow.data) < 1e-6);
  }
}

TEST_CASE("sifting: delta sample reads out the reflected filter") {
  std::mt19937 rng(29);
  const FeatureMap w = random_feature_map(5, 5, 1, rng);
  const Mat2d resp = correlate_spatial(delta_map(5, 5), w);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      CHECK(resp.at(r, c) == Approx(w.at((5 - r) % 5, (5 - c) % 5, 0)));
}

TEST_CASE("zero filter gives a zero response") {
  std::mt19937 rng(31);
  const FeatureMap z = random_feature_map(6, 6, 2, rng);
  const FeatureMap w(6, 6, 2);
  const Mat2d resp = correlate_spatial(z, w);
  for (double v : resp.data) CHECK(v == 0.0);
}

TEST_CASE("Parseval holds under the chosen scaling") {
  std::mt19937 rng(37);
  const FeatureMap m = random_feature_map(10, 12, 3, rng);
  const Spectrum s = fft2(m);
  double spatial = 0.0, spectral = 0.0;
  for (double v : m.data) spatial += v * v;
  for (const auto& v : s.data) spectral += std::norm(v);
  spectral /= double(m.rows) * m.cols;
  CHECK(spectral == Approx(spatial).epsilon(1e-8));
}

TEST_CASE("correlate is linear in each argument") {
  std::mt19937 rng(41);
  const FeatureMap z1 = random_feature_map(6, 5, 1, rng);
  const FeatureMap z2 = random_feature_map(6, 5, 1, rng);
  const FeatureMap w = random_feature_map(6, 5, 1, rng);
  const double a = 1.5, b = -0.5;

  FeatureMap zmix(6, 5, 1);
  for (size_t i = 0; i < zmix.data.size(); ++i)
    zmix.data[i] = a * z1.data[i] + b * z2.data[i];
  const Mat2d lhs = correlate(fft2(zmix), fft2(w));
  const Mat2d r1 = correlate(fft2(z1), fft2(w));
  const Mat2d r2 = correlate(fft2(z2), fft2(w));
  for (size_t i = 0; i < lhs.data.size(); ++i)
    CHECK(lhs.data[i] == Approx(a * r1.data[i] + b * r2.data[i]).margin(1e-9));
}

TEST_CASE("shift covariance: shifting the sample shifts the response") {
  std::mt19937 rng(43);
  const FeatureMap z = random_feature_map(7, 8, 1, rng);
  const FeatureMap w = random_feature_map(7, 8, 1, rng);
  const Mat2d base = correlate(fft2(z), fft2(w));
  const int dr = 3, dc = 5;
  const Mat2d shifted = correlate(fft2(circular_shift(z, dr, dc)), fft2(w));
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 8; ++c)
      CHECK(shifted.at((r + dr) % 7, (c + dc) % 8) ==
            Approx(base.at(r, c)).margin(1e-9));
}

TEST_CASE("correlate rejects shape mismatches") {
  Spectrum a(4, 4, 1), b(4, 5, 1);
  CHECK_THROWS_AS(correlate(a, b), std::invalid_argument);
}
