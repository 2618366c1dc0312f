#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cftrack/geometry.hpp"
#include "cftrack/image.hpp"
#include "cftrack/mat.hpp"

namespace cftrack {

/// HSV bin triple for one pixel, 16 bins per channel.
inline int hsv_bin(double r, double g, double b, int bins = 16) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  double h = 0.0;
  if (d > 0.0) {
    if (mx == r)
      h = 60.0 * std::fmod((g - b) / d, 6.0);
    else if (mx == g)
      h = 60.0 * ((b - r) / d + 2.0);
    else
      h = 60.0 * ((r - g) / d + 4.0);
    if (h < 0) h += 360.0;
  }
  const double s = mx > 0.0 ? d / mx : 0.0;
  const double v = mx;
  const int bh = std::min(bins - 1, static_cast<int>(h / 360.0 * bins));
  const int bs = std::min(bins - 1, static_cast<int>(s * bins));
  const int bv = std::min(bins - 1, static_cast<int>(v * bins));
  return (bh * bins + bs) * bins + bv;
}

/// Foreground/background HSV histograms, each normalized to sum 1.
struct ColorModel {
  static constexpr int kBins = 16;
  static constexpr int kCells = kBins * kBins * kBins;
  std::vector<double> fg;
  std::vector<double> bg;
  bool valid = false;

  ColorModel() : fg(kCells, 0.0), bg(kCells, 0.0) {}
};

/// Binary per-cell reliability mask. When the informativeness test fails
/// (informative == false) every cell is forced to 1.
struct ReliabilityMask {
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> cells;
  bool informative = false;

  ReliabilityMask() = default;
  ReliabilityMask(int r, int c, uint8_t fill = 1)
      : rows(r), cols(c), cells(static_cast<size_t>(r) * c, fill) {}

  uint8_t at(int r, int c) const {
    return cells[static_cast<size_t>(r) * cols + c];
  }
  static ReliabilityMask all_ones(int r, int c) {
    ReliabilityMask m(r, c, 1);
    m.informative = false;
    return m;
  }
};

namespace detail {

inline void accumulate_box(const Image& frame, const BoundingBox& box,
                           const BoundingBox* exclude, std::vector<double>& hist,
                           double& count) {
  const int y0 = std::max(0, static_cast<int>(std::floor(box.y)));
  const int y1 = std::min(frame.height, static_cast<int>(std::ceil(box.y + box.h)));
  const int x0 = std::max(0, static_cast<int>(std::floor(box.x)));
  const int x1 = std::min(frame.width, static_cast<int>(std::ceil(box.x + box.w)));
  for (int r = y0; r < y1; ++r)
    for (int c = x0; c < x1; ++c) {
      if (exclude && contains(*exclude, c + 0.5, r + 0.5)) continue;
      hist[hsv_bin(frame.at(r, c, 0), frame.at(r, c, 1), frame.at(r, c, 2))] += 1.0;
      count += 1.0;
    }
}

}  // namespace detail

/// Builds fg/bg histograms from the target box (shrunk to its inner 0.8x to
/// limit background bleed) and the surrounding context boxes with target
/// pixels excluded. Grayscale frames or an empty background pixel set yield
/// an invalid model; the mask then stays all-ones downstream.
inline ColorModel build_color_model(const Image& frame, const BoundingBox& target,
                                    const std::vector<BoundingBox>& context) {
  target.validate();
  for (const auto& b : context) b.validate();
  ColorModel m;
  if (!frame.color()) return m;

  const double shrink = 0.8;
  const BoundingBox inner = BoundingBox::from_center(
      target.center(), target.w * shrink, target.h * shrink);

  double fg_count = 0.0, bg_count = 0.0;
  detail::accumulate_box(frame, inner, nullptr, m.fg, fg_count);
  for (const auto& b : context)
    detail::accumulate_box(frame, b, &target, m.bg, bg_count);

  if (fg_count <= 0.0 || bg_count <= 0.0) return m;
  for (auto& v : m.fg) v /= fg_count;
  for (auto& v : m.bg) v /= bg_count;
  m.valid = true;
  return m;
}

/// Per-pixel posterior p = fg[b] / (fg[b] + bg[b] + eps); the object prior
/// is uniform so the likelihood ratio is the whole story.
inline PosteriorMap back_project(const Image& patch, const ColorModel& model) {
  if (!model.valid) throw std::invalid_argument("invalid color model");
  if (!patch.color()) throw std::invalid_argument("expected color patch");
  constexpr double eps = 1e-9;
  PosteriorMap post(patch.height, patch.width);
  for (int r = 0; r < patch.height; ++r)
    for (int c = 0; c < patch.width; ++c) {
      const int b = hsv_bin(patch.at(r, c, 0), patch.at(r, c, 1), patch.at(r, c, 2));
      post.at(r, c) = model.fg[b] / (model.fg[b] + model.bg[b] + eps);
    }
  return post;
}

/// Average-pools a pixel-resolution map onto the feature-cell grid.
inline Mat2d pool_to_cells(const Mat2d& m, int cell_size) {
  if (cell_size <= 0) throw std::invalid_argument("cell_size must be positive");
  const int rows = m.rows / cell_size;
  const int cols = m.cols / cell_size;
  if (rows < 1 || cols < 1) throw std::invalid_argument("map smaller than one cell");
  Mat2d out(rows, cols);
  const double inv = 1.0 / (cell_size * cell_size);
  for (int r = 0; r < rows * cell_size; ++r)
    for (int c = 0; c < cols * cell_size; ++c)
      out.at(r / cell_size, c / cell_size) += m.at(r, c) * inv;
  return out;
}

/// Otsu threshold over a [0,1]-valued map, clamped to [lo, hi].
inline double otsu_threshold(const Mat2d& m, double lo = 0.35, double hi = 0.65) {
  constexpr int kBins = 256;
  std::array<double, kBins> hist{};
  for (double v : m.data) {
    const int b = std::min(kBins - 1, std::max(0, static_cast<int>(v * kBins)));
    hist[b] += 1.0;
  }
  const double total = static_cast<double>(m.data.size());
  double sum_all = 0.0;
  for (int i = 0; i < kBins; ++i) sum_all += i * hist[i];

  double w0 = 0.0, sum0 = 0.0, best_sigma = -1.0;
  int best_bin = kBins / 2;
  for (int t = 0; t < kBins - 1; ++t) {
    w0 += hist[t];
    if (w0 <= 0.0) continue;
    const double w1 = total - w0;
    if (w1 <= 0.0) break;
    sum0 += t * hist[t];
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double sigma = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (sigma > best_sigma) {
      best_sigma = sigma;
      best_bin = t;
    }
  }
  const double thr = (best_bin + 1.0) / kBins;
  return std::clamp(thr, lo, hi);
}

/// Thresholds a cell-resolution posterior into a binary mask and runs the
/// color informativeness test: the ratio of foreground cells to the previous
/// target area must fall within [tau_l, tau_u], otherwise the segmentation is
/// abandoned and the mask forced to all-ones.
inline ReliabilityMask binarize(const Mat2d& post_cells, double prev_target_area,
                                double tau_l, double tau_u) {
  if (prev_target_area <= 0.0)
    throw std::invalid_argument("previous target area must be positive");
  ReliabilityMask mask(post_cells.rows, post_cells.cols, 0);
  const double thr = otsu_threshold(post_cells);
  double fg_cells = 0.0;
  for (size_t i = 0; i < post_cells.data.size(); ++i) {
    const uint8_t on = post_cells.data[i] > thr ? 1 : 0;
    mask.cells[i] = on;
    fg_cells += on;
  }
  const double ratio = fg_cells / prev_target_area;
  mask.informative = fg_cells > 0.0 && ratio >= tau_l && ratio <= tau_u;
  if (!mask.informative) std::fill(mask.cells.begin(), mask.cells.end(), 1);
  return mask;
}

/// Bin-wise convex blend of fg and bg histograms.
inline ColorModel update_color_model(const ColorModel& old_model,
                                     const ColorModel& new_model, double rate) {
  if (!old_model.valid || !new_model.valid)
    throw std::invalid_argument("update requires two valid color models");
  if (rate < 0.0 || rate > 1.0)
    throw std::invalid_argument("rate must be within [0,1]");
  ColorModel out;
  out.valid = true;
  for (int i = 0; i < ColorModel::kCells; ++i) {
    out.fg[i] = (1.0 - rate) * old_model.fg[i] + rate * new_model.fg[i];
    out.bg[i] = (1.0 - rate) * old_model.bg[i] + rate * new_model.bg[i];
  }
  return out;
}

}  // namespace cftrack
