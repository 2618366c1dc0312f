#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cftrack/image.hpp"
#include "cftrack/mat.hpp"

namespace cftrack {

/// Multi-channel spatial feature tensor over a patch, planar layout [d][r][c].
/// cell_size is the pixel footprint of one cell (0 when not cell-based).
struct FeatureMap {
  int rows = 0;
  int cols = 0;
  int depth = 0;
  int cell_size = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int r, int c, int d, int cell = 0)
      : rows(r), cols(c), depth(d), cell_size(cell),
        data(static_cast<size_t>(r) * c * d, 0.0) {}

  double* channel(int d) {
    return data.data() + static_cast<size_t>(d) * rows * cols;
  }
  const double* channel(int d) const {
    return data.data() + static_cast<size_t>(d) * rows * cols;
  }
  double& at(int r, int c, int d) {
    return data[(static_cast<size_t>(d) * rows + r) * cols + c];
  }
  double at(int r, int c, int d) const {
    return data[(static_cast<size_t>(d) * rows + r) * cols + c];
  }
};

/// RGB -> 11 color-name probabilities, quantized 32x32x32.
/// Row index = qR + 32*qG + 1024*qB with q = byte >> 3.
/// Text format: 32768 lines of 11 whitespace-separated probabilities.
/// Binary format (".bin"): 32768*11 little-endian float64 values.
struct ColorNamesTable {
  static constexpr int kRows = 32 * 32 * 32;
  static constexpr int kDims = 11;
  std::vector<double> probs;  // kRows * kDims

  const double* row(uint8_t r, uint8_t g, uint8_t b) const {
    const int idx = (r >> 3) + 32 * (g >> 3) + 1024 * (b >> 3);
    return probs.data() + static_cast<size_t>(idx) * kDims;
  }
};

inline ColorNamesTable load_colornames(const std::string& path) {
  ColorNamesTable t;
  t.probs.resize(static_cast<size_t>(ColorNamesTable::kRows) *
                 ColorNamesTable::kDims);
  const bool binary = path.size() > 4 && path.substr(path.size() - 4) == ".bin";
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("color table unavailable: " + path);
  if (binary) {
    in.read(reinterpret_cast<char*>(t.probs.data()),
            static_cast<std::streamsize>(t.probs.size() * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != t.probs.size() * sizeof(double))
      throw std::runtime_error("color table unavailable: truncated " + path);
  } else {
    for (auto& v : t.probs) {
      in >> v;
      if (!in)
        throw std::runtime_error("color table unavailable: parse error in " +
                                 path);
    }
  }
  return t;
}

struct FeatureConfig {
  int cell_size = 4;
  int hog_bins = 9;
  std::string colornames_path;  // empty -> cell-averaged color fallback
};

/// Extracts per-cell gradient orientation histograms plus color channels.
/// Loads the color-name table once at construction when configured.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureConfig cfg = {}) : cfg_(std::move(cfg)) {
    if (cfg_.cell_size <= 0)
      throw std::invalid_argument("cell_size must be positive");
    if (cfg_.hog_bins <= 0)
      throw std::invalid_argument("hog_bins must be positive");
    if (!cfg_.colornames_path.empty())
      table_ = load_colornames(cfg_.colornames_path);
  }

  const FeatureConfig& config() const { return cfg_; }

  int depth_for(const Image& patch) const {
    if (patch.color()) return cfg_.hog_bins + (table_ ? 11 : 3);
    return cfg_.hog_bins + 1;
  }

  FeatureMap operator()(const Image& patch) const {
    if (patch.empty()) throw std::invalid_argument("empty image");
    const int cell = cfg_.cell_size;
    if (patch.height < cell || patch.width < cell)
      throw std::invalid_argument("patch smaller than one cell");

    const int rows = patch.height / cell;
    const int cols = patch.width / cell;
    const int bins = cfg_.hog_bins;
    FeatureMap fm(rows, cols, depth_for(patch), cell);

    // Gradient orientation histogram per cell, unsigned orientations in
    // [0, pi), bilinear voting between the two nearest bins, central
    // differences on the luminance with replicated borders. Magnitudes are
    // averaged over the cell area.
    const double inv_area = 1.0 / (cell * cell);
    for (int r = 0; r < rows * cell; ++r) {
      const int cr = r / cell;
      for (int c = 0; c < cols * cell; ++c) {
        const int cc = c / cell;
        const double gx = (patch.luminance(r, std::min(c + 1, patch.width - 1)) -
                           patch.luminance(r, std::max(c - 1, 0))) /
                          2.0;
        const double gy =
            (patch.luminance(std::min(r + 1, patch.height - 1), c) -
             patch.luminance(std::max(r - 1, 0), c)) /
            2.0;
        const double mag = std::hypot(gx, gy);
        if (mag == 0.0) continue;
        double theta = std::atan2(gy, gx);
        if (theta < 0) theta += std::numbers::pi;
        if (theta >= std::numbers::pi) theta -= std::numbers::pi;
        const double o = theta / std::numbers::pi * bins;
        const int b0 = std::min(static_cast<int>(o), bins - 1);
        const double f = o - b0;
        fm.at(cr, cc, b0) += mag * (1.0 - f) * inv_area;
        fm.at(cr, cc, (b0 + 1) % bins) += mag * f * inv_area;
      }
    }

    // Color channels: color-name lookup when the table is loaded, else
    // cell-averaged raw channels.
    if (patch.color() && table_) {
      for (int r = 0; r < rows * cell; ++r)
        for (int c = 0; c < cols * cell; ++c) {
          const auto b = [&](int ch) {
            return static_cast<uint8_t>(
                std::lround(std::clamp(patch.at(r, c, ch), 0.0, 1.0) * 255.0));
          };
          const double* p = table_->row(b(0), b(1), b(2));
          for (int d = 0; d < 11; ++d)
            fm.at(r / cell, c / cell, bins + d) += p[d] * inv_area;
        }
    } else {
      const int nch = patch.color() ? 3 : 1;
      for (int r = 0; r < rows * cell; ++r)
        for (int c = 0; c < cols * cell; ++c)
          for (int ch = 0; ch < nch; ++ch)
            fm.at(r / cell, c / cell, bins + ch) +=
                patch.at(r, c, ch) * inv_area;
    }

    // Mean-subtract every channel over the whole map.
    const size_t plane = static_cast<size_t>(rows) * cols;
    for (int d = 0; d < fm.depth; ++d) {
      double* p = fm.channel(d);
      double mean = 0.0;
      for (size_t i = 0; i < plane; ++i) mean += p[i];
      mean /= static_cast<double>(plane);
      for (size_t i = 0; i < plane; ++i) p[i] -= mean;
    }
    return fm;
  }

 private:
  FeatureConfig cfg_;
  std::optional<ColorNamesTable> table_;
};

/// Convenience wrapper constructing a throwaway extractor.
inline FeatureMap compute_features(const Image& patch, const FeatureConfig& cfg) {
  return FeatureExtractor(cfg)(patch);
}

/// Separable Hann window, outer product of 1-D Hann vectors; values in [0,1].
inline Mat2d cosine_window(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("window shape must be at least 1x1");
  auto hann = [](int n) {
    std::vector<double> v(n, 1.0);
    if (n > 1)
      for (int i = 0; i < n; ++i)
        v[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
    return v;
  };
  const auto hr = hann(rows);
  const auto hc = hann(cols);
  Mat2d w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w.at(r, c) = hr[r] * hc[c];
  return w;
}

/// Periodic 2-D Gaussian regression label: peak value 1 at the zero-shift
/// position (0,0), falling off with circular distance.
inline LabelMap gaussian_label(int rows, int cols, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("label sigma must be positive");
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("label shape must be at least 1x1");
  LabelMap y(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const double dr = std::min(r, rows - r);
    for (int c = 0; c < cols; ++c) {
      const double dc = std::min(c, cols - c);
      y.at(r, c) = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
    }
  }
  return y;
}

/// Applies a window element-wise to every channel.
inline FeatureMap apply_window(FeatureMap fm, const Mat2d& win) {
  if (fm.rows != win.rows || fm.cols != win.cols)
    throw std::invalid_argument("window shape mismatch");
  const size_t plane = static_cast<size_t>(fm.rows) * fm.cols;
  for (int d = 0; d < fm.depth; ++d) {
    double* p = fm.channel(d);
    for (size_t i = 0; i < plane; ++i) p[i] *= win.data[i];
  }
  return fm;
}

}  // namespace cftrack
