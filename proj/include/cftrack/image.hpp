#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cftrack/geometry.hpp"

namespace cftrack {

/// Interleaved row-major image with intensities in [0,1].
/// channels is 1 (gray) or 3 (color).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int ch, double fill = 0.0)
      : height(h), width(w), channels(ch),
        data(static_cast<size_t>(h) * w * ch, fill) {}

  bool empty() const { return height <= 0 || width <= 0 || channels <= 0; }
  bool color() const { return channels == 3; }

  double& at(int r, int c, int ch) {
    return data[(static_cast<size_t>(r) * width + c) * channels + ch];
  }
  double at(int r, int c, int ch) const {
    return data[(static_cast<size_t>(r) * width + c) * channels + ch];
  }

  /// Border-replicated access.
  double at_clamped(int r, int c, int ch) const {
    r = std::clamp(r, 0, height - 1);
    c = std::clamp(c, 0, width - 1);
    return at(r, c, ch);
  }

  double luminance(int r, int c) const {
    if (channels == 1) return at(r, c, 0);
    return 0.299 * at(r, c, 0) + 0.587 * at(r, c, 1) + 0.114 * at(r, c, 2);
  }
};

/// Bilinear resample to out_h x out_w. Identity sizes return a copy.
inline Image resize_bilinear(const Image& src, int out_h, int out_w) {
  if (src.empty()) throw std::invalid_argument("empty image");
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("empty output size");
  if (out_h == src.height && out_w == src.width) return src;

  Image dst(out_h, out_w, src.channels);
  const double sy = static_cast<double>(src.height) / out_h;
  const double sx = static_cast<double>(src.width) / out_w;
  for (int r = 0; r < out_h; ++r) {
    const double fy = (r + 0.5) * sy - 0.5;
    const int y0 = static_cast<int>(std::floor(fy));
    const double wy = fy - y0;
    for (int c = 0; c < out_w; ++c) {
      const double fx = (c + 0.5) * sx - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const double wx = fx - x0;
      for (int ch = 0; ch < src.channels; ++ch) {
        const double v00 = src.at_clamped(y0, x0, ch);
        const double v01 = src.at_clamped(y0, x0 + 1, ch);
        const double v10 = src.at_clamped(y0 + 1, x0, ch);
        const double v11 = src.at_clamped(y0 + 1, x0 + 1, ch);
        dst.at(r, c, ch) = v00 * (1 - wy) * (1 - wx) + v01 * (1 - wy) * wx +
                           v10 * wy * (1 - wx) + v11 * wy * wx;
      }
    }
  }
  return dst;
}

/// Crop of size (w, h) centered at `center`, border-replicated where it
/// leaves the image, then resized to (out_w, out_h). The crop covers pixel
/// columns [x0, x0 + w) with x0 = round(center.x - w/2), same for rows.
inline Image extract_patch(const Image& img, Point2 center, int w, int h,
                           int out_w, int out_h) {
  if (img.empty()) throw std::invalid_argument("empty image");
  if (w <= 0 || h <= 0 || out_w <= 0 || out_h <= 0)
    throw std::invalid_argument("patch size must be positive");

  const int x0 = static_cast<int>(std::floor(center.x - w / 2.0 + 0.5));
  const int y0 = static_cast<int>(std::floor(center.y - h / 2.0 + 0.5));

  Image crop(h, w, img.channels);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < img.channels; ++ch)
        crop.at(r, c, ch) = img.at_clamped(y0 + r, x0 + c, ch);

  if (out_w == w && out_h == h) return crop;
  return resize_bilinear(crop, out_h, out_w);
}

/// Draw an axis-aligned rectangle outline (2 px wide), for rendered output.
inline void draw_box(Image& img, const BoundingBox& b, double r, double g,
                     double bl) {
  const int x0 = static_cast<int>(std::lround(b.x));
  const int y0 = static_cast<int>(std::lround(b.y));
  const int x1 = static_cast<int>(std::lround(b.x + b.w)) - 1;
  const int y1 = static_cast<int>(std::lround(b.y + b.h)) - 1;
  auto put = [&](int rr, int cc) {
    if (rr < 0 || rr >= img.height || cc < 0 || cc >= img.width) return;
    if (img.channels == 1) {
      img.at(rr, cc, 0) = (r + g + bl) / 3.0;
    } else {
      img.at(rr, cc, 0) = r;
      img.at(rr, cc, 1) = g;
      img.at(rr, cc, 2) = bl;
    }
  };
  for (int t = 0; t < 2; ++t) {
    for (int c = x0; c <= x1; ++c) {
      put(y0 + t, c);
      put(y1 - t, c);
    }
    for (int rr = y0; rr <= y1; ++rr) {
      put(rr, x0 + t);
      put(rr, x1 - t);
    }
  }
}

}  // namespace cftrack
