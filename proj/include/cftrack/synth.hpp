#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cftrack/image.hpp"
#include "cftrack/image_io.hpp"
#include "cftrack/sequence.hpp"

namespace cftrack {

struct SynthParams {
  std::string scenario = "translate";  // translate | zoom | occlude | distractor
  int frames = 100;
  int width = 128;
  int height = 128;
  int target_w = 24;
  int target_h = 24;
  double start_x = -1;  // top-left; negative -> scenario default
  double start_y = -1;
  double vx = 2.0;
  double vy = 0.0;
  int occl_start = 20;
  int occl_end = 30;
  double zoom = 1.01;
  double distractor_gap = 1.5;  // closest approach, in target widths
  uint64_t seed = 1234;
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double hash_unit(uint64_t a, uint64_t b, uint64_t seed) {
  const uint64_t h = splitmix64(splitmix64(a * 0x100000001b3ULL ^ seed) ^ b);
  return (h >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

// Blue/green tiled background with light per-pixel noise.
inline void bg_pixel(int r, int c, uint64_t seed, double* rgb) {
  const uint64_t tr = static_cast<uint64_t>(r / 8);
  const uint64_t tc = static_cast<uint64_t>(c / 8);
  rgb[0] = 0.08 + 0.20 * hash_unit(tr, tc, seed);
  rgb[1] = 0.25 + 0.40 * hash_unit(tr, tc, seed ^ 0x5bf0ULL);
  rgb[2] = 0.35 + 0.45 * hash_unit(tr, tc, seed ^ 0xa7c3ULL);
  const double n = 0.04 * (hash_unit(r, c, seed ^ 0x11d2ULL) - 0.5);
  for (int i = 0; i < 3; ++i) rgb[i] += n;
}

// Red/yellow tiled target texture in normalized coordinates, dark border.
inline void target_pixel(double u, double v, uint64_t seed, double* rgb) {
  if (u < 0.08 || v < 0.08 || u > 0.92 || v > 0.92) {
    rgb[0] = 0.05;
    rgb[1] = 0.02;
    rgb[2] = 0.02;
    return;
  }
  const uint64_t tu = static_cast<uint64_t>(u * 6.0);
  const uint64_t tv = static_cast<uint64_t>(v * 6.0);
  rgb[0] = 0.70 + 0.28 * hash_unit(tu, tv, seed ^ 0x77aaULL);
  rgb[1] = 0.20 + 0.55 * hash_unit(tu, tv, seed ^ 0x3c19ULL);
  rgb[2] = 0.05 + 0.12 * hash_unit(tu, tv, seed ^ 0xe401ULL);
}

inline void render_object(Image& img, const BoundingBox& box, uint64_t seed) {
  const int r0 = std::max(0, static_cast<int>(std::floor(box.y)));
  const int r1 = std::min(img.height, static_cast<int>(std::ceil(box.y + box.h)));
  const int c0 = std::max(0, static_cast<int>(std::floor(box.x)));
  const int c1 = std::min(img.width, static_cast<int>(std::ceil(box.x + box.w)));
  double rgb[3];
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) {
      const double u = (c + 0.5 - box.x) / box.w;
      const double v = (r + 0.5 - box.y) / box.h;
      if (u < 0.0 || u >= 1.0 || v < 0.0 || v >= 1.0) continue;
      target_pixel(u, v, seed, rgb);
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = rgb[ch];
    }
}

inline Image render_background(const SynthParams& p) {
  Image img(p.height, p.width, 3);
  double rgb[3];
  for (int r = 0; r < p.height; ++r)
    for (int c = 0; c < p.width; ++c) {
      bg_pixel(r, c, p.seed, rgb);
      for (int ch = 0; ch < 3; ++ch)
        img.at(r, c, ch) = std::clamp(rgb[ch], 0.0, 1.0);
    }
  return img;
}

}  // namespace detail

/// Renders a deterministic synthetic sequence with exact ground truth into
/// out_dir (OTB layout: img/%04d.png + groundtruth_rect.txt + meta.json).
inline SequenceSpec synth_sequence(const SynthParams& p, const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (p.frames < 2) throw std::invalid_argument("need at least 2 frames");
  if (p.target_w < 4 || p.target_h < 4)
    throw std::invalid_argument("target too small");
  if (p.scenario != "translate" && p.scenario != "zoom" &&
      p.scenario != "occlude" && p.scenario != "distractor")
    throw std::invalid_argument("unknown scenario: " + p.scenario);

  fs::create_directories(fs::path(out_dir) / "img");
  const Image background = detail::render_background(p);

  const double margin = 2.0;
  double x = p.start_x, y = p.start_y;
  if (x < 0) x = p.scenario == "translate" ? margin + 2 : (p.width - p.target_w) / 2.0;
  if (y < 0) y = (p.height - p.target_h) / 2.0;
  double w = p.target_w, h = p.target_h;
  double vx = p.vx, vy = p.vy;
  if (p.scenario == "occlude" || p.scenario == "zoom") vx = vy = 0.0;

  std::vector<BoundingBox> gt;
  SequenceSpec spec;
  spec.name = fs::path(out_dir).filename().string();

  for (int t = 0; t < p.frames; ++t) {
    const BoundingBox box{x, y, w, h};
    if (box.x < 0 || box.y < 0 || box.x + box.w > p.width ||
        box.y + box.h > p.height)
      throw std::runtime_error("target leaves the frame at frame " +
                               std::to_string(t));
    gt.push_back(box);

    Image frame = background;
    if (p.scenario == "distractor") {
      // Identical object sweeping vertically at the closest-approach column.
      const double dx = box.center().x + p.distractor_gap * w;
      const double span = p.height - h - 2 * margin;
      const double dy0 = margin + span * t / double(p.frames - 1);
      detail::render_object(frame, BoundingBox::from_center({dx, dy0 + h / 2}, w, h),
                            p.seed ^ 0ULL);
    }
    const bool occluded =
        p.scenario == "occlude" && t >= p.occl_start && t <= p.occl_end;
    if (!occluded) detail::render_object(frame, box, p.seed);

    char name[32];
    std::snprintf(name, sizeof(name), "%04d.png", t + 1);
    const std::string path = (fs::path(out_dir) / "img" / name).string();
    save_image(path, frame);
    spec.frame_paths.push_back(path);

    // Advance the path.
    if (p.scenario == "translate" || p.scenario == "distractor") {
      double nx = x + vx, ny = y + vy;
      if (nx < margin || nx + w > p.width - margin) {
        vx = -vx;
        nx = x + vx;
      }
      if (ny < margin || ny + h > p.height - margin) {
        vy = -vy;
        ny = y + vy;
      }
      x = nx;
      y = ny;
    } else if (p.scenario == "zoom") {
      const Point2 c{x + w / 2, y + h / 2};
      w *= p.zoom;
      h *= p.zoom;
      x = c.x - w / 2;
      y = c.y - h / 2;
    }
  }

  save_ground_truth((fs::path(out_dir) / "groundtruth_rect.txt").string(), gt);
  spec.ground_truth = std::move(gt);

  nlohmann::ordered_json meta;
  meta["scenario"] = p.scenario;
  meta["seed"] = p.seed;
  meta["frames"] = p.frames;
  meta["width"] = p.width;
  meta["height"] = p.height;
  meta["target_w"] = p.target_w;
  meta["target_h"] = p.target_h;
  meta["vx"] = p.vx;
  meta["vy"] = p.vy;
  meta["occl_start"] = p.occl_start;
  meta["occl_end"] = p.occl_end;
  meta["zoom"] = p.zoom;
  meta["distractor_gap"] = p.distractor_gap;
  std::ofstream((fs::path(out_dir) / "meta.json").string()) << meta.dump(2) << "\n";
  return spec;
}

}  // namespace cftrack
