#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cftrack/geometry.hpp"

namespace cftrack {

/// A sequence on disk: ordered frame paths plus per-frame ground truth.
/// Ground-truth rows may be fewer than frames; the missing tail is excluded
/// from metrics.
struct SequenceSpec {
  std::string name;
  std::vector<std::string> frame_paths;
  std::vector<BoundingBox> ground_truth;

  const BoundingBox& initial_box() const {
    if (ground_truth.empty())
      throw std::runtime_error("sequence has no ground truth");
    return ground_truth.front();
  }
};

namespace detail {

inline long numeric_stem(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  std::string digits;
  for (char c : stem)
    if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
  return digits.empty() ? -1 : std::stol(digits);
}

inline std::vector<double> parse_gt_row(const std::string& line) {
  std::string norm = line;
  for (char& c : norm)
    if (c == ',' || c == '\t' || c == ';') c = ' ';
  std::istringstream ss(norm);
  std::vector<double> vals;
  double v;
  while (ss >> v) vals.push_back(v);
  return vals;
}

}  // namespace detail

/// Loads an OTB-layout sequence: DIR/img/ with numbered frames and
/// DIR/groundtruth_rect.txt with "x,y,w,h" rows. OTB coordinates are
/// 1-based; `one_based` converts them to 0-based.
inline SequenceSpec load_sequence(const std::string& dir, bool one_based = true) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  const fs::path img_dir = root / "img";
  if (!fs::is_directory(img_dir))
    throw std::runtime_error("missing image directory: " + img_dir.string());

  SequenceSpec spec;
  spec.name = root.filename().string();
  if (spec.name.empty()) spec.name = root.parent_path().filename().string();

  std::vector<fs::path> frames;
  for (const auto& e : fs::directory_iterator(img_dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".ppm" ||
        ext == ".pgm")
      frames.push_back(e.path());
  }
  std::sort(frames.begin(), frames.end(),
            [](const fs::path& a, const fs::path& b) {
              const long na = detail::numeric_stem(a);
              const long nb = detail::numeric_stem(b);
              if (na != nb) return na < nb;
              return a.filename().string() < b.filename().string();
            });
  for (const auto& p : frames) spec.frame_paths.push_back(p.string());
  if (spec.frame_paths.size() < 2)
    throw std::runtime_error("sequence needs at least 2 frames in " +
                             img_dir.string());

  const fs::path gt_path = root / "groundtruth_rect.txt";
  std::ifstream gt(gt_path);
  if (!gt)
    throw std::runtime_error("missing ground truth file: " + gt_path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(gt, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto vals = detail::parse_gt_row(line);
    if (vals.size() < 4)
      throw std::runtime_error("unparseable ground truth at " +
                               gt_path.string() + ":" + std::to_string(line_no));
    const double off = one_based ? 1.0 : 0.0;
    spec.ground_truth.push_back({vals[0] - off, vals[1] - off, vals[2], vals[3]});
  }
  if (spec.ground_truth.empty())
    throw std::runtime_error("empty ground truth file: " + gt_path.string());
  if (spec.ground_truth.size() > spec.frame_paths.size())
    throw std::runtime_error("more ground truth rows than frames in " + dir);
  return spec;
}

/// Writes ground truth in the same convention load_sequence parses, with
/// round-trip-exact number formatting.
inline void save_ground_truth(const std::string& path,
                              const std::vector<BoundingBox>& boxes,
                              bool one_based = true) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  const double off = one_based ? 1.0 : 0.0;
  for (const auto& b : boxes)
    out << b.x + off << "," << b.y + off << "," << b.w << "," << b.h << "\n";
}

}  // namespace cftrack
