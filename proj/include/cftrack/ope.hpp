#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cftrack/geometry.hpp"

namespace cftrack {

/// Intersection-over-union of two boxes, in [0,1].
inline double overlap(const BoundingBox& a, const BoundingBox& b) {
  a.validate();
  b.validate();
  const double inter = intersect(a, b).area();
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

/// Euclidean distance between box centers, in pixels.
inline double center_error(const BoundingBox& a, const BoundingBox& b) {
  const Point2 ca = a.center();
  const Point2 cb = b.center();
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

/// One-pass-evaluation curves.
/// Precision: fraction of frames with center error <= t for t = 0..50 px.
/// Success: fraction of frames with overlap strictly greater than th, over
/// the grid {0, 0.02, ..., 0.98} (the strict inequality makes th = 1 always
/// empty, so the grid covers [0,1)). AUC is the mean of the success values.
struct OpeMetrics {
  static constexpr int kPrecisionPoints = 51;
  static constexpr int kSuccessPoints = 50;
  std::vector<double> precision;  // index = pixel threshold
  std::vector<double> success;    // index i -> threshold 0.02*i
  double precision_at_20 = 0.0;
  double auc = 0.0;
};

inline OpeMetrics compute_ope(const std::vector<BoundingBox>& run,
                              const std::vector<BoundingBox>& gt) {
  if (run.empty() || gt.empty())
    throw std::invalid_argument("empty run or ground truth");
  if (run.size() < gt.size())
    throw std::runtime_error("run is shorter than the ground truth");
  const size_t n = gt.size();

  std::vector<double> errs(n), ious(n);
  for (size_t i = 0; i < n; ++i) {
    errs[i] = center_error(run[i], gt[i]);
    ious[i] = overlap(run[i], gt[i]);
  }

  OpeMetrics m;
  m.precision.resize(OpeMetrics::kPrecisionPoints);
  for (int t = 0; t < OpeMetrics::kPrecisionPoints; ++t) {
    int hits = 0;
    for (double e : errs) hits += e <= t ? 1 : 0;
    m.precision[t] = double(hits) / double(n);
  }
  m.success.resize(OpeMetrics::kSuccessPoints);
  double auc_acc = 0.0;
  for (int i = 0; i < OpeMetrics::kSuccessPoints; ++i) {
    const double th = 0.02 * i;
    int hits = 0;
    for (double r : ious) hits += r > th ? 1 : 0;
    m.success[i] = double(hits) / double(n);
    auc_acc += m.success[i];
  }
  m.auc = auc_acc / OpeMetrics::kSuccessPoints;
  m.precision_at_20 = m.precision[20];
  return m;
}

/// Curve points as CSV: one row per grid point, "curve,threshold,value".
inline void write_curves_csv(const std::string& path, const OpeMetrics& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "curve,threshold,value\n";
  for (int t = 0; t < OpeMetrics::kPrecisionPoints; ++t)
    out << "precision," << t << "," << m.precision[t] << "\n";
  for (int i = 0; i < OpeMetrics::kSuccessPoints; ++i)
    out << "success," << 0.02 * i << "," << m.success[i] << "\n";
}

}  // namespace cftrack
