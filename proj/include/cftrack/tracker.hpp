#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cftrack/admm.hpp"
#include "cftrack/features.hpp"
#include "cftrack/geometry.hpp"
#include "cftrack/image.hpp"
#include "cftrack/reliability.hpp"
#include "cftrack/spectral.hpp"

namespace cftrack {

struct TrackerConfig {
  int k_context = 4;       // context patches per frame
  double eta_c = 0.015;    // filter learning rate
  double eta_h = 0.04;     // histogram learning rate
  double theta1 = 0.6;     // S_max threshold ratio
  double theta2 = 0.5;     // kurtosis threshold ratio
  std::vector<double> scales = {0.94, 0.96, 0.98, 1.0, 1.02, 1.04, 1.06};
  double padding = 2.5;    // search window / target size
  double tau_l = 0.3;      // informativeness lower bound
  double tau_u = 1.5;      // informativeness upper bound
  int template_max_cells = 96;
  bool subcell = true;     // parabolic peak refinement
  bool history_includes_gated_out = false;
  AdmmConfig admm;
  FeatureConfig features;

  void validate() const {
    if (k_context < 0 || k_context > 4)
      throw std::invalid_argument("k_context must be within [0, 4]");
    if (eta_c <= 0 || eta_c > 1 || eta_h <= 0 || eta_h > 1)
      throw std::invalid_argument("learning rates must be in (0,1]");
    if (theta1 <= 0 || theta1 > 1 || theta2 <= 0 || theta2 > 1)
      throw std::invalid_argument("threshold ratios must be in (0,1]");
    if (padding <= 1.0) throw std::invalid_argument("padding must exceed 1");
    if (tau_l < 0 || tau_u < tau_l)
      throw std::invalid_argument("invalid informativeness bounds");
    if (template_max_cells < 4)
      throw std::invalid_argument("template_max_cells too small");
    if (std::find(scales.begin(), scales.end(), 1.0) == scales.end())
      throw std::invalid_argument("scale set must contain 1.0");
    for (double s : scales)
      if (s <= 0) throw std::invalid_argument("scales must be positive");
    admm.validate();
  }
};

/// Correlation response with its peak statistics. Ties break to the
/// row-major first occurrence.
struct ResponseMap {
  Mat2d map;
  double s_max = 0.0;
  int peak_row = 0;
  int peak_col = 0;

  static ResponseMap from(Mat2d m) {
    ResponseMap r;
    auto [pr, pc] = argmax(m);
    r.peak_row = pr;
    r.peak_col = pc;
    r.s_max = m.at(pr, pc);
    r.map = std::move(m);
    return r;
  }
};

struct MonitorReport {
  double s_max = 0.0;
  double bk = 0.0;        // excess kurtosis of the response
  bool updated = false;   // model update performed this frame
  bool informative = false;  // color informativeness test passed
};

struct Detection {
  Point2 position;
  int scale_index = 0;
  ResponseMap response;
};

/// Excess kurtosis mu4/sigma^4 - 3 of all response values as one sample.
inline double excess_kurtosis(const Mat2d& resp) {
  const size_t n = resp.data.size();
  if (n < 4) throw std::invalid_argument("response too small for kurtosis");
  double mean = 0.0;
  for (double v : resp.data) mean += v;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m4 = 0.0;
  for (double v : resp.data) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (m2 == 0.0) throw std::runtime_error("degenerate response");
  return m4 / (m2 * m2) - 3.0;
}

/// High-confidence gate: both statistics must exceed their thresholds.
inline bool passes_update_gate(double s_max, double bk, double s_tr, double bk_tr) {
  return s_max > s_tr && bk > bk_tr;
}

/// Scale evaluation order: 1.0 first, then ascending |scale - 1| (smaller
/// scale first on equal distance). Earlier entries win exact response ties.
inline std::vector<int> scale_preference(const std::vector<double>& scales) {
  std::vector<int> order(scales.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = std::abs(scales[a] - 1.0);
    const double db = std::abs(scales[b] - 1.0);
    if (da != db) return da < db;
    return scales[a] < scales[b];
  });
  return order;
}

struct TrackerState {
  Point2 position;
  double width = 0.0;   // current target size in pixels
  double height = 0.0;

  // Fixed template geometry, set at init.
  int tmpl_rows = 0, tmpl_cols = 0;   // feature cells
  int tmpl_w = 0, tmpl_h = 0;         // template pixels
  double prev_target_area = 0.0;      // target footprint in cells

  Spectrum det_spec;     // blended detection filter spectrum (of w_r)
  FeatureMap det_filter; // blended spatial w_r
  Spectrum y_spec;
  LabelMap label;
  Mat2d window;

  ColorModel color;
  double smax_sum = 0.0, bk_sum = 0.0;
  int history_len = 0;
  double s_tr = 0.0, bk_tr = 0.0;
  int frame_index = 0;

  BoundingBox box() const {
    return BoundingBox::from_center(position, width, height);
  }
};

/// Debug payload for mask dumps: the search window, the pixel-resolution
/// posterior (empty when no color model) and the cell mask.
struct TrackerDebugFrame {
  Image window;
  PosteriorMap posterior;
  ReliabilityMask mask;
};

class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {})
      : cfg_(std::move(cfg)), fx_(cfg_.features) {
    cfg_.validate();
    scale_order_ = scale_preference(cfg_.scales);
  }

  const TrackerConfig& config() const { return cfg_; }
  const TrackerState& state() const { return st_; }
  bool initialized() const { return st_.frame_index >= 1; }

  void set_debug_hook(std::function<void(const TrackerDebugFrame&)> hook) {
    debug_hook_ = std::move(hook);
  }

  MonitorReport init(const Image& frame, const BoundingBox& bbox) {
    bbox.validate();
    if (frame.empty()) throw std::invalid_argument("empty image");
    const BoundingBox frame_box{0, 0, double(frame.width), double(frame.height)};
    if (intersect(bbox, frame_box).area() < 1.0)
      throw std::invalid_argument("initial box lies outside the frame");

    st_ = TrackerState{};
    st_.position = bbox.center();
    st_.width = bbox.w;
    st_.height = bbox.h;

    const int cell = cfg_.features.cell_size;
    const auto round_even = [](double v) {
      return std::max(2L, 2 * std::lround(v / 2.0));
    };
    const long win_w0 = round_even(st_.width * cfg_.padding);
    const long win_h0 = round_even(st_.height * cfg_.padding);
    int cols = std::max(2, static_cast<int>(win_w0 / cell));
    int rows = std::max(2, static_cast<int>(win_h0 / cell));
    const int mx = std::max(rows, cols);
    if (mx > cfg_.template_max_cells) {
      const double shrink = double(cfg_.template_max_cells) / mx;
      rows = std::max(2, static_cast<int>(std::lround(rows * shrink)));
      cols = std::max(2, static_cast<int>(std::lround(cols * shrink)));
    }
    st_.tmpl_rows = rows;
    st_.tmpl_cols = cols;
    st_.tmpl_w = cols * cell;
    st_.tmpl_h = rows * cell;
    st_.prev_target_area =
        (rows / cfg_.padding) * (cols / cfg_.padding);

    const double aspect = std::max(st_.width, st_.height) /
                          std::min(st_.width, st_.height);
    const double sigma_factor = aspect <= 2.0 ? 1.0 : 0.25;
    const double sigma = sigma_factor * std::sqrt(double(rows) * cols) / 10.0;
    st_.label = gaussian_label(rows, cols, sigma);
    st_.y_spec = fft2(st_.label);
    st_.window = cosine_window(rows, cols);

    auto [jf, a0_spec, informative] = train(frame, /*first_frame=*/true);
    st_.det_spec = jf.wr_hat;
    st_.det_filter = jf.w_r;

    // Seed the monitor histories from the filter response on its own
    // training window.
    ResponseMap resp = ResponseMap::from(correlate(a0_spec, st_.det_spec));
    const double bk = excess_kurtosis(resp.map);
    push_history(resp.s_max, bk);

    st_.frame_index = 1;
    return MonitorReport{resp.s_max, bk, true, informative};
  }

  Detection detect(const Image& frame) const {
    require_initialized();
    Detection best;
    double best_val = -std::numeric_limits<double>::infinity();
    int best_win_w = 0, best_win_h = 0;
    for (int idx : scale_order_) {
      const double s = cfg_.scales[idx];
      const auto [win_w, win_h] =
          window_pixels(st_.width * cfg_.padding * s, st_.height * cfg_.padding * s);
      Spectrum z = window_spectrum(frame, st_.position, win_w, win_h);
      ResponseMap resp = ResponseMap::from(correlate(z, st_.det_spec));
      if (resp.s_max > best_val) {
        best_val = resp.s_max;
        best.scale_index = idx;
        best.response = std::move(resp);
        best_win_w = win_w;
        best_win_h = win_h;
      }
    }

    const auto& r = best.response;
    double dr = r.peak_row > st_.tmpl_rows / 2 ? r.peak_row - st_.tmpl_rows
                                               : r.peak_row;
    double dc = r.peak_col > st_.tmpl_cols / 2 ? r.peak_col - st_.tmpl_cols
                                               : r.peak_col;
    if (cfg_.subcell) {
      dr += parabolic_offset(r.map, r.peak_row, r.peak_col, /*vertical=*/true);
      dc += parabolic_offset(r.map, r.peak_row, r.peak_col, /*vertical=*/false);
    }
    const int cell = cfg_.features.cell_size;
    best.position.x =
        st_.position.x + dc * cell * (double(best_win_w) / st_.tmpl_w);
    best.position.y =
        st_.position.y + dr * cell * (double(best_win_h) / st_.tmpl_h);
    best.position.x = std::clamp(best.position.x, 0.0, double(frame.width - 1));
    best.position.y = std::clamp(best.position.y, 0.0, double(frame.height - 1));
    return best;
  }

  bool should_update(double s_max, double bk) const {
    if (st_.frame_index <= 1 && st_.history_len == 0) return true;
    return passes_update_gate(s_max, bk, st_.s_tr, st_.bk_tr);
  }

  std::pair<BoundingBox, MonitorReport> step(const Image& frame) {
    require_initialized();
    Detection det = detect(frame);
    const double s_max = det.response.s_max;
    const double bk = excess_kurtosis(det.response.map);
    const bool gate = should_update(s_max, bk);

    st_.position = det.position;
    MonitorReport report{s_max, bk, gate, false};

    if (gate) {
      auto [jf, a0_spec, informative] = train(frame, /*first_frame=*/false);
      report.informative = informative;
      blend_filter(jf, cfg_.eta_c);
      const double s = cfg_.scales[det.scale_index];
      st_.width *= s;
      st_.height *= s;
      push_history(s_max, bk);
    } else if (cfg_.history_includes_gated_out) {
      push_history(s_max, bk);
    }
    st_.frame_index += 1;
    return {st_.box(), report};
  }

  /// Exponential moving-average update of the stored detection filter.
  void blend_filter(const JointFilter& jf, double eta) {
    if (!jf.wr_hat.same_shape(st_.det_spec))
      throw std::invalid_argument("filter shape mismatch");
    for (size_t i = 0; i < st_.det_spec.data.size(); ++i)
      st_.det_spec.data[i] =
          (1.0 - eta) * st_.det_spec.data[i] + eta * jf.wr_hat.data[i];
    for (size_t i = 0; i < st_.det_filter.data.size(); ++i)
      st_.det_filter.data[i] =
          (1.0 - eta) * st_.det_filter.data[i] + eta * jf.w_r.data[i];
  }

  /// Context window centers: one full target extent along each axis.
  std::vector<Point2> context_centers() const {
    return {{st_.position.x - st_.width, st_.position.y},
            {st_.position.x + st_.width, st_.position.y},
            {st_.position.x, st_.position.y - st_.height},
            {st_.position.x, st_.position.y + st_.height}};
  }

 private:
  void require_initialized() const {
    if (!initialized()) throw std::logic_error("tracker not initialized");
  }

  void push_history(double s_max, double bk) {
    st_.smax_sum += s_max;
    st_.bk_sum += bk;
    st_.history_len += 1;
    st_.s_tr = cfg_.theta1 * (st_.smax_sum / st_.history_len);
    st_.bk_tr = cfg_.theta2 * (st_.bk_sum / st_.history_len);
  }

  std::pair<int, int> window_pixels(double win_w, double win_h) const {
    const int w = std::max(cfg_.features.cell_size,
                           static_cast<int>(std::lround(win_w)));
    const int h = std::max(cfg_.features.cell_size,
                           static_cast<int>(std::lround(win_h)));
    return {w, h};
  }

  Image extract_window(const Image& frame, Point2 center, double win_w,
                       double win_h) const {
    const auto [w, h] = window_pixels(win_w, win_h);
    return extract_patch(frame, center, w, h, st_.tmpl_w, st_.tmpl_h);
  }

  Spectrum window_spectrum(const Image& frame, Point2 center, double win_w,
                           double win_h) const {
    Image patch = extract_window(frame, center, win_w, win_h);
    FeatureMap fm = apply_window(fx_(patch), st_.window);
    return fft2(fm);
  }

  struct TrainResult {
    JointFilter filter;
    Spectrum a0_spec;
    bool informative;
  };

  TrainResult train(const Image& frame, bool first_frame) {
    const double win_w = st_.width * cfg_.padding;
    const double win_h = st_.height * cfg_.padding;

    Image window_img = extract_window(frame, st_.position, win_w, win_h);
    FeatureMap a0 = apply_window(fx_(window_img), st_.window);
    Spectrum a0_spec = fft2(a0);

    std::vector<Spectrum> ctx;
    std::vector<BoundingBox> ctx_boxes;
    const auto centers = context_centers();
    for (int i = 0; i < cfg_.k_context && i < int(centers.size()); ++i) {
      ctx.push_back(window_spectrum(frame, centers[i], win_w, win_h));
      ctx_boxes.push_back(BoundingBox::from_center(centers[i], win_w, win_h));
    }

    // Color model and reliability mask. The mask is back-projected from the
    // running model; the fresh snapshot is blended in only when the
    // informativeness test passes.
    ColorModel fresh = build_color_model(frame, st_.box(), ctx_boxes);
    if (!st_.color.valid && fresh.valid) st_.color = fresh;

    ReliabilityMask mask =
        ReliabilityMask::all_ones(st_.tmpl_rows, st_.tmpl_cols);
    PosteriorMap posterior;
    if (st_.color.valid) {
      posterior = back_project(window_img, st_.color);
      Mat2d cells = pool_to_cells(posterior, cfg_.features.cell_size);
      mask = binarize(cells, st_.prev_target_area, cfg_.tau_l, cfg_.tau_u);
      if (mask.informative && fresh.valid && !first_frame)
        st_.color = update_color_model(st_.color, fresh, cfg_.eta_h);
    }

    if (debug_hook_) debug_hook_({window_img, posterior, mask});

    JointFilter jf = admm_solve(a0_spec, ctx, st_.y_spec, mask, cfg_.admm);
    return {std::move(jf), std::move(a0_spec), mask.informative};
  }

  static double parabolic_offset(const Mat2d& m, int pr, int pc, bool vertical) {
    const int n = vertical ? m.rows : m.cols;
    if (n < 3) return 0.0;
    auto wrap = [&](int i) { return ((i % n) + n) % n; };
    const double r0 = m.at(pr, pc);
    const double rm = vertical ? m.at(wrap(pr - 1), pc) : m.at(pr, wrap(pc - 1));
    const double rp = vertical ? m.at(wrap(pr + 1), pc) : m.at(pr, wrap(pc + 1));
    const double denom = rm + rp - 2.0 * r0;
    if (denom >= 0.0) return 0.0;  // not a proper local maximum
    return std::clamp((rm - rp) / (2.0 * denom), -0.5, 0.5);
  }

  TrackerConfig cfg_;
  FeatureExtractor fx_;
  TrackerState st_;
  std::vector<int> scale_order_;
  std::function<void(const TrackerDebugFrame&)> debug_hook_;
};

}  // namespace cftrack
