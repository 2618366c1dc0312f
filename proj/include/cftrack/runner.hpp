#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cftrack/image_io.hpp"
#include "cftrack/ope.hpp"
#include "cftrack/results.hpp"
#include "cftrack/sequence.hpp"
#include "cftrack/tracker.hpp"

namespace cftrack {

struct RunOptions {
  std::string render_dir;  // when set: one PNG per frame with the box drawn
  std::string masks_dir;   // when set: window/posterior/mask PNG per frame
};

/// One-pass run over a sequence: init from the first ground-truth box, then
/// step through the remaining frames.
inline TrackRun track_sequence(const SequenceSpec& spec, const TrackerConfig& cfg,
                               const RunOptions& opts = {}) {
  namespace fs = std::filesystem;
  if (spec.frame_paths.size() < 2)
    throw std::runtime_error("sequence needs at least 2 frames");

  Tracker tracker(cfg);
  TrackRun run;
  run.sequence = spec.name;

  int mask_index = 0;
  if (!opts.masks_dir.empty()) {
    fs::create_directories(opts.masks_dir);
    tracker.set_debug_hook([&](const TrackerDebugFrame& d) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "%04d.png", mask_index + 1);
      save_image((fs::path(opts.masks_dir) / (std::string("window_") + suffix)).string(),
                 d.window);
      if (d.posterior.rows > 0)
        save_image((fs::path(opts.masks_dir) / (std::string("posterior_") + suffix)).string(),
                   to_gray_image(d.posterior));
      Mat2d m(d.mask.rows, d.mask.cols);
      for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = d.mask.cells[i];
      save_image((fs::path(opts.masks_dir) / (std::string("mask_") + suffix)).string(),
                 to_gray_image(m));
    });
  }
  if (!opts.render_dir.empty()) fs::create_directories(opts.render_dir);

  auto render = [&](const Image& frame, const BoundingBox& box, int index,
                    bool updated) {
    if (opts.render_dir.empty()) return;
    Image vis = frame;
    if (updated)
      draw_box(vis, box, 0.1, 0.9, 0.1);
    else
      draw_box(vis, box, 0.9, 0.1, 0.1);
    char name[32];
    std::snprintf(name, sizeof(name), "%04d.png", index + 1);
    save_image((fs::path(opts.render_dir) / name).string(), vis);
  };

  for (size_t i = 0; i < spec.frame_paths.size(); ++i) {
    const Image frame = load_image(spec.frame_paths[i]);
    const auto start = std::chrono::steady_clock::now();
    FrameResult fr;
    if (i == 0) {
      mask_index = 0;
      fr.report = tracker.init(frame, spec.initial_box());
      fr.box = tracker.state().box();
    } else {
      mask_index = static_cast<int>(i);
      auto [box, report] = tracker.step(frame);
      fr.box = box;
      fr.report = report;
    }
    fr.time_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    render(frame, fr.box, static_cast<int>(i), fr.report.updated);
    run.frames.push_back(fr);
  }
  return run;
}

struct BenchEntry {
  std::string name;
  TrackRun run;
  OpeMetrics metrics;
};

/// Lists sequence directories (those containing groundtruth_rect.txt),
/// sorted by name for reproducible output.
inline std::vector<std::string> list_sequence_dirs(const std::string& root) {
  namespace fs = std::filesystem;
  std::vector<std::string> dirs;
  if (!fs::is_directory(root))
    throw std::runtime_error("not a directory: " + root);
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::exists(e.path() / "groundtruth_rect.txt"))
      dirs.push_back(e.path().string());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

/// Tracks and scores every sequence under root. Sequences run concurrently;
/// per-sequence outputs are independent of the thread count.
inline std::vector<BenchEntry> bench_sequences(const std::string& root,
                                               const TrackerConfig& cfg,
                                               int threads = 0) {
  const auto dirs = list_sequence_dirs(root);
  if (dirs.empty()) throw std::runtime_error("no sequences under " + root);
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(dirs.size())));

  std::vector<BenchEntry> entries(dirs.size());
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(dirs.size());

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= dirs.size()) return;
      try {
        const SequenceSpec spec = load_sequence(dirs[i]);
        BenchEntry e;
        e.name = spec.name;
        e.run = track_sequence(spec, cfg);
        e.metrics = compute_ope(e.run.boxes(), spec.ground_truth);
        entries[i] = std::move(e);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("sequence " + dirs[i] + " failed: " + errors[i]);
  return entries;
}

inline nlohmann::ordered_json bench_to_json(const std::vector<BenchEntry>& entries,
                                            bool include_runs = true) {
  nlohmann::ordered_json j;
  j["schema"] = "cftrack-bench-v1";
  double auc = 0.0, prec = 0.0;
  auto& seqs = j["sequences"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json sj;
    sj["name"] = e.name;
    sj["auc"] = e.metrics.auc;
    sj["precision_at_20"] = e.metrics.precision_at_20;
    if (include_runs) sj["run"] = run_to_json(e.run);
    seqs.push_back(std::move(sj));
    auc += e.metrics.auc;
    prec += e.metrics.precision_at_20;
  }
  j["mean_auc"] = entries.empty() ? 0.0 : auc / entries.size();
  j["mean_precision_at_20"] = entries.empty() ? 0.0 : prec / entries.size();
  double total_ms = 0.0;
  for (const auto& e : entries)
    for (const auto& f : e.run.frames) total_ms += f.time_ms;
  j["timing"] = {{"total_ms", total_ms}};
  return j;
}

}  // namespace cftrack
