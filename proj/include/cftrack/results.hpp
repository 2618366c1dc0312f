#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cftrack/geometry.hpp"
#include "cftrack/ope.hpp"
#include "cftrack/tracker.hpp"

namespace cftrack {

/// Per-frame tracking output for one sequence.
struct FrameResult {
  BoundingBox box;
  MonitorReport report;
  double time_ms = 0.0;
};

struct TrackRun {
  std::string sequence;
  std::vector<FrameResult> frames;

  std::vector<BoundingBox> boxes() const {
    std::vector<BoundingBox> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(f.box);
    return out;
  }
};

inline nlohmann::ordered_json run_to_json(const TrackRun& run) {
  nlohmann::ordered_json j;
  j["schema"] = "cftrack-results-v1";
  j["sequence"] = run.sequence;
  auto& frames = j["frames"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < run.frames.size(); ++i) {
    const auto& f = run.frames[i];
    nlohmann::ordered_json fj;
    fj["frame"] = i + 1;
    fj["box"] = {f.box.x, f.box.y, f.box.w, f.box.h};
    fj["s_max"] = f.report.s_max;
    fj["bk"] = f.report.bk;
    fj["updated"] = f.report.updated;
    fj["informative"] = f.report.informative;
    fj["time_ms"] = f.time_ms;
    frames.push_back(std::move(fj));
  }
  return j;
}

inline void write_run(const std::string& path, const TrackRun& run) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << run_to_json(run).dump(2) << "\n";
}

inline TrackRun read_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("schema", "") != "cftrack-results-v1")
    throw std::runtime_error("unexpected results schema in " + path);
  TrackRun run;
  run.sequence = j.value("sequence", "");
  for (const auto& fj : j.at("frames")) {
    FrameResult f;
    const auto& b = fj.at("box");
    f.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
             b.at(3).get<double>()};
    f.report.s_max = fj.value("s_max", 0.0);
    f.report.bk = fj.value("bk", 0.0);
    f.report.updated = fj.value("updated", false);
    f.report.informative = fj.value("informative", false);
    f.time_ms = fj.value("time_ms", 0.0);
    run.frames.push_back(f);
  }
  return run;
}

inline nlohmann::ordered_json metrics_to_json(const std::string& sequence,
                                              const OpeMetrics& m) {
  nlohmann::ordered_json j;
  j["schema"] = "cftrack-metrics-v1";
  j["sequence"] = sequence;
  j["precision_at_20"] = m.precision_at_20;
  j["auc"] = m.auc;
  j["precision"] = m.precision;
  j["success"] = m.success;
  return j;
}

inline void write_metrics(const std::string& path, const std::string& sequence,
                          const OpeMetrics& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << metrics_to_json(sequence, m).dump(2) << "\n";
}

/// Removes wall-clock fields in place, for determinism comparisons.
inline void strip_timing(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("time_ms");
    j.erase("timing");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

}  // namespace cftrack
