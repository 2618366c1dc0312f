// cftrack command-line interface: synthetic sequence generation, one-pass
// tracking, OPE scoring and batch benchmarking.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cftrack/config.hpp"
#include "cftrack/ope.hpp"
#include "cftrack/results.hpp"
#include "cftrack/runner.hpp"
#include "cftrack/sequence.hpp"
#include "cftrack/synth.hpp"
#include "cftrack/tracker.hpp"

namespace {

cftrack::TrackerConfig make_config(const std::string& config_path) {
  cftrack::TrackerConfig cfg;
  if (!config_path.empty()) cfg = cftrack::load_config(config_path, cfg);
  cftrack::apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

int cmd_track(const std::string& seq_dir, const std::string& out_path,
              const std::string& config_path, const std::string& render_dir,
              const std::string& masks_dir) {
  const auto spec = cftrack::load_sequence(seq_dir);
  const auto cfg = make_config(config_path);
  cftrack::RunOptions opts;
  opts.render_dir = render_dir;
  opts.masks_dir = masks_dir;
  const auto run = cftrack::track_sequence(spec, cfg, opts);
  cftrack::write_run(out_path, run);
  std::cout << "tracked " << run.frames.size() << " frames of " << spec.name
            << " -> " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& run_path, const std::string& seq_dir,
             const std::string& out_path, const std::string& csv_path) {
  const auto spec = cftrack::load_sequence(seq_dir);
  const auto run = cftrack::read_run(run_path);
  const auto metrics = cftrack::compute_ope(run.boxes(), spec.ground_truth);
  cftrack::write_metrics(out_path, spec.name, metrics);
  if (!csv_path.empty()) cftrack::write_curves_csv(csv_path, metrics);
  std::cout << "sequence " << spec.name << ": auc=" << metrics.auc
            << " precision@20=" << metrics.precision_at_20 << "\n";
  return 0;
}

int cmd_bench(const std::string& seqs_dir, const std::string& out_path,
              const std::string& config_path, int threads,
              const std::string& runs_dir) {
  const auto cfg = make_config(config_path);
  const auto entries = cftrack::bench_sequences(seqs_dir, cfg, threads);
  const auto j = cftrack::bench_to_json(entries);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << j.dump(2) << "\n";
  if (!runs_dir.empty()) {
    std::filesystem::create_directories(runs_dir);
    for (const auto& e : entries)
      cftrack::write_run(
          (std::filesystem::path(runs_dir) / (e.name + ".json")).string(), e.run);
  }
  std::cout << "benchmarked " << entries.size()
            << " sequences: mean_auc=" << j["mean_auc"]
            << " mean_precision@20=" << j["mean_precision_at_20"] << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correlation filter tracker with joint discriminative/reliable "
               "filter learning and kurtosis-gated updates"};
  app.require_subcommand(1);

  // track
  std::string t_seq, t_out, t_config, t_render, t_masks;
  auto* track = app.add_subcommand("track", "run the tracker over a sequence");
  track->add_option("--seq", t_seq, "sequence directory (OTB layout)")->required();
  track->add_option("--out", t_out, "results JSON path")->required();
  track->add_option("--config", t_config, "key=value config file");
  track->add_option("--render", t_render, "directory for rendered frames");
  track->add_option("--dump-masks", t_masks, "directory for posterior/mask dumps");

  // eval
  std::string e_run, e_seq, e_out, e_csv;
  auto* eval = app.add_subcommand("eval", "score a results file against ground truth");
  eval->add_option("--run", e_run, "results JSON from `track`")->required();
  eval->add_option("--seq", e_seq, "sequence directory")->required();
  eval->add_option("--out", e_out, "metrics JSON path")->required();
  eval->add_option("--csv", e_csv, "optional curve-points CSV path");

  // synth
  cftrack::SynthParams sp;
  std::string s_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic sequence");
  synth->add_option("--scenario", sp.scenario,
                    "translate | zoom | occlude | distractor")->required();
  synth->add_option("--out", s_out, "output sequence directory")->required();
  synth->add_option("--frames", sp.frames, "frame count");
  synth->add_option("--width", sp.width, "frame width");
  synth->add_option("--height", sp.height, "frame height");
  synth->add_option("--target-w", sp.target_w, "target width");
  synth->add_option("--target-h", sp.target_h, "target height");
  synth->add_option("--start-x", sp.start_x, "initial left edge");
  synth->add_option("--start-y", sp.start_y, "initial top edge");
  synth->add_option("--vx", sp.vx, "x velocity, px/frame");
  synth->add_option("--vy", sp.vy, "y velocity, px/frame");
  synth->add_option("--occl-start", sp.occl_start, "first occluded frame (0-based)");
  synth->add_option("--occl-end", sp.occl_end, "last occluded frame (0-based)");
  synth->add_option("--zoom", sp.zoom, "per-frame zoom factor");
  synth->add_option("--distractor-gap", sp.distractor_gap,
                    "closest approach in target widths");
  synth->add_option("--seed", sp.seed, "texture seed");

  // bench
  std::string b_seqs, b_out, b_config, b_runs;
  int b_threads = 0;
  auto* bench = app.add_subcommand("bench", "track + eval a directory of sequences");
  bench->add_option("--seqs", b_seqs, "directory of sequence directories")->required();
  bench->add_option("--out", b_out, "combined results JSON path")->required();
  bench->add_option("--config", b_config, "key=value config file");
  bench->add_option("--threads", b_threads, "worker threads (0 = hardware)");
  bench->add_option("--runs-dir", b_runs, "optional per-sequence results directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (track->parsed()) return cmd_track(t_seq, t_out, t_config, t_render, t_masks);
    if (eval->parsed()) return cmd_eval(e_run, e_seq, e_out, e_csv);
    if (synth->parsed()) {
      cftrack::synth_sequence(sp, s_out);
      std::cout << "wrote " << sp.frames << "-frame " << sp.scenario
                << " sequence to " << s_out << "\n";
      return 0;
    }
    if (bench->parsed())
      return cmd_bench(b_seqs, b_out, b_config, b_threads, b_runs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
