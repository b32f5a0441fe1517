#include "gridpath/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridpath/cli/plot.hpp"
#include "gridpath/data/splits.hpp"
#include "gridpath/data/synth.hpp"
#include "gridpath/eval/eval.hpp"
#include "gridpath/grid/artifacts.hpp"
#include "gridpath/io/format.hpp"
#include "gridpath/io/kv.hpp"
#include "gridpath/model/checkpoint.hpp"
#include "gridpath/train/train.hpp"

namespace gridpath::cli {

namespace fs = std::filesystem;

namespace {

constexpr long long kAllFrames = LLONG_MAX;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

void ensure_parent_dir(const std::string& path) {
  const fs::path p = fs::path(path).parent_path();
  if (!p.empty()) fs::create_directories(p);
}

void save_text_at(const std::string& path, const std::string& text) {
  ensure_parent_dir(path);
  io::save_text(path, text);
}

data::SceneDataset load_scene(const RunConfig& rc, const std::string& id) {
  const std::string csv = rc.scene_csv_path(id);
  if (!fs::exists(csv)) throw DataError("missing scene file: " + csv);
  data::SceneDataset d = data::load_canonical_csv(csv, id);
  const std::string meta = rc.scene_meta_path(id);
  if (fs::exists(meta)) data::apply_metadata(d, io::load_kv(meta));
  return d;
}

std::vector<data::SceneDataset> load_scenes(const RunConfig& rc) {
  if (rc.scenes.empty())
    throw ConfigError("config: 'scenes' must list at least one scene");
  std::vector<data::SceneDataset> out;
  out.reserve(rc.scenes.size());
  for (const std::string& id : rc.scenes) out.push_back(load_scene(rc, id));
  return out;
}

const data::SceneDataset& held_out_scene(
    const RunConfig& rc, const std::vector<data::SceneDataset>& datasets) {
  if (rc.held_out.empty())
    throw ConfigError("config: 'held_out' must name the held-out scene");
  for (const data::SceneDataset& d : datasets)
    if (d.scene_id == rc.held_out) return d;
  throw InvariantError("held-out scene vanished from the loaded datasets");
}

data::Splits make_run_splits(const RunConfig& rc,
                             const std::vector<data::SceneDataset>& datasets) {
  held_out_scene(rc, datasets);  // clear error before make_splits' own checks
  return data::make_splits(datasets, rc.held_out, rc.stage2_fraction,
                           rc.train.windows, rc.seed);
}

void write_manifest(const RunConfig& rc, const std::string& command,
                    const std::vector<const data::SceneDataset*>& datasets,
                    const std::vector<train::EpochRecord>& history,
                    const std::string& checkpoint_path, double wall_seconds) {
  train::RunManifest m;
  m.command = command;
  m.config_fingerprint = rc.fingerprint;
  m.config = rc.resolved;
  for (const data::SceneDataset* d : datasets)
    m.dataset_hashes.emplace_back(d->scene_id, train::dataset_hash(*d));
  m.history = history;
  m.checkpoint_path = checkpoint_path;
  m.wall_seconds = wall_seconds;
  save_text_at(rc.manifest_path(command), train::manifest_to_json(m));
}

std::vector<const data::SceneDataset*> pointers(
    const std::vector<data::SceneDataset>& datasets) {
  std::vector<const data::SceneDataset*> out;
  out.reserve(datasets.size());
  for (const data::SceneDataset& d : datasets) out.push_back(&d);
  return out;
}

model::Checkpoint load_run_checkpoint(const RunConfig& rc) {
  const std::string path = rc.checkpoint_path();
  if (!fs::exists(path)) throw DataError("missing checkpoint: " + path);
  return model::load_checkpoint(path);
}

// Scene ids come from config tokens; keep filenames flat regardless.
std::string sanitized(const std::string& id) {
  std::string out = id;
  for (char& c : out)
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  return out;
}

}  // namespace

void cmd_synth(const RunConfig& rc) {
  const Timer timer;
  data::SynthSceneSpec spec;
  spec.layout = data::parse_layout(rc.synth_layout);
  spec.scene_id = rc.synth_scene;
  spec.branch_left = rc.synth_branch_left;
  spec.branch_right = rc.synth_branch_right;
  spec.ped_count = rc.synth_peds;
  spec.speed_min = rc.synth_speed_min;
  spec.speed_max = rc.synth_speed_max;
  spec.noise_sigma = rc.synth_noise_sigma;
  spec.seed = substream_seed(rc.seed, "synth/" + rc.synth_scene);
  const data::SceneDataset d = data::synth_generate(spec);

  const std::string csv = rc.scene_csv_path(d.scene_id);
  save_text_at(csv, data::export_csv(d));
  save_text_at(rc.scene_meta_path(d.scene_id), data::export_metadata(d));
  write_manifest(rc, "synth", {&d}, {}, "", timer.seconds());
  std::cout << "synth: wrote " << csv << " (" << d.points.size() << " points, "
            << rc.synth_peds << " tracks)\n";
}

void cmd_ingest(const RunConfig& rc) {
  const Timer timer;
  if (rc.ingest_input.empty())
    throw ConfigError("config: 'ingest_input' must name the annotation file");
  if (!fs::exists(rc.ingest_input))
    throw DataError("missing input file: " + rc.ingest_input);
  const data::AnnotationSchema schema =
      data::make_schema(rc.ingest_columns, rc.ingest_delimiter);
  const data::SceneDataset d =
      data::load_annotations(rc.ingest_input, schema, rc.ingest_scene);

  const std::string csv = rc.scene_csv_path(d.scene_id);
  save_text_at(csv, data::export_csv(d));
  save_text_at(rc.scene_meta_path(d.scene_id), data::export_metadata(d));
  write_manifest(rc, "ingest", {&d}, {}, "", timer.seconds());
  std::cout << "ingest: wrote " << csv << " (" << d.points.size()
            << " points)\n";
}

void cmd_preprocess(const RunConfig& rc) {
  const Timer timer;
  const std::vector<data::SceneDataset> datasets = load_scenes(rc);
  // The held-out scene contributes training-range frames only, exactly as in
  // stage-2 fine-tuning; other scenes are used in full.
  long long held_boundary = kAllFrames;
  if (!rc.held_out.empty())
    held_boundary = make_run_splits(rc, datasets).stage2_boundary_frame;

  std::string summary = "preprocess:";
  for (const data::SceneDataset& d : datasets) {
    const bool held = d.scene_id == rc.held_out;
    const auto tracks = data::collect_tracks(
        d, -kAllFrames, held ? held_boundary - 1 : kAllFrames);
    const grid::GridArtifacts a =
        grid::build_artifacts(tracks, d.bounds, rc.train.grid,
                              rc.train.theta_lin, rc.train.p, d.scene_id);
    save_text_at(rc.artifacts_path(d.scene_id), grid::artifacts_to_json(a));
    int nonlinear = 0;
    for (int c = 0; c < rc.train.grid.cell_count(); ++c)
      if (a.nonlinear(c)) ++nonlinear;
    summary += " " + d.scene_id + "=" + std::to_string(nonlinear) + "/" +
               std::to_string(rc.train.grid.cell_count()) + " non-linear";
  }
  write_manifest(rc, "preprocess", pointers(datasets), {}, "",
                 timer.seconds());
  std::cout << summary << "\n";
}

void cmd_train(const RunConfig& rc) {
  const Timer timer;
  const std::vector<data::SceneDataset> datasets = load_scenes(rc);
  const data::SceneDataset& held = held_out_scene(rc, datasets);
  const data::Splits splits = make_run_splits(rc, datasets);

  std::optional<model::Checkpoint> prev;
  if (rc.resume && fs::exists(rc.stage1_last_path()))
    prev = model::load_checkpoint(rc.stage1_last_path());

  train::Stage1Result s1 =
      train::train_stage1(datasets, splits.stage1_train, splits.stage1_val,
                          rc.train, prev ? &*prev : nullptr);
  ensure_parent_dir(rc.stage1_last_path());
  model::save_checkpoint(rc.stage1_last_path(), s1.last);
  // A resumed run materializes a new best only when some executed epoch beat
  // the recorded best; otherwise the previously saved best file stands.
  const bool new_best =
      !prev || s1.best.train.best_val_epoch > prev->train.epochs_completed;
  if (new_best) {
    ensure_parent_dir(rc.stage1_best_path());
    model::save_checkpoint(rc.stage1_best_path(), s1.best);
  }
  model::Checkpoint best =
      new_best || !fs::exists(rc.stage1_best_path())
          ? std::move(s1.best)
          : model::load_checkpoint(rc.stage1_best_path());

  train::Stage2Result s2 =
      train::train_stage2(best, held, splits, rc.stage2_fraction, rc.train);
  const std::string stage2_path = rc.checkpoint_path();
  ensure_parent_dir(stage2_path);
  model::save_checkpoint(stage2_path, s2.final);

  std::vector<train::EpochRecord> history = s1.history;
  history.insert(history.end(), s2.history.begin(), s2.history.end());
  save_text_at(rc.out_dir + "/history.csv", train::history_to_csv(history));
  write_manifest(rc, "train", pointers(datasets), history, stage2_path,
                 timer.seconds());

  std::cout << "train: stage 1 best val NLL "
            << io::format_double(best.train.best_val_nll) << " (epoch "
            << best.train.best_val_epoch << "), wrote " << stage2_path << "\n";
}

void cmd_predict(const RunConfig& rc) {
  const Timer timer;
  model::Checkpoint ck = load_run_checkpoint(rc);
  if (!ck.bank.frozen())
    throw ConfigError(
        "checkpoint '" + rc.checkpoint_path() +
        "' is not a fine-tuned stage-2 checkpoint (scene memory unfrozen)");
  const std::vector<data::SceneDataset> datasets = load_scenes(rc);
  const data::Splits splits = make_run_splits(rc, datasets);
  if (ck.artifacts.scene_id != rc.held_out)
    throw ConfigError("checkpoint scene '" + ck.artifacts.scene_id +
                      "' does not match held_out '" + rc.held_out + "'");

  model::RolloutConfig cfg = ck.rollout;
  cfg.decode = model::parse_decode(rc.decode);
  cfg.sample_seed = rc.seed;

  std::vector<PredictedWindow> rows;
  rows.reserve(splits.test.size());
  for (const data::TrajectoryWindow& w : splits.test) {
    const model::Prediction pred = model::rollout_test(
        ck.params, ck.artifacts, ck.bank, w, rc.train.windows.t_obs, cfg);
    rows.push_back({w.scene_id, w.ped_id, w.start_frame, pred.positions});
  }
  if (rows.empty())
    std::cerr << "warning: no test windows (scene too small or fraction too "
                 "high); writing an empty prediction set\n";

  const std::string path = rc.predictions_path();
  save_text_at(path, predictions_to_csv(rows, rc.fingerprint));
  write_manifest(rc, "predict", pointers(datasets), {}, rc.checkpoint_path(),
                 timer.seconds());
  std::cout << "predict: " << rows.size() << " windows x "
            << rc.train.windows.t_pred << " steps -> " << path << "\n";
}

void cmd_eval(const RunConfig& rc) {
  const Timer timer;
  model::Checkpoint ck = load_run_checkpoint(rc);
  const std::vector<data::SceneDataset> datasets = load_scenes(rc);
  const data::Splits splits = make_run_splits(rc, datasets);
  if (ck.artifacts.scene_id != rc.held_out)
    throw ConfigError("checkpoint scene '" + ck.artifacts.scene_id +
                      "' does not match held_out '" + rc.held_out + "'");
  if (splits.test.empty())
    throw ConfigError(
        "no test windows for scene '" + rc.held_out +
        "' (scene too small or stage2_fraction leaves no test range)");

  const eval::MetricsReport report =
      eval::evaluate(ck, splits.test, rc.eval_configs, rc.train.windows);
  const std::string csv = eval::report_to_csv(report);
  save_text_at(rc.out_dir + "/metrics.json", eval::report_to_json(report));
  save_text_at(rc.out_dir + "/metrics.csv", csv);
  write_manifest(rc, "eval", pointers(datasets), {}, rc.checkpoint_path(),
                 timer.seconds());
  std::cout << csv;
}

void cmd_sweep(const RunConfig& rc) {
  const Timer timer;
  const std::vector<data::SceneDataset> datasets = load_scenes(rc);
  held_out_scene(rc, datasets);
  const train::SweepResult result = train::sweep_grid_sizes(
      datasets, rc.held_out, rc.stage2_fraction, rc.train, rc.sweep_sizes);
  const std::string csv = train::sweep_to_csv(result);
  save_text_at(rc.out_dir + "/sweep.csv", csv);
  write_manifest(rc, "sweep", pointers(datasets), {}, "", timer.seconds());
  std::cout << csv;
  std::cout << "sweep: best m=" << result.best_m << ", best n=" << result.best_n
            << "\n";
}

void cmd_plot(const RunConfig& rc) {
  const Timer timer;
  const model::Checkpoint ck = load_run_checkpoint(rc);
  const data::SceneDataset scene = load_scene(rc, ck.artifacts.scene_id);

  const std::string preds_path = rc.predictions_path();
  if (!fs::exists(preds_path))
    throw DataError("missing predictions file: " + preds_path);
  const std::vector<PredictedWindow> preds =
      predictions_from_csv(io::load_text(preds_path));

  std::map<std::pair<long long, long long>, const data::TrajectoryWindow*>
      by_key;
  const std::vector<data::TrajectoryWindow> windows =
      data::extract_windows(scene, rc.train.windows);
  for (const data::TrajectoryWindow& w : windows)
    by_key[{w.ped_id, w.start_frame}] = &w;

  std::size_t limit = preds.size();
  if (rc.plot_limit > 0)
    limit = std::min(limit, static_cast<std::size_t>(rc.plot_limit));
  if (limit == 0) {
    std::cerr << "warning: plot: no windows selected; nothing written\n";
    write_manifest(rc, "plot", {&scene}, {}, rc.checkpoint_path(),
                   timer.seconds());
    return;
  }

  std::size_t written = 0;
  for (std::size_t i = 0; i < limit; ++i) {
    const PredictedWindow& p = preds[i];
    if (p.scene_id != scene.scene_id)
      throw DataError("prediction for scene '" + p.scene_id +
                      "' does not match checkpoint scene '" + scene.scene_id +
                      "'");
    const auto it = by_key.find({p.ped_id, p.start_frame});
    if (it == by_key.end())
      throw DataError("prediction (ped " + std::to_string(p.ped_id) +
                      ", frame " + std::to_string(p.start_frame) +
                      ") has no matching window in scene '" + scene.scene_id +
                      "'");
    if (p.positions.size() !=
        static_cast<std::size_t>(rc.train.windows.t_pred))
      throw DataError("prediction (ped " + std::to_string(p.ped_id) +
                      ", frame " + std::to_string(p.start_frame) + ") has " +
                      std::to_string(p.positions.size()) + " steps, expected " +
                      std::to_string(rc.train.windows.t_pred));
    const std::string svg =
        render_window_svg(ck.artifacts, *it->second, rc.train.windows.t_obs,
                          p.positions, rc.fingerprint);
    const std::string file = rc.plots_dir() + "/" + sanitized(p.scene_id) +
                             "_p" + io::format_int(p.ped_id) + "_f" +
                             io::format_int(p.start_frame) + ".svg";
    save_text_at(file, svg);
    ++written;
  }
  write_manifest(rc, "plot", {&scene}, {}, rc.checkpoint_path(),
                 timer.seconds());
  std::cout << "plot: wrote " << written << " files to " << rc.plots_dir()
            << "\n";
}

}  // namespace gridpath::cli
