#include "gridpath/train/train.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridpath/eval/eval.hpp"
#include "gridpath/io/format.hpp"
#include "gridpath/nn/rng.hpp"

namespace gridpath::train {

model::ModelDims TrainConfig::dims() const {
  model::ModelDims d;
  d.embed = embed;
  d.hidden = hidden;
  d.subgrid_onehot = grid.subgrid_count();
  return d;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw ConfigError("train: dropout must lie in [0, 1)");
  if (!(clip > 0.0)) throw ConfigError("train: clip must be positive");
  if (hidden < 1 || embed < 1)
    throw ConfigError("train: model dimensions must be positive");
  if (stage1_epochs < 0 || stage2_epochs < 0)
    throw ConfigError("train: epoch counts must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch size must be >= 1");
  if (theta_lin < 0.0) throw ConfigError("train: theta_lin must be >= 0");
  if (p < 0) throw ConfigError("train: p must be >= 0");
  if (windows.t_obs < 1 || windows.t_pred < 1 || windows.stride < 1)
    throw ConfigError("train: window parameters must be positive");
  grid.validate();
  rollout.validate();
}

namespace {

constexpr long long kAllFrames = std::numeric_limits<long long>::max();

struct SceneRef {
  const data::SceneDataset* dataset = nullptr;
  grid::GridArtifacts artifacts;
};

using SceneRefMap = std::map<std::string, SceneRef>;

struct WindowGroup {
  std::string scene_id;
  std::vector<const data::TrajectoryWindow*> windows;
};

// Scenes ascending; within a scene, (start_frame, ped_id) order feeds
// temporally adjacent windows into the same mini-batch.
std::vector<WindowGroup> group_windows(
    const std::vector<data::TrajectoryWindow>& set) {
  std::map<std::string, std::vector<const data::TrajectoryWindow*>> by_scene;
  for (const auto& w : set) by_scene[w.scene_id].push_back(&w);
  std::vector<WindowGroup> out;
  for (auto& [scene_id, ws] : by_scene) {
    std::sort(ws.begin(), ws.end(),
              [](const data::TrajectoryWindow* a,
                 const data::TrajectoryWindow* b) {
                if (a->start_frame != b->start_frame)
                  return a->start_frame < b->start_frame;
                return a->ped_id < b->ped_id;
              });
    out.push_back({scene_id, std::move(ws)});
  }
  return out;
}

SceneRefMap build_refs(
    const std::vector<data::SceneDataset>& scenes,
    const std::vector<const std::vector<data::TrajectoryWindow>*>& sets,
    const TrainConfig& cfg) {
  std::set<std::string> needed;
  for (const auto* set : sets)
    for (const auto& w : *set) needed.insert(w.scene_id);
  SceneRefMap refs;
  for (const std::string& id : needed) {
    const data::SceneDataset* d = nullptr;
    for (const auto& s : scenes)
      if (s.scene_id == id) {
        d = &s;
        break;
      }
    if (d == nullptr)
      throw InvariantError("train: window references unknown scene '" + id +
                           "'");
    auto tracks = data::collect_tracks(*d, -kAllFrames, kAllFrames);
    refs.emplace(id, SceneRef{d, grid::build_artifacts(
                                     tracks, d->bounds, cfg.grid,
                                     cfg.theta_lin, cfg.p, id)});
  }
  return refs;
}

// One pass over the grouped windows: optimizer steps when `training`, plain
// teacher-forced NLL otherwise. Banks start zeroed per scene; when
// `banks_out` is given, each scene's end-of-pass bank is stored there.
// Returns the window-weighted mean NLL.
double pass(model::ModelParams& params, const SceneRefMap& refs,
            const std::vector<WindowGroup>& groups, const TrainConfig& cfg,
            bool training, int epoch_index, nn::Adam* adam,
            std::map<std::string, grid::SceneStateBank>* banks_out) {
  double acc = 0.0;
  std::size_t count = 0;
  for (const WindowGroup& g : groups) {
    const SceneRef& ref = refs.at(g.scene_id);
    auto bank =
        grid::SceneStateBank::from_classes(ref.artifacts.classes, cfg.hidden);
    std::optional<nn::RngStream> drop;
    if (training && cfg.dropout > 0.0)
      drop.emplace(cfg.seed, "dropout/" + g.scene_id + "/" +
                                 std::to_string(epoch_index));
    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t i = 0; i < g.windows.size(); i += bs) {
      const std::size_t hi = std::min(i + bs, g.windows.size());
      std::vector<const data::TrajectoryWindow*> batch(
          g.windows.begin() + static_cast<std::ptrdiff_t>(i),
          g.windows.begin() + static_cast<std::ptrdiff_t>(hi));
      model::BatchOptions opt;
      if (training) {
        opt.mode = nn::Mode::Train;
        opt.dropout_rate = cfg.dropout;
        opt.dropout_rng = drop ? &*drop : nullptr;
        opt.optimizer = adam;
        opt.lr = cfg.lr;
        opt.clip = cfg.clip;
      } else {
        opt.mode = nn::Mode::Eval;
      }
      acc += model::run_batch(params, ref.artifacts, bank, batch,
                              ref.dataset->frame_stride, cfg.rollout, opt) *
             static_cast<double>(batch.size());
      count += batch.size();
    }
    if (banks_out != nullptr)
      banks_out->insert_or_assign(g.scene_id, std::move(bank));
  }
  return acc / static_cast<double>(count);
}

void check_dims(const model::ModelDims& have, const model::ModelDims& want,
                const char* what) {
  if (have.embed != want.embed || have.hidden != want.hidden ||
      have.subgrid_onehot != want.subgrid_onehot)
    throw ConfigError(std::string(what) +
                      ": model dimensions do not match the checkpoint");
}

// Stage-1 checkpoints carry no scene of their own; the artifact slot holds a
// placeholder grid over the unit square with every cell linear.
model::Checkpoint make_stage1_checkpoint(const model::ModelParams& params,
                                         nn::Adam& adam,
                                         const model::TrainState& ts,
                                         const TrainConfig& cfg) {
  model::Checkpoint ck;
  ck.params = params;
  const data::Bounds unit{0.0, 0.0, 1.0, 1.0};
  ck.artifacts = grid::build_artifacts({}, unit, cfg.grid, cfg.theta_lin,
                                       cfg.p, "stage1");
  ck.bank =
      grid::SceneStateBank::from_classes(ck.artifacts.classes, cfg.hidden);
  ck.rollout = cfg.rollout;
  ck.init_seed = cfg.seed;
  ck.train = ts;
  model::capture_adam(ck, adam);
  return ck;
}

}  // namespace

Stage1Result train_stage1(const std::vector<data::SceneDataset>& scenes,
                          const std::vector<data::TrajectoryWindow>& train_set,
                          const std::vector<data::TrajectoryWindow>& val_set,
                          const TrainConfig& cfg,
                          const model::Checkpoint* resume) {
  cfg.validate();
  if (train_set.empty()) throw ConfigError("stage 1: empty training set");
  if (val_set.empty()) throw ConfigError("stage 1: empty validation set");

  const model::ModelDims dims = cfg.dims();
  model::ModelParams params;
  model::TrainState ts;
  if (resume != nullptr) {
    if (resume->train.stage != 1)
      throw InvariantError("stage 1 resume: not a stage-1 checkpoint");
    check_dims(resume->params.dims, dims, "stage 1 resume");
    params = resume->params;
    ts = resume->train;
  } else {
    params = model::ModelParams(dims, cfg.seed);
  }
  nn::Adam adam(params.parameters());
  if (resume != nullptr && resume->has_adam) model::restore_adam(*resume, adam);

  const SceneRefMap refs = build_refs(scenes, {&train_set, &val_set}, cfg);
  const auto train_groups = group_windows(train_set);
  const auto val_groups = group_windows(val_set);

  Stage1Result out;
  bool best_materialized = false;
  for (int epoch = ts.epochs_completed + 1; epoch <= cfg.stage1_epochs;
       ++epoch) {
    const double train_nll =
        pass(params, refs, train_groups, cfg, true, epoch - 1, &adam, nullptr);
    const double val_nll = pass(params, refs, val_groups, cfg, false,
                                epoch - 1, nullptr, nullptr);
    out.history.push_back({1, epoch, train_nll, val_nll});
    ts.epochs_completed = epoch;
    if (ts.best_val_epoch < 0 || val_nll < ts.best_val_nll) {
      ts.best_val_nll = val_nll;
      ts.best_val_epoch = epoch;
      out.best = make_stage1_checkpoint(params, adam, ts, cfg);
      best_materialized = true;
    }
  }
  out.last = make_stage1_checkpoint(params, adam, ts, cfg);
  if (!best_materialized) out.best = out.last;
  return out;
}

Stage2Result train_stage2(const model::Checkpoint& stage1,
                          const data::SceneDataset& held_out,
                          const data::Splits& splits, double fraction,
                          const TrainConfig& cfg) {
  cfg.validate();
  if (!(fraction >= 0.0 && fraction <= 0.5))
    throw ConfigError("stage 2: fraction must lie in [0, 0.5]");
  check_dims(stage1.params.dims, cfg.dims(), "stage 2");

  const long long boundary = splits.stage2_boundary_frame;
  const long long extent =
      static_cast<long long>(cfg.windows.length() - 1) * held_out.frame_stride;
  for (const auto& w : splits.stage2_train) {
    if (w.scene_id != held_out.scene_id)
      throw InvariantError("stage 2: training window from foreign scene '" +
                           w.scene_id + "'");
    if (w.start_frame + extent >= boundary)
      throw InvariantError("stage 2: training window reaches the test range");
  }

  Stage2Result out;
  model::Checkpoint& ck = out.final;
  ck.params = stage1.params;
  ck.artifacts = grid::build_artifacts(
      data::collect_tracks(held_out, -kAllFrames, boundary - 1),
      held_out.bounds, cfg.grid, cfg.theta_lin, cfg.p, held_out.scene_id);
  ck.rollout = cfg.rollout;
  ck.init_seed = stage1.init_seed;
  ck.train = stage1.train;
  ck.train.stage = 2;
  ck.train.epochs_completed = 0;

  auto bank =
      grid::SceneStateBank::from_classes(ck.artifacts.classes, cfg.hidden);
  if (!splits.stage2_train.empty() && cfg.stage2_epochs > 0) {
    nn::Adam adam(ck.params.parameters());
    if (stage1.has_adam) model::restore_adam(stage1, adam);
    SceneRefMap refs;
    refs.emplace(held_out.scene_id, SceneRef{&held_out, ck.artifacts});
    const auto groups = group_windows(splits.stage2_train);
    std::map<std::string, grid::SceneStateBank> banks;
    for (int epoch = 1; epoch <= cfg.stage2_epochs; ++epoch) {
      const double train_nll =
          pass(ck.params, refs, groups, cfg, true, epoch - 1, &adam, &banks);
      out.history.push_back({2, epoch, train_nll, std::nullopt});
    }
    bank = std::move(banks.at(held_out.scene_id));
    model::capture_adam(ck, adam);
    ck.train.epochs_completed = cfg.stage2_epochs;
  }
  bank.freeze();
  ck.bank = std::move(bank);
  return out;
}

namespace {

template <typename Fn>
std::vector<SweepRow> run_points(const std::vector<int>& sizes, Fn fn) {
  std::vector<SweepRow> rows(sizes.size());
  std::vector<std::exception_ptr> errors(sizes.size());
  const std::size_t width =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < sizes.size(); start += width) {
    std::vector<std::thread> wave;
    const std::size_t stop = std::min(start + width, sizes.size());
    for (std::size_t i = start; i < stop; ++i)
      wave.emplace_back([&, i] {
        try {
          rows[i] = fn(sizes[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& t : wave) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

int best_by_ade(const std::vector<SweepRow>& rows, bool pick_m) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].ade < rows[best].ade) best = i;
  return pick_m ? rows[best].m : rows[best].n;
}

}  // namespace

SweepResult sweep_grid_sizes(const std::vector<data::SceneDataset>& datasets,
                             const std::string& held_out_scene,
                             double fraction, const TrainConfig& base,
                             const std::vector<int>& sizes) {
  base.validate();
  if (sizes.empty()) throw ConfigError("sweep: sizes list is empty");
  for (int s : sizes)
    if (s < 1) throw ConfigError("sweep: grid sizes must be >= 1");
  const data::SceneDataset* held = nullptr;
  for (const auto& d : datasets)
    if (d.scene_id == held_out_scene) held = &d;
  if (held == nullptr)
    throw ConfigError("sweep: held-out scene '" + held_out_scene +
                      "' is not among the datasets");

  const auto run_point = [&](int n, int m) -> SweepRow {
    TrainConfig cfg = base;
    cfg.grid = grid::GridSpec{n, m};
    const auto splits = data::make_splits(datasets, held_out_scene, fraction,
                                          cfg.windows, cfg.seed);
    if (splits.test.empty())
      throw ConfigError("sweep: no test windows for the held-out scene");
    auto s1 = train_stage1(datasets, splits.stage1_train, splits.stage1_val,
                           cfg);
    auto s2 = train_stage2(s1.best, *held, splits, fraction, cfg);
    model::RolloutConfig rc = cfg.rollout;
    rc.decode = model::DecodeMode::Mean;
    double ade_sum = 0.0, fde_sum = 0.0;
    for (const auto& w : splits.test) {
      const auto pred =
          model::rollout_test(s2.final.params, s2.final.artifacts,
                              s2.final.bank, w, cfg.windows.t_obs, rc);
      const std::vector<Vec2> truth(w.positions.begin() + cfg.windows.t_obs,
                                    w.positions.end());
      ade_sum += eval::ade(pred.positions, truth);
      fde_sum += eval::fde(pred.positions, truth);
    }
    const double count = static_cast<double>(splits.test.size());
    return SweepRow{n, m, ade_sum / count, fde_sum / count};
  };

  SweepResult out;
  const auto m_rows =
      run_points(sizes, [&](int m) { return run_point(base.grid.n, m); });
  out.best_m = best_by_ade(m_rows, true);
  const auto n_rows =
      run_points(sizes, [&](int n) { return run_point(n, out.best_m); });
  out.best_n = best_by_ade(n_rows, false);
  out.rows = m_rows;
  out.rows.insert(out.rows.end(), n_rows.begin(), n_rows.end());
  return out;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out = "n,m,ade,fde\n";
  for (const SweepRow& r : result.rows)
    out += io::format_int(r.n) + "," + io::format_int(r.m) + "," +
           io::format_double(r.ade) + "," + io::format_double(r.fde) + "\n";
  return out;
}

std::string history_to_csv(const std::vector<EpochRecord>& history) {
  std::string out = "stage,epoch,train_nll,val_nll\n";
  for (const EpochRecord& e : history) {
    out += io::format_int(e.stage) + "," + io::format_int(e.epoch) + "," +
           io::format_double(e.train_nll) + ",";
    if (e.val_nll) out += io::format_double(*e.val_nll);
    out += "\n";
  }
  return out;
}

std::uint64_t dataset_hash(const data::SceneDataset& d) {
  return fnv1a64(data::export_csv(d));
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "gridpath.run_manifest";
  j["version"] = 1;
  j["command"] = m.command;
  j["config_fingerprint"] = m.config_fingerprint;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : m.config) j["config"][key] = value;
  j["dataset_hashes"] = nlohmann::ordered_json::array();
  for (const auto& [scene, hash] : m.dataset_hashes) {
    nlohmann::ordered_json e;
    e["scene_id"] = scene;
    e["fnv1a64"] = hash;
    j["dataset_hashes"].push_back(std::move(e));
  }
  j["history"] = nlohmann::ordered_json::array();
  for (const EpochRecord& e : m.history) {
    nlohmann::ordered_json je;
    je["stage"] = e.stage;
    je["epoch"] = e.epoch;
    je["train_nll"] = e.train_nll;
    if (e.val_nll)
      je["val_nll"] = *e.val_nll;
    else
      je["val_nll"] = nullptr;
    j["history"].push_back(std::move(je));
  }
  j["checkpoint_path"] = m.checkpoint_path;
  j["wall_seconds"] = m.wall_seconds;
  return j.dump(2) + "\n";
}

}  // namespace gridpath::train
