#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridpath/common.hpp"
#include "gridpath/data/splits.hpp"
#include "gridpath/data/synth.hpp"
#include "gridpath/model/checkpoint.hpp"
#include "gridpath/nn/tensor.hpp"
#include "gridpath/train/train.hpp"

using namespace gridpath;

namespace {

data::SceneDataset make_scene(const std::string& id, data::SynthLayout layout,
                              int peds, std::uint64_t seed) {
  data::SynthSceneSpec s;
  s.layout = layout;
  s.scene_id = id;
  s.ped_count = peds;
  s.seed = seed;
  return data::synth_generate(s);
}

std::vector<data::SceneDataset> fixture_scenes() {
  return {make_scene("a", data::SynthLayout::Straight, 12, 11),
          make_scene("b", data::SynthLayout::Straight, 12, 12),
          make_scene("held", data::SynthLayout::TJunction, 30, 13)};
}

train::TrainConfig tiny_config(int stage1_epochs, int stage2_epochs) {
  train::TrainConfig cfg;
  cfg.hidden = 8;
  cfg.embed = 4;
  cfg.grid = grid::GridSpec{2, 2};
  cfg.batch_size = 4;
  cfg.stage1_epochs = stage1_epochs;
  cfg.stage2_epochs = stage2_epochs;
  cfg.seed = 42;
  cfg.p = 1;
  return cfg;
}

bool params_equal(model::ModelParams& a, model::ModelParams& b) {
  auto la = a.parameters();
  auto lb = b.parameters();
  for (std::size_t i = 0; i < la.size(); ++i)
    if (!(la[i]->value == lb[i]->value)) return false;
  return true;
}

}  // namespace

TEST_CASE("train: config validation") {
  train::TrainConfig cfg = tiny_config(1, 1);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.dims().embed == 4);
  CHECK(cfg.dims().hidden == 8);
  CHECK(cfg.dims().subgrid_onehot == 4);

  auto bad = cfg;
  bad.lr = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.dropout = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.rollout.use_scene = false;  // soft filter without scene memory
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("train: stage 1 trains, validates, and keeps the best epoch") {
  const auto scenes = fixture_scenes();
  const auto cfg = tiny_config(3, 1);
  const auto splits =
      data::make_splits(scenes, "held", 0.5, cfg.windows, cfg.seed);
  REQUIRE(splits.stage1_train.size() >= 12);
  REQUIRE(!splits.stage1_val.empty());

  auto r = train::train_stage1(scenes, splits.stage1_train, splits.stage1_val,
                               cfg);
  REQUIRE(r.history.size() == 3);
  double best_val = r.history[0].val_nll.value();
  int best_epoch = 1;
  for (const auto& e : r.history) {
    CHECK(e.stage == 1);
    CHECK(std::isfinite(e.train_nll));
    REQUIRE(e.val_nll.has_value());
    if (*e.val_nll < best_val) {
      best_val = *e.val_nll;
      best_epoch = e.epoch;
    }
  }
  CHECK(r.best.train.best_val_nll == best_val);
  CHECK(r.best.train.best_val_epoch == best_epoch);
  CHECK(r.best.train.best_val_nll <= r.history.back().val_nll.value());
  CHECK(r.best.train.stage == 1);
  CHECK(r.last.train.epochs_completed == 3);
  CHECK(r.last.has_adam);

  // The emitted checkpoint is loadable and faithful.
  auto text = model::checkpoint_to_json(r.best);
  auto loaded = model::checkpoint_from_json(text);
  CHECK(params_equal(loaded.params, r.best.params));
  CHECK(loaded.train.best_val_epoch == best_epoch);
}

TEST_CASE("train: stage 1 is deterministic") {
  const auto scenes = fixture_scenes();
  const auto cfg = tiny_config(2, 1);
  const auto splits =
      data::make_splits(scenes, "held", 0.5, cfg.windows, cfg.seed);

  auto r1 = train::train_stage1(scenes, splits.stage1_train,
                                splits.stage1_val, cfg);
  auto r2 = train::train_stage1(scenes, splits.stage1_train,
                                splits.stage1_val, cfg);
  REQUIRE(r1.history.size() == r2.history.size());
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].train_nll == r2.history[i].train_nll);
    CHECK(r1.history[i].val_nll == r2.history[i].val_nll);
  }
  CHECK(model::checkpoint_to_json(r1.best) ==
        model::checkpoint_to_json(r2.best));
  CHECK(model::checkpoint_to_json(r1.last) ==
        model::checkpoint_to_json(r2.last));
}

TEST_CASE("train: saved checkpoint resumes the identical run") {
  const auto scenes = fixture_scenes();
  const auto splits = data::make_splits(scenes, "held", 0.5,
                                        data::WindowParams{}, 42);

  const auto full_cfg = tiny_config(5, 1);
  auto uninterrupted = train::train_stage1(scenes, splits.stage1_train,
                                           splits.stage1_val, full_cfg);

  auto partial_cfg = tiny_config(2, 1);
  auto part = train::train_stage1(scenes, splits.stage1_train,
                                  splits.stage1_val, partial_cfg);
  // Round-trip the resume point through its serialized form.
  auto saved = model::checkpoint_from_json(model::checkpoint_to_json(part.last));
  auto resumed = train::train_stage1(scenes, splits.stage1_train,
                                     splits.stage1_val, full_cfg, &saved);

  REQUIRE(uninterrupted.history.size() == 5);
  REQUIRE(resumed.history.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& a = uninterrupted.history[i + 2];
    const auto& b = resumed.history[i];
    CHECK(a.epoch == b.epoch);
    CHECK(a.train_nll == b.train_nll);
    CHECK(a.val_nll == b.val_nll);
  }
  CHECK(model::checkpoint_to_json(resumed.last) ==
        model::checkpoint_to_json(uninterrupted.last));
}

TEST_CASE("train: stage 1 rejects bad inputs") {
  const auto scenes = fixture_scenes();
  const auto cfg = tiny_config(1, 1);
  const auto splits =
      data::make_splits(scenes, "held", 0.5, cfg.windows, cfg.seed);

  CHECK_THROWS_AS(train::train_stage1(scenes, {}, splits.stage1_val, cfg),
                  ConfigError);
  CHECK_THROWS_AS(train::train_stage1(scenes, splits.stage1_train, {}, cfg),
                  ConfigError);

  auto r = train::train_stage1(scenes, splits.stage1_train, splits.stage1_val,
                               cfg);
  auto wrong_stage = r.last;
  wrong_stage.train.stage = 2;
  CHECK_THROWS_AS(train::train_stage1(scenes, splits.stage1_train,
                                      splits.stage1_val, cfg, &wrong_stage),
                  InvariantError);
  auto wrong_dims = tiny_config(2, 1);
  wrong_dims.hidden = 16;
  CHECK_THROWS_AS(train::train_stage1(scenes, splits.stage1_train,
                                      splits.stage1_val, wrong_dims, &r.last),
                  ConfigError);
}

TEST_CASE("train: stage 2 fine-tunes and freezes the scene bank") {
  const auto scenes = fixture_scenes();
  const auto cfg = tiny_config(1, 2);
  const auto splits =
      data::make_splits(scenes, "held", 0.5, cfg.windows, cfg.seed);
  REQUIRE(!splits.stage2_train.empty());
  REQUIRE(!splits.test.empty());

  auto s1 = train::train_stage1(scenes, splits.stage1_train,
                                splits.stage1_val, cfg);
  auto s2 = train::train_stage2(s1.best, scenes[2], splits, 0.5, cfg);

  CHECK(s2.final.bank.frozen());
  CHECK(s2.final.train.stage == 2);
  CHECK(s2.final.train.epochs_completed == 2);
  CHECK(s2.final.artifacts.scene_id == "held");
  REQUIRE(s2.history.size() == 2);
  for (const auto& e : s2.history) {
    CHECK(e.stage == 2);
    CHECK_FALSE(e.val_nll.has_value());
  }
  // Fine-tuning moved the weights, and the junction cell was learned: at
  // least one cell is non-linear and carries nonzero state.
  CHECK_FALSE(params_equal(s2.final.params, s1.best.params));
  bool any_nonlinear_state = false;
  for (int cell = 0; cell < s2.final.bank.cell_count(); ++cell)
    if (s2.final.bank.updatable(cell) &&
        s2.final.bank.h(cell).squared_norm() > 0.0)
      any_nonlinear_state = true;
  CHECK(any_nonlinear_state);

  // Determinism across repeat runs.
  auto s2b = train::train_stage2(s1.best, scenes[2], splits, 0.5, cfg);
  CHECK(model::checkpoint_to_json(s2.final) ==
        model::checkpoint_to_json(s2b.final));
}

TEST_CASE("train: stage 2 fraction 0 is a no-op with a frozen zero bank") {
  const auto scenes = fixture_scenes();
  const auto cfg = tiny_config(1, 2);
  const auto splits05 =
      data::make_splits(scenes, "held", 0.5, cfg.windows, cfg.seed);
  const auto splits00 =
      data::make_splits(scenes, "held", 0.0, cfg.windows, cfg.seed);
  CHECK(splits00.stage2_train.empty());

  auto s1 = train::train_stage1(scenes, splits05.stage1_train,
                                splits05.stage1_val, cfg);
  auto s2 = train::train_stage2(s1.best, scenes[2], splits00, 0.0, cfg);

  CHECK(s2.history.empty());
  CHECK(s2.final.train.epochs_completed == 0);
  CHECK(params_equal(s2.final.params, s1.best.params));
  CHECK(s2.final.bank.frozen());
  for (int cell = 0; cell < s2.final.bank.cell_count(); ++cell) {
    CHECK(s2.final.bank.h(cell).squared_norm() == 0.0);
    CHECK_FALSE(s2.final.artifacts.nonlinear(cell));
  }

  CHECK_THROWS_AS(train::train_stage2(s1.best, scenes[2], splits05, 0.6, cfg),
                  ConfigError);

  // Tampered splits leaking a test-range window are caught.
  auto tampered = splits05;
  REQUIRE(!tampered.test.empty());
  tampered.stage2_train.push_back(tampered.test.front());
  CHECK_THROWS_AS(train::train_stage2(s1.best, scenes[2], tampered, 0.5, cfg),
                  InvariantError);
}

TEST_CASE("train: grid sweep bookkeeping") {
  const auto scenes = fixture_scenes();
  auto cfg = tiny_config(1, 1);

  const std::vector<int> sizes{1, 2};
  auto sweep = train::sweep_grid_sizes(scenes, "held", 0.5, cfg, sizes);
  REQUIRE(sweep.rows.size() == 4);
  CHECK(sweep.rows[0].n == 2);
  CHECK(sweep.rows[0].m == 1);
  CHECK(sweep.rows[1].n == 2);
  CHECK(sweep.rows[1].m == 2);
  CHECK(sweep.rows[2].n == 1);
  CHECK(sweep.rows[2].m == sweep.best_m);
  CHECK(sweep.rows[3].n == 2);
  for (const auto& r : sweep.rows) {
    CHECK(std::isfinite(r.ade));
    CHECK(r.ade >= 0.0);
    CHECK(r.fde >= 0.0);
  }

  const auto csv = train::sweep_to_csv(sweep);
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 5);

  // Determinism.
  auto again = train::sweep_grid_sizes(scenes, "held", 0.5, cfg, sizes);
  CHECK(train::sweep_to_csv(again) == csv);

  // Degenerate single-cell geometry completes.
  auto tiny = train::sweep_grid_sizes(scenes, "held", 0.5, cfg, {1});
  REQUIRE(tiny.rows.size() == 2);
  CHECK(tiny.rows[1].n == 1);
  CHECK(tiny.rows[1].m == 1);

  CHECK_THROWS_AS(train::sweep_grid_sizes(scenes, "held", 0.5, cfg, {}),
                  ConfigError);
  CHECK_THROWS_AS(train::sweep_grid_sizes(scenes, "held", 0.5, cfg, {0}),
                  ConfigError);
  CHECK_THROWS_AS(train::sweep_grid_sizes(scenes, "nope", 0.5, cfg, sizes),
                  ConfigError);
}

TEST_CASE("train: history CSV and run manifest") {
  std::vector<train::EpochRecord> history{
      {1, 1, 2.5, 2.25}, {1, 2, 2.0, 1.75}, {2, 1, 1.5, std::nullopt}};
  const auto csv = train::history_to_csv(history);
  CHECK(csv ==
        "stage,epoch,train_nll,val_nll\n"
        "1,1,2.5,2.25\n"
        "1,2,2,1.75\n"
        "2,1,1.5,\n");

  const auto scenes = fixture_scenes();
  CHECK(train::dataset_hash(scenes[0]) == train::dataset_hash(scenes[0]));
  CHECK(train::dataset_hash(scenes[0]) != train::dataset_hash(scenes[1]));

  train::RunManifest m;
  m.command = "train";
  m.config_fingerprint = 123456789;
  m.config = {{"seed", "42"}, {"hidden", "8"}};
  m.dataset_hashes = {{"a", train::dataset_hash(scenes[0])}};
  m.history = history;
  m.checkpoint_path = "out/checkpoint.json";
  m.wall_seconds = 1.25;
  const auto text = train::manifest_to_json(m);
  const auto parsed = nlohmann::json::parse(text);
  CHECK(parsed.at("format") == "gridpath.run_manifest");
  CHECK(parsed.at("config").at("seed") == "42");
  CHECK(parsed.at("history").size() == 3);
  CHECK(parsed.at("history").at(2).at("val_nll").is_null());
  CHECK(parsed.at("checkpoint_path") == "out/checkpoint.json");
}
