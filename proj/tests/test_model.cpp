#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridpath/common.hpp"
#include "gridpath/data/windows.hpp"
#include "gridpath/grid/artifacts.hpp"
#include "gridpath/grid/bank.hpp"
#include "gridpath/grid/grid.hpp"
#include "gridpath/model/checkpoint.hpp"
#include "gridpath/model/model.hpp"
#include "gridpath/nn/gaussian.hpp"
#include "gridpath/nn/layers.hpp"
#include "gridpath/nn/optim.hpp"
#include "helpers.hpp"
#include "support/mining_oracle.hpp"

using namespace gridpath;
using grid::CellClass;
using grid::GridSpec;
using model::BatchOptions;
using model::ModelDims;
using model::ModelParams;
using model::RolloutConfig;

namespace {

const GridSpec kSpec{2, 2};

ModelDims tiny_dims() {
  ModelDims d;
  d.embed = 4;
  d.hidden = 8;
  d.subgrid_onehot = kSpec.subgrid_count();
  return d;
}

data::Track planned(long long ped_id,
                    const std::vector<std::pair<int, int>>& stops) {
  data::Track t;
  t.ped_id = ped_id;
  for (const auto& [cell, sub] : stops)
    t.points.push_back(testutil::subgrid_center(cell, sub, kSpec));
  return t;
}

// One bender plus five straight walkers per listed cell: the cell turns
// non-linear and the diagonal subgrid edge (0 -> 3) becomes common.
grid::GridArtifacts artifacts_with_turns(const std::vector<int>& cells) {
  std::vector<data::Track> tracks;
  long long ped = 1;
  for (const int cell : cells) {
    tracks.push_back(planned(ped++, {{cell, 0}, {cell, 1}, {cell, 3}}));
    for (int j = 0; j < 5; ++j)
      tracks.push_back(planned(ped++, {{cell, 0}, {cell, 3}}));
  }
  return grid::build_artifacts(tracks, testutil::unit_bounds(), kSpec, 0.1, 3,
                               "model-test");
}

grid::GridArtifacts all_linear_artifacts() {
  std::vector<data::Track> tracks;
  tracks.push_back(planned(1, {{0, 0}, {0, 3}, {3, 0}, {3, 3}}));
  tracks.push_back(planned(2, {{2, 0}, {2, 3}}));
  return grid::build_artifacts(tracks, testutil::unit_bounds(), kSpec, 0.1, 3,
                               "model-test-linear");
}

// A 20-step window that stays inside one cell and hops between subgrids, so
// a full-config pass reads and writes scene state on most steps.
data::TrajectoryWindow hopping_window(int cell, long long ped_id) {
  static const int kSubs[20] = {0, 0, 1, 3, 3, 0, 3, 1, 0, 3,
                                0, 1, 3, 0, 3, 3, 1, 0, 3, 0};
  data::TrajectoryWindow w;
  w.scene_id = "model-test";
  w.ped_id = ped_id;
  w.start_frame = 0;
  for (int s : kSubs)
    w.positions.push_back(testutil::subgrid_center(cell, s, kSpec));
  return w;
}

int count_use_scene_steps(const grid::GridArtifacts& a,
                          const data::TrajectoryWindow& w) {
  int n = 0;
  for (std::size_t s = 0; s + 1 < w.positions.size(); ++s) {
    const Vec2 u = data::to_unit(
        data::clamp_to_bounds(w.positions[s], a.bounds), a.bounds);
    const auto loc = grid::locate(u, a.spec);
    if (a.read_allowed(loc.cell, loc.subgrid, true, true)) ++n;
  }
  return n;
}

grid::SceneStateBank fresh_bank(const grid::GridArtifacts& a, int hidden) {
  return grid::SceneStateBank::from_classes(a.classes, hidden);
}

}  // namespace

TEST_CASE("model: parameter layout and deterministic init") {
  ModelParams p(tiny_dims(), 11);
  auto list = p.parameters();
  REQUIRE(list.size() == 10);
  CHECK(list[0]->name == "w_embed");
  CHECK(list[1]->name == "ped.w_in");
  CHECK(list[4]->name == "scene.w_in");
  CHECK(list[7]->name == "w_soft");
  CHECK(list[8]->name == "b_soft");
  CHECK(list[9]->name == "w_out");
  CHECK(p.w_embed.value.shape() == std::vector<std::size_t>{4, 2});
  CHECK(p.ped.w_in.value.shape() == std::vector<std::size_t>{32, 4});
  CHECK(p.scene.w_in.value.shape() == std::vector<std::size_t>{32, 12});
  CHECK(p.w_soft.value.shape() == std::vector<std::size_t>{8, 12});
  CHECK(p.b_soft.value == nn::Tensor::zeros({8}));
  CHECK(p.w_out.value.shape() == std::vector<std::size_t>{5, 8});

  ModelParams q(tiny_dims(), 11);
  for (std::size_t i = 0; i < list.size(); ++i)
    CHECK(q.parameters()[i]->value == list[i]->value);
  ModelParams r(tiny_dims(), 12);
  CHECK_FALSE(r.w_embed.value == p.w_embed.value);

  ModelDims bad = tiny_dims();
  bad.hidden = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(ModelParams(bad, 1), ConfigError);
}

TEST_CASE("model: ablation configuration table") {
  const auto& names = model::ablation_names();
  REQUIRE(names.size() == 7);

  const auto pm_abs = model::ablation_config("PM_abs");
  CHECK(pm_abs.location == model::LocationMode::Absolute);
  CHECK_FALSE(pm_abs.use_scene);

  const auto pm_rel = model::ablation_config("PM_rel");
  CHECK(pm_rel.location == model::LocationMode::Relative);
  CHECK_FALSE(pm_rel.use_scene);

  const auto sd = model::ablation_config("+SD");
  CHECK(sd.use_scene);
  CHECK_FALSE(sd.use_hf_grid);
  CHECK_FALSE(sd.use_sf);

  const auto hf = model::ablation_config("+HF_subgrid");
  CHECK(hf.use_hf_grid);
  CHECK(hf.use_hf_subgrid);
  CHECK_FALSE(hf.use_sf);

  const auto sf = model::ablation_config("+SF");
  CHECK(sf.use_scene);
  CHECK(sf.use_sf);
  CHECK_FALSE(sf.use_hf_grid);

  const auto full = model::ablation_config("full");
  CHECK(full.use_scene);
  CHECK(full.use_hf_grid);
  CHECK(full.use_hf_subgrid);
  CHECK(full.use_sf);

  CHECK_THROWS_AS(model::ablation_config("PM"), ConfigError);

  RolloutConfig c;
  c.use_scene = false;
  c.use_hf_grid = false;
  c.use_hf_subgrid = false;
  c.use_sf = true;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.use_sf = false;
  c.use_hf_subgrid = true;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.use_hf_subgrid = false;
  c.use_hf_grid = true;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("model: batch loss equals a hand-rolled teacher-forced pass") {
  const auto art = artifacts_with_turns({0});
  ModelParams params(tiny_dims(), 3);
  auto bank = fresh_bank(art, params.dims.hidden);
  const auto w = hopping_window(0, 1);

  BatchOptions opt;  // Train mode, no dropout, no gradients
  const double engine_loss =
      model::run_batch(params, art, bank, {&w},
                       /*frame_stride=*/1, model::ablation_config("PM_rel"),
                       opt);

  // Independent replay with the plain-tensor wrappers and the raw-head NLL.
  const auto hidden = static_cast<std::size_t>(params.dims.hidden);
  nn::Tensor h = nn::Tensor::zeros({hidden});
  nn::Tensor c = nn::Tensor::zeros({hidden});
  double manual = 0.0;
  for (std::size_t s = 0; s + 1 < w.positions.size(); ++s) {
    const Vec2 d = s == 0 ? Vec2{0.0, 0.0}
                          : w.positions[s] - w.positions[s - 1];
    auto [h2, c2] = nn::lstm_step(
        params.ped,
        nn::embed_relu(params.w_embed, nn::Tensor::vec({d.x, d.y})), h, c);
    h = h2;
    c = c2;
    double raw[5];
    for (std::size_t i = 0; i < 5; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < hidden; ++j)
        acc += params.w_out.value[i * hidden + j] * h[j];
      raw[i] = acc;
    }
    const Vec2 target = w.positions[s + 1] - w.positions[s];
    manual += nn::bvn_nll_raw(raw, target.x, target.y);
  }
  CHECK(std::abs(engine_loss - manual) <= 1e-12);
}

TEST_CASE("model: tiny full-model gradients match finite differences") {
  const auto art = artifacts_with_turns({0});
  const auto w = hopping_window(0, 1);
  REQUIRE(count_use_scene_steps(art, w) >= 3);

  ModelParams params(tiny_dims(), 5);
  const auto cfg = model::ablation_config("full");

  auto eval = [&](bool with_grad) {
    auto bank = fresh_bank(art, params.dims.hidden);
    BatchOptions opt;
    opt.compute_gradients = with_grad;
    return model::run_batch(params, art, bank, {&w}, 1, cfg, opt);
  };

  const auto r = testutil::fd_check(params.parameters(), eval);
  std::size_t expected = 0;
  for (auto* p : params.parameters()) expected += p->value.size();
  CHECK(r.checked == expected);
  CHECK(r.max_rel <= 1e-4);

  // The scene path genuinely participates: its parameters pick up gradient.
  nn::zero_grads(params.parameters());
  eval(true);
  CHECK(params.scene.w_in.grad.squared_norm() > 0.0);
  CHECK(params.w_soft.grad.squared_norm() > 0.0);
  CHECK(params.b_soft.grad.squared_norm() > 0.0);
}

TEST_CASE("model: scene gating is exact on an all-linear scene") {
  const auto art = all_linear_artifacts();
  const auto w = hopping_window(0, 1);

  const auto run_steps = [&](const std::string& ablation) {
    ModelParams params(tiny_dims(), 7);
    nn::Adam adam(params.parameters());
    nn::RngStream drop(substream_seed(21, "dropout/test/0"));
    auto bank = fresh_bank(art, params.dims.hidden);
    std::vector<double> losses;
    for (int step = 0; step < 3; ++step) {
      BatchOptions opt;
      opt.dropout_rate = 0.2;
      opt.dropout_rng = &drop;
      opt.optimizer = &adam;
      losses.push_back(model::run_batch(params, art, bank, {&w}, 1,
                                        model::ablation_config(ablation),
                                        opt));
    }
    auto frozen = fresh_bank(art, params.dims.hidden);
    frozen.freeze();
    const auto pred =
        model::rollout_test(params, art, frozen, w, 8,
                            model::ablation_config(ablation));
    return std::make_tuple(losses, params, pred);
  };

  const auto [l_full, p_full, pred_full] = run_steps("full");
  const auto [l_pm, p_pm, pred_pm] = run_steps("PM_rel");
  // No cell is non-linear, so the hard filter blocks every read and the
  // class gate blocks every write: bit-identical training and predictions.
  REQUIRE(l_full.size() == l_pm.size());
  for (std::size_t i = 0; i < l_full.size(); ++i) CHECK(l_full[i] == l_pm[i]);
  {
    ModelParams& a = const_cast<ModelParams&>(p_full);
    ModelParams& b = const_cast<ModelParams&>(p_pm);
    auto la = a.parameters();
    auto lb = b.parameters();
    for (std::size_t i = 0; i < la.size(); ++i)
      CHECK(la[i]->value == lb[i]->value);
  }
  REQUIRE(pred_full.positions.size() == pred_pm.positions.size());
  for (std::size_t i = 0; i < pred_full.positions.size(); ++i) {
    CHECK(pred_full.positions[i].x == pred_pm.positions[i].x);
    CHECK(pred_full.positions[i].y == pred_pm.positions[i].y);
  }

  // Reading an untouched (all-zero) bank everywhere is also an exact no-op.
  const auto [l_sd, p_sd, pred_sd] = run_steps("+SD");
  for (std::size_t i = 0; i < l_sd.size(); ++i) CHECK(l_sd[i] == l_pm[i]);
  for (std::size_t i = 0; i < pred_sd.positions.size(); ++i) {
    CHECK(pred_sd.positions[i].x == pred_pm.positions[i].x);
    CHECK(pred_sd.positions[i].y == pred_pm.positions[i].y);
  }
}

TEST_CASE("model: batch loss is additive over windows in disjoint cells") {
  const auto art = artifacts_with_turns({0, 3});
  ModelParams params(tiny_dims(), 9);
  const auto cfg = model::ablation_config("full");
  const auto wa = hopping_window(0, 1);
  const auto wb = hopping_window(3, 2);
  BatchOptions opt;

  auto bank_a = fresh_bank(art, params.dims.hidden);
  const double la = model::run_batch(params, art, bank_a, {&wa}, 1, cfg, opt);
  auto bank_b = fresh_bank(art, params.dims.hidden);
  const double lb = model::run_batch(params, art, bank_b, {&wb}, 1, cfg, opt);
  auto bank_ab = fresh_bank(art, params.dims.hidden);
  const double lab =
      model::run_batch(params, art, bank_ab, {&wa, &wb}, 1, cfg, opt);
  CHECK(std::abs(lab - 0.5 * (la + lb)) <= 1e-12);

  // Caller-side ordering is irrelevant: processing is canonically ordered.
  auto bank_ba = fresh_bank(art, params.dims.hidden);
  const double lba =
      model::run_batch(params, art, bank_ba, {&wb, &wa}, 1, cfg, opt);
  CHECK(lba == lab);
  for (int cell = 0; cell < art.spec.cell_count(); ++cell) {
    CHECK(bank_ba.h(cell) == bank_ab.h(cell));
    CHECK(bank_ba.c(cell) == bank_ab.c(cell));
  }

  // Two pedestrians sharing one cell couple through the bank, so the batch
  // loss is no longer the mean of isolated losses.
  const auto wc = hopping_window(0, 2);
  auto bank_c = fresh_bank(art, params.dims.hidden);
  const double lc = model::run_batch(params, art, bank_c, {&wc}, 1, cfg, opt);
  auto bank_shared = fresh_bank(art, params.dims.hidden);
  const double lshared =
      model::run_batch(params, art, bank_shared, {&wa, &wc}, 1, cfg, opt);
  CHECK(lshared != 0.5 * (la + lc));
}

TEST_CASE("model: test rollout is pure and validates its inputs") {
  const auto art = artifacts_with_turns({0});
  ModelParams params(tiny_dims(), 13);
  const auto w = hopping_window(0, 1);
  const auto cfg = model::ablation_config("full");

  auto bank = fresh_bank(art, params.dims.hidden);
  // Give the non-linear cell a nonzero state so reads really read data.
  bank.set(0, nn::Tensor::full({8}, 0.25), nn::Tensor::full({8}, -0.5));

  CHECK_THROWS_AS(model::rollout_test(params, art, bank, w, 8, cfg),
                  InvariantError);  // unfrozen bank
  bank.freeze();

  const auto first = model::rollout_test(params, art, bank, w, 8, cfg);
  const auto second = model::rollout_test(params, art, bank, w, 8, cfg);
  REQUIRE(first.positions.size() == 12);
  REQUIRE(first.gaussians.size() == 12);
  for (std::size_t i = 0; i < first.positions.size(); ++i) {
    CHECK(first.positions[i].x == second.positions[i].x);
    CHECK(first.positions[i].y == second.positions[i].y);
  }
  CHECK(bank.h(0) == nn::Tensor::full({8}, 0.25));
  CHECK(bank.c(0) == nn::Tensor::full({8}, -0.5));

  CHECK_THROWS_AS(model::rollout_test(params, art, bank, w, 0, cfg),
                  InvariantError);
  CHECK_THROWS_AS(model::rollout_test(params, art, bank, w, 20, cfg),
                  InvariantError);
}

TEST_CASE("model: zero parameters predict a standstill") {
  const auto art = artifacts_with_turns({0});
  ModelParams params(tiny_dims(), 1);
  for (auto* p : params.parameters()) p->value.fill(0.0);
  auto bank = fresh_bank(art, params.dims.hidden);
  bank.freeze();

  const auto w = hopping_window(0, 1);
  const auto pred = model::rollout_test(params, art, bank, w, 8,
                                        model::ablation_config("full"));
  REQUIRE(pred.positions.size() == 12);
  for (const auto& p : pred.positions) {
    CHECK(p.x == w.positions[7].x);
    CHECK(p.y == w.positions[7].y);
  }
  for (const auto& g : pred.gaussians) {
    CHECK(g.mux == 0.0);
    CHECK(g.muy == 0.0);
    CHECK(g.sx == 1.0);
    CHECK(g.sy == 1.0);
    CHECK(g.rho == 0.0);
  }
}

TEST_CASE("model: sampled decoding is seeded and reproducible") {
  const auto art = artifacts_with_turns({0});
  ModelParams params(tiny_dims(), 17);
  auto bank = fresh_bank(art, params.dims.hidden);
  bank.freeze();
  const auto w = hopping_window(0, 1);

  auto cfg = model::ablation_config("full");
  cfg.decode = model::DecodeMode::Sample;
  cfg.sample_seed = 5;
  const auto a = model::rollout_test(params, art, bank, w, 8, cfg);
  const auto b = model::rollout_test(params, art, bank, w, 8, cfg);
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    CHECK(a.positions[i].x == b.positions[i].x);
    CHECK(a.positions[i].y == b.positions[i].y);
  }

  cfg.sample_seed = 6;
  const auto c = model::rollout_test(params, art, bank, w, 8, cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.positions.size(); ++i)
    if (a.positions[i].x != c.positions[i].x ||
        a.positions[i].y != c.positions[i].y)
      any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("model: run_batch rejects ill-formed requests") {
  const auto art = artifacts_with_turns({0});
  ModelParams params(tiny_dims(), 19);
  auto bank = fresh_bank(art, params.dims.hidden);
  const auto w = hopping_window(0, 1);
  const auto cfg = model::ablation_config("full");
  BatchOptions opt;

  CHECK_THROWS_AS(model::run_batch(params, art, bank, {}, 1, cfg, opt),
                  InvariantError);
  CHECK_THROWS_AS(model::run_batch(params, art, bank, {&w}, 0, cfg, opt),
                  InvariantError);

  auto frozen = fresh_bank(art, params.dims.hidden);
  frozen.freeze();
  CHECK_THROWS_AS(model::run_batch(params, art, frozen, {&w}, 1, cfg, opt),
                  InvariantError);

  data::TrajectoryWindow tiny = w;
  tiny.positions.resize(1);
  CHECK_THROWS_AS(model::run_batch(params, art, bank, {&tiny}, 1, cfg, opt),
                  InvariantError);

  BatchOptions dropless;
  dropless.dropout_rate = 0.5;  // Train mode but no stream provided
  CHECK_THROWS_AS(model::run_batch(params, art, bank, {&w}, 1, cfg, dropless),
                  InvariantError);

  auto short_bank = grid::SceneStateBank::from_classes(art.classes, 4);
  CHECK_THROWS_AS(model::run_batch(params, art, short_bank, {&w}, 1, cfg, opt),
                  InvariantError);
}

TEST_CASE("model: checkpoint round trip preserves everything") {
  const auto art = artifacts_with_turns({0});
  model::Checkpoint ck;
  ck.params = ModelParams(tiny_dims(), 23);
  ck.artifacts = art;
  ck.bank = fresh_bank(art, ck.params.dims.hidden);
  ck.rollout = model::ablation_config("full");
  ck.rollout.decode = model::DecodeMode::Sample;
  ck.rollout.sample_seed = 9;
  ck.init_seed = 23;
  ck.train.stage = 2;
  ck.train.epochs_completed = 7;
  ck.train.best_val_nll = 1.25;
  ck.train.best_val_epoch = 3;

  // One real optimizer step so moments and the bank are nonzero.
  nn::Adam adam(ck.params.parameters());
  const auto w = hopping_window(0, 1);
  BatchOptions opt;
  opt.optimizer = &adam;
  model::run_batch(ck.params, ck.artifacts, ck.bank, {&w}, 1, ck.rollout, opt);
  model::capture_adam(ck, adam);
  ck.bank.freeze();

  const std::string text = model::checkpoint_to_json(ck);
  auto loaded = model::checkpoint_from_json(text);

  auto la = ck.params.parameters();
  auto lb = loaded.params.parameters();
  REQUIRE(la.size() == lb.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    CHECK(lb[i]->name == la[i]->name);
    CHECK(lb[i]->value == la[i]->value);
  }
  CHECK(loaded.artifacts.classes == ck.artifacts.classes);
  CHECK(testutil::tables_equal(loaded.artifacts.table, ck.artifacts.table));
  CHECK(loaded.artifacts.config_fingerprint == ck.artifacts.config_fingerprint);
  CHECK(loaded.bank.frozen());
  for (int cell = 0; cell < ck.bank.cell_count(); ++cell) {
    CHECK(loaded.bank.h(cell) == ck.bank.h(cell));
    CHECK(loaded.bank.c(cell) == ck.bank.c(cell));
  }
  CHECK(loaded.rollout.use_sf == ck.rollout.use_sf);
  CHECK(loaded.rollout.decode == ck.rollout.decode);
  CHECK(loaded.rollout.sample_seed == ck.rollout.sample_seed);
  CHECK(loaded.train.stage == 2);
  CHECK(loaded.train.epochs_completed == 7);
  CHECK(loaded.train.best_val_nll == 1.25);
  CHECK(loaded.train.best_val_epoch == 3);
  REQUIRE(loaded.has_adam);
  CHECK(loaded.adam_step_count == 1);
  for (std::size_t i = 0; i < la.size(); ++i) {
    CHECK(loaded.adam_m[i] == ck.adam_m[i]);
    CHECK(loaded.adam_v[i] == ck.adam_v[i]);
  }

  // Serialization is deterministic, and behavior survives the round trip.
  CHECK(model::checkpoint_to_json(loaded) == text);
  const auto before = model::rollout_test(ck.params, ck.artifacts, ck.bank, w,
                                          8, ck.rollout);
  const auto after = model::rollout_test(loaded.params, loaded.artifacts,
                                         loaded.bank, w, 8, loaded.rollout);
  for (std::size_t i = 0; i < before.positions.size(); ++i) {
    CHECK(before.positions[i].x == after.positions[i].x);
    CHECK(before.positions[i].y == after.positions[i].y);
  }

  // Adam restore feeds a fresh optimizer the saved moments.
  nn::Adam resumed(loaded.params.parameters());
  model::restore_adam(loaded, resumed);
  CHECK(resumed.step_count() == 1);
}

TEST_CASE("model: checkpoint rejects malformed documents") {
  const auto art = artifacts_with_turns({0});
  model::Checkpoint ck;
  ck.params = ModelParams(tiny_dims(), 29);
  ck.artifacts = art;
  ck.bank = fresh_bank(art, ck.params.dims.hidden);
  ck.rollout = model::ablation_config("PM_rel");
  ck.init_seed = 29;
  const std::string good = model::checkpoint_to_json(ck);
  CHECK_NOTHROW(model::checkpoint_from_json(good));
  CHECK_THROWS_AS(model::checkpoint_from_json("nope"), DataError);

  auto mutate = [&](auto fn) {
    auto j = nlohmann::ordered_json::parse(good);
    fn(j);
    return j.dump() + "\n";
  };

  CHECK_THROWS_AS(model::checkpoint_from_json(
                      mutate([](auto& j) { j["version"] = 2; })),
                  DataError);
  CHECK_THROWS_AS(model::checkpoint_from_json(mutate([](auto& j) {
                    j["params"][0]["name"] = "w_unknown";
                  })),
                  DataError);
  CHECK_THROWS_AS(model::checkpoint_from_json(mutate([](auto& j) {
                    j["params"][0]["values"].push_back(0.0);
                  })),
                  DataError);
  CHECK_THROWS_AS(model::checkpoint_from_json(mutate([](auto& j) {
                    j["bank"]["h"].erase(0);
                  })),
                  DataError);
  CHECK_THROWS_AS(model::checkpoint_from_json(mutate([](auto& j) {
                    j["dims"]["subgrid_onehot"] = 16;
                  })),
                  DataError);
  // State on a linear cell (cell 1 is linear in this fixture).
  CHECK_THROWS_AS(model::checkpoint_from_json(mutate([](auto& j) {
                    j["bank"]["h"][1][0] = 1.0;
                  })),
                  DataError);
}
