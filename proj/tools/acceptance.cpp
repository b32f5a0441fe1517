// Acceptance harness: runs every gating criterion end to end and prints one
// PASS/FAIL line per criterion (plus one informational line). Exit code 0
// iff all gating criteria pass. Budgets are wall-clock seconds and are part
// of the criterion: a correct-but-slow run fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "../tests/helpers.hpp"
#include "../tests/support/mining_oracle.hpp"
#include "gridpath/common.hpp"
#include "gridpath/data/splits.hpp"
#include "gridpath/data/synth.hpp"
#include "gridpath/data/windows.hpp"
#include "gridpath/eval/eval.hpp"
#include "gridpath/grid/artifacts.hpp"
#include "gridpath/grid/bank.hpp"
#include "gridpath/io/kv.hpp"
#include "gridpath/model/checkpoint.hpp"
#include "gridpath/model/model.hpp"
#include "gridpath/nn/optim.hpp"
#include "gridpath/train/train.hpp"

using namespace gridpath;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- reporting

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

bool report(int id, const Outcome& o, double seconds, double budget) {
  const bool in_budget = budget <= 0.0 || seconds < budget;
  const bool pass = o.pass && in_budget;
  std::string line = "criterion " + std::to_string(id) + ": " +
                     (pass ? "PASS" : "FAIL") + "  " + o.detail;
  line += " [" + fmt(seconds) + " s";
  if (budget > 0.0) line += " of " + fmt(budget) + " s budget";
  line += "]";
  if (!in_budget && o.pass) line += " (over budget)";
  std::puts(line.c_str());
  std::fflush(stdout);
  return pass;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ------------------------------------------------------- shared fixtures

const grid::GridSpec kTinySpec{2, 2};

model::ModelDims tiny_dims() {
  model::ModelDims d;
  d.embed = 4;
  d.hidden = 8;
  d.subgrid_onehot = kTinySpec.subgrid_count();
  return d;
}

data::Track planned(long long ped_id,
                    const std::vector<std::pair<int, int>>& stops) {
  data::Track t;
  t.ped_id = ped_id;
  for (const auto& [cell, sub] : stops)
    t.points.push_back(testutil::subgrid_center(cell, sub, kTinySpec));
  return t;
}

// One bender plus five straights through cell 0: the cell turns non-linear
// and the 0 -> 3 subgrid edge becomes common.
grid::GridArtifacts turning_artifacts() {
  std::vector<data::Track> tracks;
  long long ped = 1;
  tracks.push_back(planned(ped++, {{0, 0}, {0, 1}, {0, 3}}));
  for (int j = 0; j < 5; ++j)
    tracks.push_back(planned(ped++, {{0, 0}, {0, 3}}));
  return grid::build_artifacts(tracks, testutil::unit_bounds(), kTinySpec, 0.1,
                               3, "acceptance");
}

// 20 positions hopping between subgrids of one non-linear cell, so a
// full-model pass keeps reading and writing scene state.
data::TrajectoryWindow hopping_window() {
  static const int kSubs[20] = {0, 0, 1, 3, 3, 0, 3, 1, 0, 3,
                                0, 1, 3, 0, 3, 3, 1, 0, 3, 0};
  data::TrajectoryWindow w;
  w.scene_id = "acceptance";
  w.ped_id = 1;
  w.start_frame = 0;
  for (int s : kSubs)
    w.positions.push_back(testutil::subgrid_center(0, s, kTinySpec));
  return w;
}

int count_use_scene_steps(const grid::GridArtifacts& a,
                          const data::TrajectoryWindow& w) {
  int n = 0;
  for (std::size_t s = 0; s + 1 < w.positions.size(); ++s) {
    const Vec2 u =
        data::to_unit(data::clamp_to_bounds(w.positions[s], a.bounds), a.bounds);
    const auto loc = grid::locate(u, a.spec);
    if (a.read_allowed(loc.cell, loc.subgrid, true, true)) ++n;
  }
  return n;
}

data::SceneDataset synth_scene(data::SynthLayout layout,
                               const std::string& scene_id, int peds,
                               double noise, std::uint64_t seed,
                               double branch_left = 0.5,
                               double branch_right = 0.5) {
  data::SynthSceneSpec s;
  s.layout = layout;
  s.scene_id = scene_id;
  s.ped_count = peds;
  s.noise_sigma = noise;
  s.branch_left = branch_left;
  s.branch_right = branch_right;
  s.seed = seed;
  return data::synth_generate(s);
}

struct PairMetrics {
  double ade = 0.0;
  double fde = 0.0;
};

// Mean-decode rollouts over `windows`, averaged ADE/FDE; `turning_only`
// restricts to windows whose ground-truth future bends beyond theta.
PairMetrics score_windows(model::Checkpoint& ck,
                          const std::vector<data::TrajectoryWindow>& windows,
                          const model::RolloutConfig& cfg, int t_obs,
                          double theta, bool turning_only, int* counted) {
  PairMetrics m;
  int n = 0;
  for (const data::TrajectoryWindow& w : windows) {
    const std::vector<Vec2> future(w.positions.begin() + t_obs,
                                   w.positions.end());
    if (turning_only && grid::is_linear_segment(future, theta)) continue;
    const auto pred =
        model::rollout_test(ck.params, ck.artifacts, ck.bank, w, t_obs, cfg);
    m.ade += eval::ade(pred.positions, future);
    m.fde += eval::fde(pred.positions, future);
    ++n;
  }
  if (n > 0) {
    m.ade /= n;
    m.fde /= n;
  }
  if (counted != nullptr) *counted = n;
  return m;
}

double median3(double a, double b, double c) {
  std::vector<double> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v[1];
}

// ------------------------------------------------------------ criterion 1

Outcome criterion1() {
  const auto art = turning_artifacts();
  const auto w = hopping_window();
  const int scene_steps = count_use_scene_steps(art, w);
  if (scene_steps < 3)
    return {false, "gradient suite: fixture has only " +
                       std::to_string(scene_steps) + " UseScene steps"};

  model::ModelParams params(tiny_dims(), 5);
  const auto cfg = model::ablation_config("full");
  auto eval_loss = [&](bool with_grad) {
    auto bank = grid::SceneStateBank::from_classes(art.classes, 8);
    model::BatchOptions opt;
    opt.compute_gradients = with_grad;
    return model::run_batch(params, art, bank, {&w}, 1, cfg, opt);
  };
  const auto r = testutil::fd_check(params.parameters(), eval_loss, 1e-5);

  std::size_t expected = 0;
  for (auto* p : params.parameters()) expected += p->value.size();
  const bool pass = r.checked == expected && r.max_rel <= 1e-4;
  return {pass, "gradient suite: " + std::to_string(r.checked) +
                    " parameters, max rel err " + fmt(r.max_rel) +
                    " (tol 1e-4, " + std::to_string(scene_steps) +
                    " UseScene steps)"};
}

// ------------------------------------------------------------ criterion 2

Outcome criterion2() {
  // All-linear corpus: two straight scenes, the larger one held out.
  std::vector<data::SceneDataset> scenes;
  scenes.push_back(synth_scene(data::SynthLayout::Straight, "alpha", 14, 0.0,
                               substream_seed(11, "acc2/alpha")));
  scenes.push_back(synth_scene(data::SynthLayout::Straight, "beta", 40, 0.0,
                               substream_seed(11, "acc2/beta")));

  train::TrainConfig cfg;
  cfg.hidden = 8;
  cfg.embed = 4;
  cfg.stage1_epochs = 2;
  cfg.stage2_epochs = 1;
  cfg.batch_size = 4;
  cfg.seed = 11;
  cfg.grid = {4, 2};
  const data::Splits splits =
      data::make_splits(scenes, "beta", 0.5, cfg.windows, cfg.seed);
  if (splits.test.empty()) return {false, "gating: no test windows"};

  auto run = [&](const std::string& name) {
    train::TrainConfig c = cfg;
    c.rollout = model::ablation_config(name);
    auto s1 = train::train_stage1(scenes, splits.stage1_train,
                                  splits.stage1_val, c);
    auto s2 = train::train_stage2(s1.best, scenes[1], splits, 0.5, c);
    std::vector<std::vector<Vec2>> preds;
    for (const auto& w : splits.test)
      preds.push_back(model::rollout_test(s2.final.params, s2.final.artifacts,
                                          s2.final.bank, w, cfg.windows.t_obs,
                                          c.rollout)
                          .positions);
    auto report = eval::evaluate(s2.final, splits.test, {name}, cfg.windows);
    return std::make_tuple(std::move(s2.final), std::move(preds),
                           std::move(report));
  };

  auto [ck_full, pred_full, rep_full] = run("full");
  auto [ck_pm, pred_pm, rep_pm] = run("PM_rel");

  auto pf = ck_full.params.parameters();
  auto pp = ck_pm.params.parameters();
  for (std::size_t i = 0; i < pf.size(); ++i)
    if (!(pf[i]->value == pp[i]->value))
      return {false, "gating: trained parameter '" + pf[i]->name +
                         "' differs between full and PM_rel"};
  for (std::size_t i = 0; i < pred_full.size(); ++i)
    for (std::size_t t = 0; t < pred_full[i].size(); ++t)
      if (!(pred_full[i][t] == pred_pm[i][t]))
        return {false, "gating: prediction " + std::to_string(i) + " step " +
                           std::to_string(t) + " differs"};
  const auto& mf = rep_full.configs.at(0).overall;
  const auto& mp = rep_pm.configs.at(0).overall;
  if (mf.ade != mp.ade || mf.fde != mp.fde)
    return {false, "gating: metrics differ (ADE " + fmt(mf.ade) + " vs " +
                       fmt(mp.ade) + ")"};
  return {true, "gating exactness: " + std::to_string(pred_full.size()) +
                    " test windows, full == PM_rel bit for bit (params, "
                    "predictions, metrics)"};
}

// ------------------------------------------------------------ criterion 3

Outcome criterion3() {
  std::uint64_t random_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto ins = testutil::random_mining_instance(
        substream_seed(501, "acceptance-mining/" + std::to_string(i)));
    if (!testutil::mining_matches(ins)) ++random_mismatches;
  }
  std::uint64_t exhaustive_mismatches = 0;
  const std::uint64_t visited = testutil::enumerate_single_edge_instances(
      3, [&](const testutil::MiningInstance& ins) {
        if (!testutil::mining_matches(ins)) ++exhaustive_mismatches;
      });
  const bool pass = random_mismatches == 0 && exhaustive_mismatches == 0 &&
                    visited == 4826809ull;
  return {pass, "mining oracle: 1000 random instances (" +
                    std::to_string(random_mismatches) + " mismatches), " +
                    std::to_string(visited) + " exhaustive instances (" +
                    std::to_string(exhaustive_mismatches) + " mismatches)"};
}

// ------------------------------------------------------------ criterion 4

Outcome criterion4() {
  // One noise-free 20-step corridor window. Absolute-position inputs give
  // every step a distinct key, so the whole embed -> LSTM -> head path must
  // work; 500 Adam steps at the fixed lr then land well under the 5 cm bar
  // (turn dynamics are criterion 5's job, not this sanity check's).
  const auto scene = synth_scene(data::SynthLayout::Straight, "corridor", 3,
                                 0.0, substream_seed(17, "acc4"));
  const auto windows = data::extract_windows(scene);
  if (windows.empty()) return {false, "overfit: no window extracted"};
  const data::TrajectoryWindow& w = windows.front();

  model::ModelDims dims;
  dims.embed = 16;
  dims.hidden = 32;
  dims.subgrid_onehot = 4;
  model::ModelParams params(dims, 17);
  const auto art = grid::build_artifacts({}, scene.bounds, {2, 2}, 0.1, 3,
                                         scene.scene_id);
  const auto cfg = model::ablation_config("PM_abs");
  nn::Adam adam(params.parameters());
  auto bank = grid::SceneStateBank::from_classes(art.classes, dims.hidden);
  for (int step = 0; step < 500; ++step) {
    model::BatchOptions opt;
    opt.optimizer = &adam;
    opt.lr = 0.003;
    opt.clip = 10.0;
    model::run_batch(params, art, bank, {&w}, scene.frame_stride, cfg, opt);
  }

  // Training ADE: teacher-forced one-step-ahead predictions over the whole
  // window, i.e. the error the optimizer was actually driving down.
  auto frozen = grid::SceneStateBank::from_classes(art.classes, dims.hidden);
  frozen.freeze();
  std::vector<Vec2> pred, truth;
  const int len = static_cast<int>(w.positions.size());
  for (int t = 1; t < len; ++t) {
    pred.push_back(
        model::rollout_test(params, art, frozen, w, t, cfg).positions.front());
    truth.push_back(w.positions[t]);
  }
  const double ade = eval::ade(pred, truth);
  return {ade < 0.05, "overfit sanity: 500 Adam steps on one window, "
                      "training ADE " +
                          fmt(ade) + " m (need < 0.05)"};
}

// ------------------------------------------------------- criteria 5 and 6

struct AblationRun {
  // Per-seed metrics on the fixed fraction-0.5 test windows.
  PairMetrics full_turn, pm_turn;   // turning windows only
  PairMetrics full_all, frac0_all;  // all test windows, fraction 0.5 vs 0.0
  int turning_windows = 0;
  int test_windows = 0;
};

AblationRun ablation_run(std::uint64_t seed) {
  std::vector<data::SceneDataset> scenes;
  scenes.push_back(synth_scene(
      data::SynthLayout::Straight, "alpha", 300, 0.05,
      substream_seed(seed, "acc5/alpha")));
  scenes.push_back(synth_scene(
      data::SynthLayout::TJunction, "tj", 1000, 0.05,
      substream_seed(seed, "acc5/tj"), 0.85, 0.15));
  const data::SceneDataset& held = scenes[1];

  train::TrainConfig cfg;
  cfg.hidden = 32;
  cfg.embed = 16;
  cfg.stage1_epochs = 20;
  cfg.stage2_epochs = 10;
  cfg.seed = seed;
  const data::Splits splits =
      data::make_splits(scenes, "tj", 0.5, cfg.windows, cfg.seed);
  if (splits.test.empty())
    throw InvariantError("ablation: no test windows at fraction 0.5");

  AblationRun out;
  out.test_windows = static_cast<int>(splits.test.size());

  auto two_stage = [&](const std::string& name, double fraction,
                       const data::Splits& s) {
    train::TrainConfig c = cfg;
    c.rollout = model::ablation_config(name);
    auto s1 = train::train_stage1(scenes, splits.stage1_train,
                                  splits.stage1_val, c);
    return train::train_stage2(s1.best, held, s, fraction, c).final;
  };

  model::Checkpoint full = two_stage("full", 0.5, splits);
  model::Checkpoint pm = two_stage("PM_rel", 0.5, splits);
  const data::Splits splits0 =
      data::make_splits(scenes, "tj", 0.0, cfg.windows, cfg.seed);
  model::Checkpoint frac0 = two_stage("full", 0.0, splits0);

  const auto cfg_full = model::ablation_config("full");
  const auto cfg_pm = model::ablation_config("PM_rel");
  out.full_turn = score_windows(full, splits.test, cfg_full, cfg.windows.t_obs,
                                cfg.theta_lin, true, &out.turning_windows);
  out.pm_turn = score_windows(pm, splits.test, cfg_pm, cfg.windows.t_obs,
                              cfg.theta_lin, true, nullptr);
  out.full_all = score_windows(full, splits.test, cfg_full, cfg.windows.t_obs,
                               cfg.theta_lin, false, nullptr);
  out.frac0_all = score_windows(frac0, splits.test, cfg_full,
                                cfg.windows.t_obs, cfg.theta_lin, false,
                                nullptr);
  return out;
}

void criteria5and6(Outcome& c5, Outcome& c6) {
  std::vector<AblationRun> runs;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) runs.push_back(ablation_run(seed));

  const auto improvement = [](double base, double ours) {
    return (base - ours) / base;
  };
  const double i_ade =
      median3(improvement(runs[0].pm_turn.ade, runs[0].full_turn.ade),
              improvement(runs[1].pm_turn.ade, runs[1].full_turn.ade),
              improvement(runs[2].pm_turn.ade, runs[2].full_turn.ade));
  const double i_fde =
      median3(improvement(runs[0].pm_turn.fde, runs[0].full_turn.fde),
              improvement(runs[1].pm_turn.fde, runs[1].full_turn.fde),
              improvement(runs[2].pm_turn.fde, runs[2].full_turn.fde));
  c5.pass = i_ade >= 0.10 && i_fde >= 0.10;
  c5.detail = "ablation direction: full vs PM_rel on " +
              std::to_string(runs[0].turning_windows) + "/" +
              std::to_string(runs[0].test_windows) +
              " turning windows, median improvement ADE " + fmt(100 * i_ade) +
              "%, FDE " + fmt(100 * i_fde) + "% (need >= 10% both)";

  const double ade05 = median3(runs[0].full_all.ade, runs[1].full_all.ade,
                               runs[2].full_all.ade);
  const double ade00 = median3(runs[0].frac0_all.ade, runs[1].frac0_all.ade,
                               runs[2].frac0_all.ade);
  const double fde05 = median3(runs[0].full_all.fde, runs[1].full_all.fde,
                               runs[2].full_all.fde);
  const double fde00 = median3(runs[0].frac0_all.fde, runs[1].frac0_all.fde,
                               runs[2].frac0_all.fde);
  c6.pass = ade05 <= ade00 && fde05 <= fde00;
  c6.detail = "stage-2 data sweep: median ADE " + fmt(ade05) +
              " (fraction 0.5) vs " + fmt(ade00) + " (0.0), FDE " + fmt(fde05) +
              " vs " + fmt(fde00) + " (need 0.5 <= 0.0)";
}

// ------------------------------------------------------------ criterion 7

Outcome criterion7() {
  std::vector<Vec2> a, b, c;
  for (int i = 0; i < 12; ++i) {
    a.push_back({0.25 * i, 3.0 - 0.125 * i});
    b.push_back(a.back());
  }
  if (eval::ade(a, b) != 0.0 || eval::fde(a, b) != 0.0)
    return {false, "metrics: identical trajectories gave nonzero error"};

  for (const Vec2& p : a) c.push_back({p.x + 1.0, p.y});
  if (eval::ade(c, a) != 1.0)
    return {false, "metrics: 1 m offset gave ADE " + fmt(eval::ade(c, a))};

  std::vector<Vec2> d = a;
  d.back() = {a.back().x + 3.0, a.back().y + 4.0};
  if (eval::fde(d, a) != 5.0)
    return {false, "metrics: 3-4-5 final offset gave FDE " +
                       fmt(eval::fde(d, a))};

  // Constant-velocity data: the linear baseline must continue it exactly.
  std::vector<Vec2> obs;
  for (int i = 0; i < 8; ++i) obs.push_back({1.0 + 0.3 * i, 2.0 - 0.15 * i});
  std::vector<Vec2> truth;
  for (int i = 1; i <= 12; ++i)
    truth.push_back({1.0 + 0.3 * (7 + i), 2.0 - 0.15 * (7 + i)});
  const double base_ade = eval::ade(eval::linear_baseline(obs, 12), truth);
  if (base_ade > 1e-9)
    return {false, "metrics: linear baseline ADE " + fmt(base_ade) +
                       " on constant-velocity data"};
  return {true, "metric units: identical -> 0, 1 m offset -> ADE 1, 3-4-5 -> "
                "FDE 5, linear baseline ADE " +
                    fmt(base_ade)};
}

// ------------------------------------------------------------ criterion 8

int run_pipeline(const fs::path& dir, const std::string& out) {
  const std::string bin = std::string("\"") + GRIDPATH_CLI_BIN + "\"";
  const std::string common =
      " --set scenes=alpha,tj --set held_out=tj --set grid_n=4 --set grid_m=2"
      " --set hidden=8 --set embed=4 --set stage1_epochs=2"
      " --set stage2_epochs=1 --set batch_size=4"
      " --set eval_configs=full,PM_rel,Linear --out " + out;
  const std::vector<std::string> steps = {
      " synth --set synth_scene=alpha --set synth_layout=straight"
      " --set synth_peds=14 --out " + out,
      " synth --set synth_scene=tj --set synth_peds=40"
      " --set synth_branch_left=0.85 --set synth_branch_right=0.15"
      " --set synth_noise_sigma=0.05 --out " + out,
      " preprocess" + common, " train" + common, " eval" + common,
      " predict" + common, " plot" + common};
  for (const std::string& s : steps) {
    const std::string cmd = bin + s + " >\"" + (dir / ".out").string() +
                            "\" 2>\"" + (dir / ".err").string() + "\"";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code != 0) return code;
  }
  return 0;
}

Outcome criterion8() {
  const fs::path dir = fs::temp_directory_path() / "gridpath_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const std::string run : {"r1", "r2"}) {
    const int code = run_pipeline(dir, (dir / run).string());
    if (code != 0)
      return {false, "determinism: pipeline run '" + run +
                         "' exited with code " + std::to_string(code) +
                         " (see " + (dir / ".err").string() + ")"};
  }
  std::vector<std::string> files = {
      "checkpoints/stage1_best.json", "checkpoints/stage1_last.json",
      "checkpoints/stage2.json",      "metrics.json",
      "metrics.csv",                  "predictions.csv"};
  for (const auto& e : fs::directory_iterator(dir / "r1/plots"))
    files.push_back("plots/" + e.path().filename().string());
  int svgs = 0;
  for (const std::string& rel : files) {
    const fs::path p1 = dir / "r1" / rel;
    const fs::path p2 = dir / "r2" / rel;
    if (!fs::exists(p1) || !fs::exists(p2))
      return {false, "determinism: missing artifact " + rel};
    if (io::load_text(p1.string()) != io::load_text(p2.string()))
      return {false, "determinism: " + rel + " differs between runs"};
    if (rel.rfind("plots/", 0) == 0) ++svgs;
  }
  return {true, "determinism: two synth->preprocess->train->eval->predict->"
                "plot runs byte-identical (3 checkpoints, 2 reports, "
                "predictions, " +
                    std::to_string(svgs) + " SVGs)"};
}

}  // namespace

int main() {
  std::puts("acceptance: scene-coupled trajectory prediction");
  bool all = true;
  const auto timed = [&](int id, const std::function<Outcome()>& fn,
                         double budget) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = report(id, o, seconds_since(t0), budget) && all;
  };

  timed(1, criterion1, 60.0);
  timed(2, criterion2, 30.0);
  timed(3, criterion3, 0.0);
  timed(4, criterion4, 60.0);
  {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome c5, c6;
    try {
      criteria5and6(c5, c6);
    } catch (const std::exception& e) {
      c5 = {false, std::string("exception: ") + e.what()};
      c6 = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    all = report(5, c5, secs, 900.0) && all;
    all = report(6, c6, secs, 0.0) && all;
  }
  timed(7, criterion7, 0.0);
  timed(8, criterion8, 0.0);
  std::puts(
      "criterion 9: INFO  full-scale reproduction (H=128, 100+10 epochs) on "
      "real ETH/UCY data is documented in README.md; expected ETH-Hotel ADE "
      "0.3-0.8 m (paper: 0.36 m); informational only, never gated");
  std::puts(all ? "RESULT: PASS (8/8 gating criteria)"
                : "RESULT: FAIL");
  return all ? 0 : 1;
}
