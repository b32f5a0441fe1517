#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridpath/common.hpp"
#include "gridpath/data/windows.hpp"
#include "gridpath/eval/eval.hpp"
#include "gridpath/grid/artifacts.hpp"
#include "gridpath/grid/bank.hpp"
#include "gridpath/model/checkpoint.hpp"
#include "gridpath/model/model.hpp"
#include "gridpath/nn/rng.hpp"

using namespace gridpath;

namespace {

std::vector<Vec2> walk(std::uint64_t seed, int len) {
  nn::RngStream rng(seed);
  std::vector<Vec2> out{{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)}};
  for (int i = 1; i < len; ++i)
    out.push_back(out.back() +
                  Vec2{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)});
  return out;
}

std::vector<Vec2> shifted(const std::vector<Vec2>& v, Vec2 d) {
  std::vector<Vec2> out;
  for (const Vec2& p : v) out.push_back(p + d);
  return out;
}

std::vector<Vec2> rigid(const std::vector<Vec2>& v, double theta, Vec2 t) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<Vec2> out;
  for (const Vec2& p : v)
    out.push_back({c * p.x - s * p.y + t.x, s * p.x + c * p.y + t.y});
  return out;
}

std::vector<Vec2> doubled(const std::vector<Vec2>& v) {
  std::vector<Vec2> out;
  for (const Vec2& p : v) out.push_back(p * 2.0);
  return out;
}

}  // namespace

TEST_CASE("eval: displacement metrics are exact on the anchor cases") {
  const auto truth = walk(3, 12);

  CHECK(eval::ade(truth, truth) == 0.0);
  CHECK(eval::fde(truth, truth) == 0.0);

  // Uniform 1 m offset on every point.
  CHECK(eval::ade(shifted(truth, {1.0, 0.0}), truth) == 1.0);
  CHECK(eval::ade(shifted(truth, {0.0, -1.0}), truth) == 1.0);

  // Correct everywhere except a (3, 4) m final offset.
  auto pred = truth;
  pred.back() = pred.back() + Vec2{3.0, 4.0};
  CHECK(eval::fde(pred, truth) == 5.0);
  CHECK(eval::ade(pred, truth) == doctest::Approx(5.0 / 12.0));

  // FDE ignores every non-final point.
  auto scrambled = pred;
  for (std::size_t i = 0; i + 1 < scrambled.size(); ++i)
    scrambled[i] = scrambled[i] + Vec2{7.0, -2.0};
  CHECK(eval::fde(scrambled, truth) == eval::fde(pred, truth));

  CHECK_THROWS_AS(eval::ade(truth, walk(3, 11)), InvariantError);
  CHECK_THROWS_AS(eval::fde(walk(3, 11), truth), InvariantError);
  CHECK_THROWS_AS(eval::ade({}, {}), InvariantError);
}

TEST_CASE("eval: metrics are rigid-motion invariant and scale exactly") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pred = walk(seed, 12);
    const auto truth = walk(seed + 100, 12);
    const double a = eval::ade(pred, truth);
    const double f = eval::fde(pred, truth);

    const auto pr = rigid(pred, 0.7, {3.0, -2.0});
    const auto tr = rigid(truth, 0.7, {3.0, -2.0});
    CHECK(std::abs(eval::ade(pr, tr) - a) <= 1e-9);
    CHECK(std::abs(eval::fde(pr, tr) - f) <= 1e-9);

    // Doubling all coordinates doubles both metrics exactly: every distance
    // and the mean scale by a power of two.
    CHECK(eval::ade(doubled(pred), doubled(truth)) == 2.0 * a);
    CHECK(eval::fde(doubled(pred), doubled(truth)) == 2.0 * f);
  }
}

TEST_CASE("eval: linear baseline is the least-squares extrapolation") {
  // Constant velocity: exact continuation.
  std::vector<Vec2> obs;
  for (int t = 0; t < 8; ++t)
    obs.push_back({1.0 + 0.25 * t, -2.0 + 0.5 * t});
  const auto pred = eval::linear_baseline(obs, 12);
  REQUIRE(pred.size() == 12);
  std::vector<Vec2> truth;
  for (int t = 8; t < 20; ++t)
    truth.push_back({1.0 + 0.25 * t, -2.0 + 0.5 * t});
  CHECK(eval::ade(pred, truth) <= 1e-9);

  // Stationary: twelve copies of the mean point.
  const std::vector<Vec2> still(8, Vec2{4.0, 9.0});
  for (const Vec2& p : eval::linear_baseline(still, 12)) {
    CHECK(p.x == 4.0);
    CHECK(p.y == 9.0);
  }

  // Noisy affine data: the fit beats the stand-still predictor.
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    nn::RngStream rng(seed);
    std::vector<Vec2> noisy, future;
    const Vec2 v{rng.uniform(0.1, 0.4), rng.uniform(-0.3, 0.3)};
    for (int t = 0; t < 20; ++t) {
      Vec2 p{v.x * t + rng.normal() * 0.02, v.y * t + rng.normal() * 0.02};
      (t < 8 ? noisy : future).push_back(p);
    }
    const auto fit = eval::linear_baseline(noisy, 12);
    const std::vector<Vec2> frozen(12, noisy.back());
    CHECK(eval::ade(fit, future) <= eval::ade(frozen, future));
  }

  CHECK_THROWS_AS(eval::linear_baseline({{0, 0}}, 12), InvariantError);
  CHECK_THROWS_AS(eval::linear_baseline(obs, 0), InvariantError);
}

TEST_CASE("eval: NDE equals brute-force filter-then-average") {
  std::vector<eval::ScoredWindow> scored;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    eval::ScoredWindow w;
    w.scene_id = "s";
    w.ped_id = static_cast<long long>(seed);
    w.truth = walk(seed, 12);
    w.predicted = walk(seed + 500, 12);
    w.nonlinear = (seed % 3 == 0);
    scored.push_back(std::move(w));
  }

  const auto got = eval::nde(scored);
  REQUIRE(got.has_value());
  double sum = 0.0;
  int count = 0;
  for (const auto& w : scored)
    if (w.nonlinear) {
      sum += eval::ade(w.predicted, w.truth);
      ++count;
    }
  CHECK(*got == sum / count);

  // Singleton selection: NDE is that window's ADE.
  std::vector<eval::ScoredWindow> one{scored[2]};  // seed 3, nonlinear
  REQUIRE(one[0].nonlinear);
  CHECK(*eval::nde(one) == eval::ade(one[0].predicted, one[0].truth));

  // Empty selection: absent, not zero.
  for (auto& w : scored) w.nonlinear = false;
  CHECK_FALSE(eval::nde(scored).has_value());
}

namespace {

// A checkpoint over an all-linear 2x2 scene in the unit square, with a
// randomly initialized model and a frozen zero bank.
model::Checkpoint linear_checkpoint() {
  std::vector<data::Track> tracks;
  for (int j = 0; j < 3; ++j) {
    data::Track t;
    t.ped_id = j + 1;
    t.points.push_back({0.05, 0.1 + 0.2 * j});
    t.points.push_back({0.95, 0.1 + 0.2 * j});
    tracks.push_back(std::move(t));
  }
  model::Checkpoint ck;
  ck.artifacts = grid::build_artifacts(tracks, data::Bounds{0, 0, 1, 1},
                                       grid::GridSpec{2, 2}, 0.02, 1,
                                       "eval-scene");
  model::ModelDims dims;
  dims.embed = 4;
  dims.hidden = 8;
  dims.subgrid_onehot = 4;
  ck.params = model::ModelParams(dims, 77);
  ck.bank = grid::SceneStateBank::from_classes(ck.artifacts.classes, 8);
  ck.bank.freeze();
  ck.rollout = model::ablation_config("full");
  ck.init_seed = 77;
  return ck;
}

data::TrajectoryWindow eval_window(long long ped, Vec2 origin, Vec2 step,
                                   bool bend) {
  data::TrajectoryWindow w;
  w.scene_id = "eval-scene";
  w.ped_id = ped;
  w.start_frame = ped;
  Vec2 cur = origin;
  Vec2 d = step;
  for (int i = 0; i < 20; ++i) {
    w.positions.push_back(cur);
    if (bend && i == 13) d = Vec2{-d.y, d.x};  // right-angle turn mid-future
    cur = cur + d;
  }
  return w;
}

}  // namespace

TEST_CASE("eval: evaluate scores one identical window set per config") {
  auto ck = linear_checkpoint();
  std::vector<data::TrajectoryWindow> windows;
  for (int j = 0; j < 3; ++j)
    windows.push_back(
        eval_window(j + 1, {0.08, 0.15 + 0.2 * j}, {0.04, 0.002 * j}, false));
  for (int j = 0; j < 3; ++j)
    windows.push_back(
        eval_window(j + 10, {0.1 + 0.05 * j, 0.1}, {0.035, 0.01}, true));

  const data::WindowParams wp;
  const std::vector<std::string> names{"PM_rel", "full", "Linear"};
  auto report = eval::evaluate(ck, windows, names, wp);

  REQUIRE(report.configs.size() == 3);
  CHECK(report.theta_lin == ck.artifacts.theta_lin);
  CHECK(report.config_fingerprint == ck.artifacts.config_fingerprint);
  for (const auto& c : report.configs) {
    CHECK(c.overall.windows == 6);
    CHECK(c.overall.nonlinear_windows == 3);
    CHECK(c.overall.nonlinear_windows <= c.overall.windows);
    REQUIRE(c.scenes.size() == 1);
    CHECK(c.scenes[0].windows == 6);
    CHECK(c.overall.ade >= 0.0);
    CHECK(c.overall.fde >= 0.0);
    REQUIRE(c.overall.nde.has_value());
  }

  // The scene gate never fires on an all-linear scene, so the full row is
  // bit-identical to the PM_rel row.
  const auto& pm = report.configs[0];
  const auto& full = report.configs[1];
  CHECK(full.overall.ade == pm.overall.ade);
  CHECK(full.overall.fde == pm.overall.fde);
  CHECK(*full.overall.nde == *pm.overall.nde);

  // Independent recomputation of the PM_rel and Linear rows.
  {
    double ade_sum = 0.0, fde_sum = 0.0, lin_ade = 0.0;
    model::RolloutConfig cfg = model::ablation_config("PM_rel");
    for (const auto& w : windows) {
      const std::vector<Vec2> truth(w.positions.begin() + 8,
                                    w.positions.end());
      const auto pred =
          model::rollout_test(ck.params, ck.artifacts, ck.bank, w, 8, cfg);
      ade_sum += eval::ade(pred.positions, truth);
      fde_sum += eval::fde(pred.positions, truth);
      const std::vector<Vec2> obs(w.positions.begin(),
                                  w.positions.begin() + 8);
      lin_ade += eval::ade(eval::linear_baseline(obs, 12), truth);
    }
    CHECK(pm.overall.ade == doctest::Approx(ade_sum / 6).epsilon(1e-12));
    CHECK(pm.overall.fde == doctest::Approx(fde_sum / 6).epsilon(1e-12));
    CHECK(report.configs[2].overall.ade ==
          doctest::Approx(lin_ade / 6).epsilon(1e-12));
  }

  // Serialization is deterministic and well-formed.
  const auto json_a = eval::report_to_json(report);
  const auto report_b = eval::evaluate(ck, windows, names, wp);
  CHECK(eval::report_to_json(report_b) == json_a);
  const auto parsed = nlohmann::json::parse(json_a);
  CHECK(parsed.at("format") == "gridpath.metrics_report");
  CHECK(parsed.at("configs").size() == 3);

  const auto csv = eval::report_to_csv(report);
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 1 + 3 * 2);  // header + (scene + overall) per config

  // Contract violations.
  auto foreign = windows;
  foreign[0].scene_id = "elsewhere";
  CHECK_THROWS_AS(eval::evaluate(ck, foreign, names, wp), InvariantError);
  auto short_windows = windows;
  short_windows[0].positions.resize(15);
  CHECK_THROWS_AS(eval::evaluate(ck, short_windows, names, wp),
                  InvariantError);
  CHECK_THROWS_AS(eval::evaluate(ck, {}, names, wp), InvariantError);
  CHECK_THROWS_AS(eval::evaluate(ck, windows, {}, wp), InvariantError);
  CHECK_THROWS_AS(eval::evaluate(ck, windows, {"bogus"}, wp), ConfigError);
}
