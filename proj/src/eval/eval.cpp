#include "gridpath/eval/eval.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "gridpath/grid/artifacts.hpp"
#include "gridpath/io/format.hpp"
#include "gridpath/model/model.hpp"

namespace gridpath::eval {

namespace {

void check_pair(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth,
                const char* what) {
  if (pred.size() != truth.size())
    throw InvariantError(std::string(what) + ": length mismatch (" +
                         std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  if (pred.empty())
    throw InvariantError(std::string(what) + ": empty trajectories");
}

}  // namespace

double ade(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth) {
  check_pair(pred, truth, "ade");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    sum += distance(pred[i], truth[i]);
  return sum / static_cast<double>(pred.size());
}

double fde(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth) {
  check_pair(pred, truth, "fde");
  return distance(pred.back(), truth.back());
}

std::vector<Vec2> linear_baseline(const std::vector<Vec2>& observed,
                                  int steps) {
  if (observed.size() < 2)
    throw InvariantError("linear_baseline: needs at least 2 observations");
  if (steps < 1) throw InvariantError("linear_baseline: steps must be >= 1");
  const std::size_t k = observed.size();
  const double t_bar = 0.5 * static_cast<double>(k - 1);
  double x_bar = 0.0, y_bar = 0.0;
  for (const Vec2& p : observed) {
    x_bar += p.x;
    y_bar += p.y;
  }
  x_bar /= static_cast<double>(k);
  y_bar /= static_cast<double>(k);
  double stt = 0.0, stx = 0.0, sty = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    const double dt = static_cast<double>(t) - t_bar;
    stt += dt * dt;
    stx += dt * (observed[t].x - x_bar);
    sty += dt * (observed[t].y - y_bar);
  }
  const double bx = stt > 0.0 ? stx / stt : 0.0;
  const double by = stt > 0.0 ? sty / stt : 0.0;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(k - 1) + static_cast<double>(i);
    out.push_back({x_bar + bx * (t - t_bar), y_bar + by * (t - t_bar)});
  }
  return out;
}

std::optional<double> nde(const std::vector<ScoredWindow>& scored) {
  double sum = 0.0;
  int count = 0;
  for (const ScoredWindow& w : scored) {
    if (!w.nonlinear) continue;
    sum += ade(w.predicted, w.truth);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

namespace {

SceneMetrics summarize(const std::string& scene_id,
                       const std::vector<const ScoredWindow*>& ws) {
  SceneMetrics s;
  s.scene_id = scene_id;
  s.windows = static_cast<int>(ws.size());
  double ade_sum = 0.0, fde_sum = 0.0, nde_sum = 0.0;
  for (const ScoredWindow* w : ws) {
    const double a = ade(w->predicted, w->truth);
    ade_sum += a;
    fde_sum += fde(w->predicted, w->truth);
    if (w->nonlinear) {
      nde_sum += a;
      ++s.nonlinear_windows;
    }
  }
  s.ade = ade_sum / static_cast<double>(s.windows);
  s.fde = fde_sum / static_cast<double>(s.windows);
  if (s.nonlinear_windows > 0)
    s.nde = nde_sum / static_cast<double>(s.nonlinear_windows);
  return s;
}

ConfigMetrics aggregate(const std::string& config,
                        const std::vector<ScoredWindow>& scored) {
  // Group by scene (inputs arrive scene-sorted, but stay defensive).
  std::map<std::string, std::vector<const ScoredWindow*>> by_scene;
  for (const ScoredWindow& w : scored) by_scene[w.scene_id].push_back(&w);

  ConfigMetrics c;
  c.config = config;
  double ade_w = 0.0, fde_w = 0.0, nde_w = 0.0;
  int windows = 0, nonlinear = 0;
  for (const auto& [scene_id, ws] : by_scene) {
    SceneMetrics s = summarize(scene_id, ws);
    ade_w += s.ade * s.windows;
    fde_w += s.fde * s.windows;
    if (s.nde) nde_w += *s.nde * s.nonlinear_windows;
    windows += s.windows;
    nonlinear += s.nonlinear_windows;
    c.scenes.push_back(std::move(s));
  }
  c.overall.scene_id = "(all)";
  c.overall.windows = windows;
  c.overall.nonlinear_windows = nonlinear;
  c.overall.ade = ade_w / static_cast<double>(windows);
  c.overall.fde = fde_w / static_cast<double>(windows);
  if (nonlinear > 0) c.overall.nde = nde_w / static_cast<double>(nonlinear);
  return c;
}

}  // namespace

MetricsReport evaluate(model::Checkpoint& ck,
                       const std::vector<data::TrajectoryWindow>& windows,
                       const std::vector<std::string>& config_names,
                       const data::WindowParams& wp) {
  if (windows.empty()) throw InvariantError("evaluate: no windows");
  if (config_names.empty())
    throw InvariantError("evaluate: no configurations requested");

  std::vector<const data::TrajectoryWindow*> order;
  order.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.scene_id != ck.artifacts.scene_id)
      throw InvariantError("evaluate: window scene '" + w.scene_id +
                           "' does not match checkpoint scene '" +
                           ck.artifacts.scene_id + "'");
    if (static_cast<int>(w.positions.size()) != wp.length())
      throw InvariantError("evaluate: window length " +
                           std::to_string(w.positions.size()) +
                           " != t_obs + t_pred");
    order.push_back(&w);
  }
  std::sort(order.begin(), order.end(),
            [](const data::TrajectoryWindow* a,
               const data::TrajectoryWindow* b) {
              if (a->scene_id != b->scene_id) return a->scene_id < b->scene_id;
              if (a->ped_id != b->ped_id) return a->ped_id < b->ped_id;
              return a->start_frame < b->start_frame;
            });

  MetricsReport report;
  report.config_fingerprint = ck.artifacts.config_fingerprint;
  report.theta_lin = ck.artifacts.theta_lin;
  report.t_obs = wp.t_obs;
  report.t_pred = wp.t_pred;

  for (const std::string& name : config_names) {
    std::vector<ScoredWindow> scored;
    scored.reserve(order.size());
    for (const data::TrajectoryWindow* w : order) {
      ScoredWindow s;
      s.scene_id = w->scene_id;
      s.ped_id = w->ped_id;
      s.start_frame = w->start_frame;
      s.observed.assign(w->positions.begin(),
                        w->positions.begin() + wp.t_obs);
      s.truth.assign(w->positions.begin() + wp.t_obs, w->positions.end());
      s.nonlinear = !grid::is_linear_segment(s.truth, ck.artifacts.theta_lin);
      if (name == "Linear") {
        s.predicted = linear_baseline(s.observed, wp.t_pred);
      } else {
        model::RolloutConfig cfg = model::ablation_config(name);
        cfg.decode = model::DecodeMode::Mean;
        s.predicted = model::rollout_test(ck.params, ck.artifacts, ck.bank,
                                          *w, wp.t_obs, cfg)
                          .positions;
      }
      scored.push_back(std::move(s));
    }
    report.configs.push_back(aggregate(name, scored));
  }
  return report;
}

namespace {

nlohmann::ordered_json metrics_json(const SceneMetrics& s) {
  nlohmann::ordered_json j;
  j["scene_id"] = s.scene_id;
  j["windows"] = s.windows;
  j["nonlinear_windows"] = s.nonlinear_windows;
  j["ade"] = s.ade;
  j["fde"] = s.fde;
  if (s.nde)
    j["nde"] = *s.nde;
  else
    j["nde"] = nullptr;
  return j;
}

std::string csv_row(const std::string& config, const SceneMetrics& s) {
  std::string row = config + "," + s.scene_id + "," +
                    io::format_int(s.windows) + "," +
                    io::format_int(s.nonlinear_windows) + "," +
                    io::format_double(s.ade) + "," + io::format_double(s.fde) +
                    ",";
  if (s.nde) row += io::format_double(*s.nde);
  return row + "\n";
}

}  // namespace

std::string report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["format"] = "gridpath.metrics_report";
  j["version"] = 1;
  j["config_fingerprint"] = r.config_fingerprint;
  j["theta_lin"] = r.theta_lin;
  j["t_obs"] = r.t_obs;
  j["t_pred"] = r.t_pred;
  j["configs"] = nlohmann::ordered_json::array();
  for (const ConfigMetrics& c : r.configs) {
    nlohmann::ordered_json jc;
    jc["config"] = c.config;
    jc["overall"] = metrics_json(c.overall);
    jc["scenes"] = nlohmann::ordered_json::array();
    for (const SceneMetrics& s : c.scenes) jc["scenes"].push_back(metrics_json(s));
    j["configs"].push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const MetricsReport& r) {
  std::string out = "config,scene_id,windows,nonlinear_windows,ade,fde,nde\n";
  for (const ConfigMetrics& c : r.configs) {
    for (const SceneMetrics& s : c.scenes) out += csv_row(c.config, s);
    out += csv_row(c.config, c.overall);
  }
  return out;
}

}  // namespace gridpath::eval
