#include "gridpath/model/model.hpp"

#include <algorithm>
#include <climits>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>

#include "gridpath/data/dataset.hpp"
#include "gridpath/grid/grid.hpp"
#include "gridpath/nn/tape.hpp"

namespace gridpath::model {

namespace {
constexpr double kInitScale = 0.1;
}

void RolloutConfig::validate() const {
  if (use_hf_subgrid && !use_hf_grid)
    throw ConfigError(
        "rollout config: the subgrid hard filter requires the grid hard "
        "filter");
  if (use_hf_grid && !use_scene)
    throw ConfigError("rollout config: hard filters require the scene module");
  if (use_sf && !use_scene)
    throw ConfigError(
        "rollout config: the soft filter requires the scene module");
}

const std::vector<std::string>& ablation_names() {
  static const std::vector<std::string> names{
      "PM_abs", "PM_rel", "+SD", "+HF_grid", "+HF_subgrid", "+SF", "full"};
  return names;
}

RolloutConfig ablation_config(const std::string& name) {
  RolloutConfig c;
  c.use_scene = false;
  c.use_hf_grid = false;
  c.use_hf_subgrid = false;
  c.use_sf = false;
  if (name == "PM_abs") {
    c.location = LocationMode::Absolute;
  } else if (name == "PM_rel") {
    // pedestrian movement only, relative inputs
  } else if (name == "+SD") {
    c.use_scene = true;
  } else if (name == "+HF_grid") {
    c.use_scene = true;
    c.use_hf_grid = true;
  } else if (name == "+HF_subgrid") {
    c.use_scene = true;
    c.use_hf_grid = true;
    c.use_hf_subgrid = true;
  } else if (name == "+SF") {
    c.use_scene = true;
    c.use_sf = true;
  } else if (name == "full") {
    c.use_scene = true;
    c.use_hf_grid = true;
    c.use_hf_subgrid = true;
    c.use_sf = true;
  } else {
    throw ConfigError("unknown ablation configuration: " + name);
  }
  c.validate();
  return c;
}

void ModelDims::validate() const {
  if (embed < 1 || hidden < 1 || subgrid_onehot < 1)
    throw ConfigError("model dims: embed, hidden and m^2 must be positive");
}

ModelParams::ModelParams(const ModelDims& d, std::uint64_t seed) : dims(d) {
  d.validate();
  const auto e = static_cast<std::size_t>(d.embed);
  const auto h = static_cast<std::size_t>(d.hidden);
  const auto s = static_cast<std::size_t>(d.scene_input());
  w_embed = nn::init_uniform("w_embed", {e, 2}, seed, kInitScale);
  ped = nn::LSTMCellParams("ped", e, h, seed, kInitScale);
  scene = nn::LSTMCellParams("scene", s, h, seed, kInitScale);
  w_soft = nn::init_uniform("w_soft", {h, s}, seed, kInitScale);
  b_soft = nn::init_zeros("b_soft", {h});
  w_out = nn::init_uniform("w_out", {5, h}, seed, kInitScale);
}

std::vector<nn::Parameter*> ModelParams::parameters() {
  std::vector<nn::Parameter*> out{&w_embed};
  for (auto* p : ped.params()) out.push_back(p);
  for (auto* p : scene.params()) out.push_back(p);
  out.push_back(&w_soft);
  out.push_back(&b_soft);
  out.push_back(&w_out);
  return out;
}

namespace {

struct ActiveWindow {
  const data::TrajectoryWindow* w = nullptr;
  nn::NodeId h = 0;
  nn::NodeId c = 0;
  std::vector<nn::NodeId> losses;
};

void check_shapes(const ModelParams& params,
                  const grid::GridArtifacts& artifacts,
                  const grid::SceneStateBank& bank) {
  params.dims.validate();
  artifacts.spec.validate();
  if (params.dims.subgrid_onehot != artifacts.spec.subgrid_count())
    throw InvariantError(
        "model: one-hot length does not match the grid's subgrid count");
  if (bank.cell_count() != artifacts.spec.cell_count())
    throw InvariantError("model: bank cell count does not match the grid");
  if (bank.hidden_dim() != params.dims.hidden)
    throw InvariantError("model: bank hidden size does not match the model");
}

grid::Located locate_clamped(Vec2 p, const grid::GridArtifacts& artifacts) {
  const Vec2 u = data::to_unit(data::clamp_to_bounds(p, artifacts.bounds),
                               artifacts.bounds);
  return grid::locate(u, artifacts.spec);
}

}  // namespace

double run_batch(ModelParams& params, const grid::GridArtifacts& artifacts,
                 grid::SceneStateBank& bank,
                 const std::vector<const data::TrajectoryWindow*>& windows,
                 long long frame_stride, const RolloutConfig& cfg,
                 const BatchOptions& opt) {
  cfg.validate();
  check_shapes(params, artifacts, bank);
  if (windows.empty()) throw InvariantError("run_batch: empty batch");
  if (bank.frozen())
    throw InvariantError("run_batch: the bank must not be frozen");
  if (frame_stride < 1)
    throw InvariantError("run_batch: frame_stride must be positive");
  for (const auto* w : windows) {
    if (w == nullptr || w->positions.size() < 2)
      throw InvariantError("run_batch: windows need at least two positions");
  }

  const auto hidden = static_cast<std::size_t>(params.dims.hidden);

  // Canonical orders, independent of the caller's vector order: processing
  // within a frame ascends by pedestrian, loss summation by window start.
  std::vector<std::size_t> frame_order(windows.size());
  std::iota(frame_order.begin(), frame_order.end(), std::size_t{0});
  std::sort(frame_order.begin(), frame_order.end(),
            [&](std::size_t a, std::size_t b) {
              const auto* wa = windows[a];
              const auto* wb = windows[b];
              if (wa->ped_id != wb->ped_id) return wa->ped_id < wb->ped_id;
              if (wa->start_frame != wb->start_frame)
                return wa->start_frame < wb->start_frame;
              return a < b;
            });
  std::vector<std::size_t> sum_order(windows.size());
  std::iota(sum_order.begin(), sum_order.end(), std::size_t{0});
  std::sort(sum_order.begin(), sum_order.end(),
            [&](std::size_t a, std::size_t b) {
              const auto* wa = windows[a];
              const auto* wb = windows[b];
              if (wa->start_frame != wb->start_frame)
                return wa->start_frame < wb->start_frame;
              if (wa->ped_id != wb->ped_id) return wa->ped_id < wb->ped_id;
              return a < b;
            });

  nn::Tape tape;
  const nn::NodeId zero_state =
      tape.constant(nn::Tensor::zeros({hidden}));

  std::vector<ActiveWindow> active(windows.size());
  long long frame_lo = LLONG_MAX;
  long long frame_hi = LLONG_MIN;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    active[i].w = windows[i];
    active[i].h = zero_state;
    active[i].c = zero_state;
    const long long start = windows[i]->start_frame;
    const auto steps =
        static_cast<long long>(windows[i]->positions.size()) - 1;
    frame_lo = std::min(frame_lo, start);
    frame_hi = std::max(frame_hi, start + (steps - 1) * frame_stride);
  }

  // In-batch scene states; cells enter the graph as detached constants on
  // first touch and only written cells flush back.
  std::map<int, nn::LSTMState> overlay;
  std::set<int> written;
  auto scene_state = [&](int cell) -> nn::LSTMState {
    auto it = overlay.find(cell);
    if (it == overlay.end()) {
      const nn::LSTMState fresh{tape.constant(bank.h(cell)),
                                tape.constant(bank.c(cell))};
      it = overlay.emplace(cell, fresh).first;
    }
    return it->second;
  };

  for (long long frame = frame_lo; frame <= frame_hi; frame += frame_stride) {
    for (const std::size_t idx : frame_order) {
      ActiveWindow& a = active[idx];
      const auto& pos = a.w->positions;
      const long long rel = frame - a.w->start_frame;
      if (rel < 0 || rel % frame_stride != 0) continue;
      const auto s = static_cast<std::size_t>(rel / frame_stride);
      if (s + 1 >= pos.size()) continue;

      // 1. Pedestrian LSTM step on the embedded input.
      Vec2 input{0.0, 0.0};
      if (cfg.location == LocationMode::Absolute) {
        input = pos[s];
      } else if (s > 0) {
        input = pos[s] - pos[s - 1];
      }
      const nn::NodeId x =
          tape.constant(nn::Tensor::vec({input.x, input.y}));
      const nn::NodeId emb = nn::tape_embed_relu(tape, params.w_embed, x);
      const nn::LSTMState ped =
          nn::tape_lstm_step(tape, params.ped, emb, a.h, a.c);
      a.c = ped.c;

      const grid::Located loc = locate_clamped(pos[s], artifacts);

      // 2-3. Hard filter, then soft filter and fusion.
      nn::NodeId h_fused = ped.h;
      if (cfg.use_scene &&
          artifacts.read_allowed(loc.cell, loc.subgrid, cfg.use_hf_grid,
                                 cfg.use_hf_subgrid)) {
        const nn::LSTMState g = scene_state(loc.cell);
        nn::NodeId filtered = g.h;
        if (cfg.use_sf) {
          const nn::NodeId v =
              tape.constant(grid::one_hot(loc.subgrid, artifacts.spec));
          const nn::NodeId gate = nn::tape_linear_sigmoid(
              tape, params.w_soft, params.b_soft, tape.concat({v, ped.h}));
          filtered = tape.mul(gate, g.h);
        }
        h_fused = tape.add(ped.h, filtered);
      }
      a.h = h_fused;  // the fused state drives the next recurrence step

      // 4. Loss term against the true next displacement.
      nn::NodeId head_in = h_fused;
      if (opt.mode == nn::Mode::Train && opt.dropout_rate > 0.0) {
        if (opt.dropout_rng == nullptr)
          throw InvariantError("run_batch: dropout requires an RNG stream");
        head_in = tape.mul(
            h_fused, tape.constant(nn::make_dropout_mask(
                         hidden, opt.dropout_rate, *opt.dropout_rng)));
      }
      const nn::NodeId raw = nn::tape_linear(tape, params.w_out, head_in);
      a.losses.push_back(tape.bvn_nll(raw, pos[s + 1] - pos[s]));

      // 5. Scene update from the fused state, gated by cell class alone.
      if (cfg.use_scene && artifacts.write_allowed(loc.cell)) {
        const nn::LSTMState g = scene_state(loc.cell);
        const nn::NodeId v =
            tape.constant(grid::one_hot(loc.subgrid, artifacts.spec));
        const nn::LSTMState updated = nn::tape_lstm_step(
            tape, params.scene, tape.concat({v, h_fused}), g.h, g.c);
        overlay[loc.cell] = updated;
        written.insert(loc.cell);
      }
    }
  }

  std::vector<nn::NodeId> per_window;
  per_window.reserve(windows.size());
  for (const std::size_t idx : sum_order)
    per_window.push_back(tape.add_many(active[idx].losses));
  const nn::NodeId loss = tape.scale(
      tape.add_many(per_window), 1.0 / static_cast<double>(windows.size()));

  for (const int cell : written)
    bank.set(cell, tape.val(overlay[cell].h), tape.val(overlay[cell].c));

  if (opt.optimizer != nullptr) {
    nn::zero_grads(opt.optimizer->params());
    tape.backward(loss);
    nn::clip_global_norm(opt.optimizer->params(), opt.clip);
    opt.optimizer->step(opt.lr);
  } else if (opt.compute_gradients) {
    tape.backward(loss);
  }
  return tape.val(loss)[0];
}

Prediction rollout_test(ModelParams& params,
                        const grid::GridArtifacts& artifacts,
                        const grid::SceneStateBank& bank,
                        const data::TrajectoryWindow& window, int t_obs,
                        const RolloutConfig& cfg) {
  cfg.validate();
  check_shapes(params, artifacts, bank);
  if (!bank.frozen())
    throw InvariantError("rollout_test: the bank must be frozen");
  const auto len = window.positions.size();
  if (t_obs < 1 || static_cast<std::size_t>(t_obs) >= len)
    throw InvariantError(
        "rollout_test: t_obs must leave at least one step to predict");

  const auto hidden = static_cast<std::size_t>(params.dims.hidden);
  nn::Tensor h = nn::Tensor::zeros({hidden});
  nn::Tensor c = nn::Tensor::zeros({hidden});

  std::optional<nn::RngStream> sampler;
  if (cfg.decode == DecodeMode::Sample) {
    sampler.emplace(substream_seed(
        cfg.sample_seed, "sample/" + window.scene_id + "/" +
                             std::to_string(window.ped_id) + "/" +
                             std::to_string(window.start_frame)));
  }

  Prediction out;
  Vec2 cur = window.positions[0];
  Vec2 prev = cur;
  for (std::size_t s = 0; s + 1 < len; ++s) {
    Vec2 input{0.0, 0.0};
    if (cfg.location == LocationMode::Absolute) {
      input = cur;
    } else if (s > 0) {
      input = cur - prev;
    }
    auto [h_next, c_next] = nn::lstm_step(
        params.ped, nn::embed_relu(params.w_embed,
                                   nn::Tensor::vec({input.x, input.y})),
        h, c);
    h = std::move(h_next);
    c = std::move(c_next);

    const grid::Located loc = locate_clamped(cur, artifacts);
    if (cfg.use_scene &&
        artifacts.read_allowed(loc.cell, loc.subgrid, cfg.use_hf_grid,
                               cfg.use_hf_subgrid)) {
      const nn::Tensor& h_g = bank.h(loc.cell);
      nn::Tensor filtered = h_g;
      if (cfg.use_sf) {
        const nn::Tensor v = grid::one_hot(loc.subgrid, artifacts.spec);
        nn::Tensor sf_in = nn::Tensor::zeros({v.size() + hidden});
        for (std::size_t i = 0; i < v.size(); ++i) sf_in[i] = v[i];
        for (std::size_t i = 0; i < hidden; ++i) sf_in[v.size() + i] = h[i];
        const nn::Tensor gate =
            nn::linear_sigmoid(params.w_soft, params.b_soft, sf_in);
        for (std::size_t i = 0; i < hidden; ++i) filtered[i] = gate[i] * h_g[i];
      }
      for (std::size_t i = 0; i < hidden; ++i) h[i] = h[i] + filtered[i];
    }

    if (s + 1 < static_cast<std::size_t>(t_obs)) {
      prev = cur;
      cur = window.positions[s + 1];
    } else {
      const nn::Gauss2D g = nn::gaussian_head(params.w_out, h);
      const Vec2 d = cfg.decode == DecodeMode::Mean
                         ? nn::bvn_mean(g)
                         : nn::bvn_sample(g, *sampler);
      prev = cur;
      cur = cur + d;
      out.positions.push_back(cur);
      out.gaussians.push_back(g);
    }
  }
  return out;
}

}  // namespace gridpath::model
