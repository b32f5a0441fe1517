#include "gridpath/model/checkpoint.hpp"

#include <cstddef>
#include <utility>

#include <json.hpp>

#include "gridpath/io/kv.hpp"

namespace gridpath::model {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kFormat = "gridpath.checkpoint";
constexpr int kVersion = 1;

ordered_json tensor_values(const nn::Tensor& t) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < t.size(); ++i) arr.push_back(t[i]);
  return arr;
}

void fill_tensor(nn::Tensor& t, const ordered_json& arr,
                 const std::string& what) {
  if (!arr.is_array() || arr.size() != t.size())
    throw DataError("checkpoint: " + what + ": expected " +
                    std::to_string(t.size()) + " values");
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = arr[i].get<double>();
}

}  // namespace

std::string to_string(LocationMode m) {
  return m == LocationMode::Relative ? "relative" : "absolute";
}

std::string to_string(DecodeMode m) {
  return m == DecodeMode::Mean ? "mean" : "sample";
}

LocationMode parse_location(const std::string& name) {
  if (name == "relative") return LocationMode::Relative;
  if (name == "absolute") return LocationMode::Absolute;
  throw ConfigError("unknown location mode: " + name);
}

DecodeMode parse_decode(const std::string& name) {
  if (name == "mean") return DecodeMode::Mean;
  if (name == "sample") return DecodeMode::Sample;
  throw ConfigError("unknown decode mode: " + name);
}

void capture_adam(Checkpoint& ck, nn::Adam& opt) {
  ck.has_adam = true;
  ck.adam_step_count = opt.step_count();
  ck.adam_m = opt.first_moments();
  ck.adam_v = opt.second_moments();
}

void restore_adam(const Checkpoint& ck, nn::Adam& opt) {
  if (!ck.has_adam)
    throw InvariantError("checkpoint carries no optimizer state");
  auto& m = opt.first_moments();
  auto& v = opt.second_moments();
  if (ck.adam_m.size() != m.size() || ck.adam_v.size() != v.size())
    throw InvariantError("checkpoint optimizer state has the wrong arity");
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!ck.adam_m[i].same_shape(m[i]) || !ck.adam_v[i].same_shape(v[i]))
      throw InvariantError("checkpoint optimizer state shape mismatch");
  }
  m = ck.adam_m;
  v = ck.adam_v;
  opt.set_step_count(ck.adam_step_count);
}

std::string checkpoint_to_json(Checkpoint& ck) {
  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["dims"] = {{"embed", ck.params.dims.embed},
               {"hidden", ck.params.dims.hidden},
               {"subgrid_onehot", ck.params.dims.subgrid_onehot}};
  j["init_seed"] = ck.init_seed;
  j["rollout"] = {{"use_scene", ck.rollout.use_scene},
                  {"use_hf_grid", ck.rollout.use_hf_grid},
                  {"use_hf_subgrid", ck.rollout.use_hf_subgrid},
                  {"use_sf", ck.rollout.use_sf},
                  {"location", to_string(ck.rollout.location)},
                  {"decode", to_string(ck.rollout.decode)},
                  {"sample_seed", ck.rollout.sample_seed}};
  j["train_state"] = {{"stage", ck.train.stage},
                      {"epochs_completed", ck.train.epochs_completed},
                      {"best_val_nll", ck.train.best_val_nll},
                      {"best_val_epoch", ck.train.best_val_epoch}};

  ordered_json params = ordered_json::array();
  for (nn::Parameter* p : ck.params.parameters()) {
    ordered_json entry;
    entry["name"] = p->name;
    ordered_json shape = ordered_json::array();
    for (std::size_t d : p->value.shape()) shape.push_back(d);
    entry["shape"] = std::move(shape);
    entry["values"] = tensor_values(p->value);
    params.push_back(std::move(entry));
  }
  j["params"] = std::move(params);

  if (ck.has_adam) {
    ordered_json adam;
    adam["step_count"] = ck.adam_step_count;
    ordered_json m = ordered_json::array();
    for (const auto& t : ck.adam_m) m.push_back(tensor_values(t));
    ordered_json v = ordered_json::array();
    for (const auto& t : ck.adam_v) v.push_back(tensor_values(t));
    adam["m"] = std::move(m);
    adam["v"] = std::move(v);
    j["adam"] = std::move(adam);
  } else {
    j["adam"] = nullptr;
  }

  ordered_json bank;
  bank["frozen"] = ck.bank.frozen();
  ordered_json bh = ordered_json::array();
  ordered_json bc = ordered_json::array();
  for (int cell = 0; cell < ck.bank.cell_count(); ++cell) {
    bh.push_back(tensor_values(ck.bank.h(cell)));
    bc.push_back(tensor_values(ck.bank.c(cell)));
  }
  bank["h"] = std::move(bh);
  bank["c"] = std::move(bc);
  j["bank"] = std::move(bank);

  j["grid_artifacts"] = ordered_json::parse(artifacts_to_json(ck.artifacts));
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw DataError("checkpoint: unrecognized format field");
    if (j.at("version").get<int>() != kVersion)
      throw DataError("checkpoint: unsupported version");

    Checkpoint ck;
    const auto& jd = j.at("dims");
    ModelDims dims;
    dims.embed = jd.at("embed").get<int>();
    dims.hidden = jd.at("hidden").get<int>();
    dims.subgrid_onehot = jd.at("subgrid_onehot").get<int>();
    ck.init_seed = j.at("init_seed").get<std::uint64_t>();
    ck.params = ModelParams(dims, ck.init_seed);

    const auto& jr = j.at("rollout");
    ck.rollout.use_scene = jr.at("use_scene").get<bool>();
    ck.rollout.use_hf_grid = jr.at("use_hf_grid").get<bool>();
    ck.rollout.use_hf_subgrid = jr.at("use_hf_subgrid").get<bool>();
    ck.rollout.use_sf = jr.at("use_sf").get<bool>();
    ck.rollout.location = parse_location(jr.at("location").get<std::string>());
    ck.rollout.decode = parse_decode(jr.at("decode").get<std::string>());
    ck.rollout.sample_seed = jr.at("sample_seed").get<std::uint64_t>();
    ck.rollout.validate();

    const auto& jt = j.at("train_state");
    ck.train.stage = jt.at("stage").get<int>();
    ck.train.epochs_completed = jt.at("epochs_completed").get<int>();
    ck.train.best_val_nll = jt.at("best_val_nll").get<double>();
    ck.train.best_val_epoch = jt.at("best_val_epoch").get<int>();

    const auto& jp = j.at("params");
    auto live = ck.params.parameters();
    if (jp.size() != live.size())
      throw DataError("checkpoint: unexpected parameter count");
    for (std::size_t i = 0; i < live.size(); ++i) {
      const auto& entry = jp[i];
      if (entry.at("name").get<std::string>() != live[i]->name)
        throw DataError("checkpoint: parameter order mismatch at index " +
                        std::to_string(i));
      std::vector<std::size_t> shape;
      for (const auto& d : entry.at("shape")) shape.push_back(d.get<std::size_t>());
      if (shape != live[i]->value.shape())
        throw DataError("checkpoint: shape mismatch for " + live[i]->name);
      fill_tensor(live[i]->value, entry.at("values"), live[i]->name);
    }

    const auto& ja = j.at("adam");
    if (!ja.is_null()) {
      ck.has_adam = true;
      ck.adam_step_count = ja.at("step_count").get<std::uint64_t>();
      const auto& jm = ja.at("m");
      const auto& jv = ja.at("v");
      if (jm.size() != live.size() || jv.size() != live.size())
        throw DataError("checkpoint: optimizer moment count mismatch");
      for (std::size_t i = 0; i < live.size(); ++i) {
        nn::Tensor m = nn::Tensor::zeros(live[i]->value.shape());
        nn::Tensor v = nn::Tensor::zeros(live[i]->value.shape());
        fill_tensor(m, jm[i], live[i]->name + " (adam m)");
        fill_tensor(v, jv[i], live[i]->name + " (adam v)");
        ck.adam_m.push_back(std::move(m));
        ck.adam_v.push_back(std::move(v));
      }
    }

    ck.artifacts = grid::artifacts_from_json(j.at("grid_artifacts").dump());
    if (ck.artifacts.spec.subgrid_count() != dims.subgrid_onehot)
      throw DataError(
          "checkpoint: grid subgrid count does not match model dims");

    const auto& jb = j.at("bank");
    const auto cells = static_cast<std::size_t>(
        ck.artifacts.spec.cell_count());
    const auto& bh = jb.at("h");
    const auto& bc = jb.at("c");
    if (bh.size() != cells || bc.size() != cells)
      throw DataError("checkpoint: bank cell count mismatch");
    ck.bank = grid::SceneStateBank::from_classes(ck.artifacts.classes,
                                                 dims.hidden);
    const auto hidden = static_cast<std::size_t>(dims.hidden);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      nn::Tensor h = nn::Tensor::zeros({hidden});
      nn::Tensor c = nn::Tensor::zeros({hidden});
      fill_tensor(h, bh[cell], "bank h[" + std::to_string(cell) + "]");
      fill_tensor(c, bc[cell], "bank c[" + std::to_string(cell) + "]");
      const bool nonzero = !(h == nn::Tensor::zeros({hidden})) ||
                           !(c == nn::Tensor::zeros({hidden}));
      if (nonzero) {
        if (!ck.bank.updatable(static_cast<int>(cell)))
          throw DataError("checkpoint: state stored for a linear cell");
        ck.bank.set(static_cast<int>(cell), std::move(h), std::move(c));
      }
    }
    if (jb.at("frozen").get<bool>()) ck.bank.freeze();
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: malformed document: ") +
                    e.what());
  }
}

void save_checkpoint(const std::string& path, Checkpoint& ck) {
  io::save_text(path, checkpoint_to_json(ck));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(io::load_text(path));
}

}  // namespace gridpath::model
