#include "gridpath/cli/run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "gridpath/common.hpp"
#include "gridpath/data/synth.hpp"
#include "gridpath/io/format.hpp"
#include "gridpath/model/checkpoint.hpp"

namespace gridpath::cli {

namespace {

struct KeySpec {
  const char* key;
  const char* fallback;
  bool semantic;  // participates in the config fingerprint
};

// Single source of truth for the configuration surface. Path-valued keys are
// non-semantic: they say where artifacts live, not what they contain.
const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      {"seed", "1", true},
      {"out_dir", "out", false},
      {"data_dir", "", false},
      {"scenes", "", true},
      {"held_out", "", true},
      {"stage2_fraction", "0.5", true},
      {"components", "full", true},
      {"decode", "mean", true},
      {"resume", "false", false},
      {"lr", "0.003", true},
      {"dropout", "0.2", true},
      {"clip", "10", true},
      {"hidden", "128", true},
      {"embed", "64", true},
      {"stage1_epochs", "100", true},
      {"stage2_epochs", "10", true},
      {"batch_size", "8", true},
      {"grid_n", "8", true},
      {"grid_m", "8", true},
      {"theta_lin", "0.1", true},
      {"p", "3", true},
      {"t_obs", "8", true},
      {"t_pred", "12", true},
      {"stride", "1", true},
      {"synth_layout", "tjunction", true},
      {"synth_scene", "synth", true},
      {"synth_branch_left", "0.5", true},
      {"synth_branch_right", "0.5", true},
      {"synth_peds", "100", true},
      {"synth_speed_min", "0.2", true},
      {"synth_speed_max", "0.3", true},
      {"synth_noise_sigma", "0", true},
      {"ingest_input", "", false},
      {"ingest_scene", "scene", true},
      {"ingest_columns", "frame,ped_id,x,y", true},
      {"ingest_delimiter", "space", true},
      {"eval_configs", "PM_abs,PM_rel,+SD,+HF_grid,+HF_subgrid,+SF,full,Linear",
       true},
      {"checkpoint", "", false},
      {"predictions", "", false},
      {"plot_limit", "8", true},
      {"sweep_sizes", "2,4,8", true},
  };
  return keys;
}

const KeySpec* find_key(const std::string& key) {
  for (const KeySpec& k : registry())
    if (key == k.key) return &k;
  return nullptr;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      const std::string t = trimmed(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const std::string t = trimmed(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

int to_int(const io::KvFile& kv, const std::string& key) {
  const long long v = kv.get_int(key);
  if (v < INT32_MIN || v > INT32_MAX)
    throw ConfigError("config: '" + key + "' out of range");
  return static_cast<int>(v);
}

}  // namespace

RunConfig config_from_entries(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  // Materialize defaults, then layer the caller's pairs on top.
  io::KvFile kv;
  for (const KeySpec& k : registry()) kv.set(k.key, k.fallback);
  for (const auto& [key, value] : entries) {
    if (find_key(key) == nullptr)
      throw ConfigError("config: unknown key '" + key + "'");
    kv.set(key, value);
  }

  RunConfig rc;
  rc.seed = kv.get_u64_or("seed", 1);
  rc.out_dir = kv.get("out_dir");
  if (rc.out_dir.empty()) throw ConfigError("config: 'out_dir' must be set");
  rc.data_dir = kv.get("data_dir");
  if (rc.data_dir.empty()) rc.data_dir = rc.out_dir + "/data";
  rc.scenes = split_list(kv.get("scenes"));
  {
    std::set<std::string> seen;
    for (const std::string& s : rc.scenes)
      if (!seen.insert(s).second)
        throw ConfigError("config: duplicate scene id '" + s + "'");
  }
  rc.held_out = kv.get("held_out");
  if (!rc.held_out.empty() &&
      std::find(rc.scenes.begin(), rc.scenes.end(), rc.held_out) ==
          rc.scenes.end() &&
      !rc.scenes.empty())
    throw ConfigError("config: held_out scene '" + rc.held_out +
                      "' is not listed in 'scenes'");
  rc.stage2_fraction = kv.get_double("stage2_fraction");
  if (!(rc.stage2_fraction >= 0.0 && rc.stage2_fraction <= 0.5))
    throw ConfigError("config: stage2_fraction must lie in [0, 0.5]");
  rc.components = kv.get("components");
  rc.decode = kv.get("decode");
  rc.resume = kv.get_bool_or("resume", false);

  rc.train.lr = kv.get_double("lr");
  rc.train.dropout = kv.get_double("dropout");
  rc.train.clip = kv.get_double("clip");
  rc.train.hidden = to_int(kv, "hidden");
  rc.train.embed = to_int(kv, "embed");
  rc.train.stage1_epochs = to_int(kv, "stage1_epochs");
  rc.train.stage2_epochs = to_int(kv, "stage2_epochs");
  rc.train.batch_size = to_int(kv, "batch_size");
  rc.train.seed = rc.seed;
  rc.train.grid.n = to_int(kv, "grid_n");
  rc.train.grid.m = to_int(kv, "grid_m");
  rc.train.theta_lin = kv.get_double("theta_lin");
  rc.train.p = to_int(kv, "p");
  rc.train.windows.t_obs = to_int(kv, "t_obs");
  rc.train.windows.t_pred = to_int(kv, "t_pred");
  rc.train.windows.stride = to_int(kv, "stride");
  rc.train.rollout = model::ablation_config(rc.components);
  rc.train.rollout.decode = model::parse_decode(rc.decode);
  rc.train.rollout.sample_seed = rc.seed;
  rc.train.validate();

  rc.synth_layout = kv.get("synth_layout");
  data::parse_layout(rc.synth_layout);  // reject unknown names early
  rc.synth_scene = kv.get("synth_scene");
  if (rc.synth_scene.empty())
    throw ConfigError("config: 'synth_scene' must be set");
  rc.synth_branch_left = kv.get_double("synth_branch_left");
  rc.synth_branch_right = kv.get_double("synth_branch_right");
  rc.synth_peds = to_int(kv, "synth_peds");
  rc.synth_speed_min = kv.get_double("synth_speed_min");
  rc.synth_speed_max = kv.get_double("synth_speed_max");
  rc.synth_noise_sigma = kv.get_double("synth_noise_sigma");

  rc.ingest_input = kv.get("ingest_input");
  rc.ingest_scene = kv.get("ingest_scene");
  rc.ingest_columns = kv.get("ingest_columns");
  rc.ingest_delimiter = kv.get("ingest_delimiter");

  rc.eval_configs = split_list(kv.get("eval_configs"));
  if (rc.eval_configs.empty())
    throw ConfigError("config: 'eval_configs' must name at least one config");
  rc.checkpoint = kv.get("checkpoint");
  rc.predictions = kv.get("predictions");
  rc.plot_limit = to_int(kv, "plot_limit");
  if (rc.plot_limit < 0)
    throw ConfigError("config: 'plot_limit' must be non-negative");
  rc.sweep_sizes.clear();
  for (const std::string& tok : split_list(kv.get("sweep_sizes")))
    rc.sweep_sizes.push_back(
        static_cast<int>(io::parse_int(tok, "config: sweep_sizes")));

  // Canonical resolved view: registry order, final values.
  io::KvFile semantic;
  rc.resolved.clear();
  for (const KeySpec& k : registry()) {
    const std::string& value = kv.get(k.key);
    rc.resolved.emplace_back(k.key, value);
    if (k.semantic) semantic.set(k.key, value);
  }
  rc.fingerprint = semantic.fingerprint();
  return rc;
}

RunConfig resolve_config(const CliOverrides& overrides) {
  std::vector<std::pair<std::string, std::string>> entries;
  if (!overrides.config_path.empty()) {
    const io::KvFile file = io::load_kv(overrides.config_path);
    entries = file.entries();
  }
  if (const char* env = std::getenv("GRIDPATH_OUT");
      env != nullptr && env[0] != '\0')
    entries.emplace_back("out_dir", env);
  if (!overrides.out_dir.empty()) entries.emplace_back("out_dir", overrides.out_dir);
  if (overrides.seed.has_value())
    entries.emplace_back("seed",
                         io::format_int(static_cast<long long>(*overrides.seed)));
  for (const std::string& s : overrides.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + s + "'");
    entries.emplace_back(trimmed(s.substr(0, eq)), trimmed(s.substr(eq + 1)));
  }
  return config_from_entries(entries);
}

std::string RunConfig::scene_csv_path(const std::string& id) const {
  return data_dir + "/" + id + ".csv";
}
std::string RunConfig::scene_meta_path(const std::string& id) const {
  return data_dir + "/" + id + ".meta";
}
std::string RunConfig::artifacts_path(const std::string& id) const {
  return out_dir + "/artifacts/" + id + ".json";
}
std::string RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? out_dir + "/checkpoints/stage2.json" : checkpoint;
}
std::string RunConfig::stage1_best_path() const {
  return out_dir + "/checkpoints/stage1_best.json";
}
std::string RunConfig::stage1_last_path() const {
  return out_dir + "/checkpoints/stage1_last.json";
}
std::string RunConfig::predictions_path() const {
  return predictions.empty() ? out_dir + "/predictions.csv" : predictions;
}
std::string RunConfig::plots_dir() const { return out_dir + "/plots"; }
std::string RunConfig::manifest_path(const std::string& command) const {
  return out_dir + "/" + command + "_manifest.json";
}

}  // namespace gridpath::cli
