#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridpath/cli/commands.hpp"
#include "gridpath/cli/run_config.hpp"
#include "gridpath/common.hpp"

namespace {

using gridpath::cli::CliOverrides;
using gridpath::cli::RunConfig;

struct SubSpec {
  const char* name;
  const char* desc;
  void (*fn)(const RunConfig&);
};

// Mutable storage CLI11 binds to while parsing one subcommand.
struct SubState {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
};

const std::vector<SubSpec>& subcommands() {
  using namespace gridpath::cli;
  static const std::vector<SubSpec> subs = {
      {"ingest", "Convert raw annotations into the canonical scene CSV",
       cmd_ingest},
      {"preprocess",
       "Classify grid cells and mine common subgrid paths into artifacts JSON",
       cmd_preprocess},
      {"synth", "Generate a synthetic scene (straight, tjunction or door)",
       cmd_synth},
      {"train", "Run the two-stage training protocol and save checkpoints",
       cmd_train},
      {"predict", "Roll out test-window predictions into a CSV", cmd_predict},
      {"eval", "Score a checkpoint under ablation configs plus the linear "
               "baseline",
       cmd_eval},
      {"sweep", "Ablate grid sizes: vary subgrids m, then cells n", cmd_sweep},
      {"plot", "Render SVG overlays of observed/true/predicted trajectories",
       cmd_plot},
  };
  return subs;
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "Trajectory prediction with a pedestrian LSTM coupled to grid-cell "
      "scene memory"};
  app.require_subcommand(1);

  for (const SubSpec& spec : subcommands()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.desc);
    auto state = std::make_shared<SubState>();
    sub->add_option("--config", state->config_path,
                    "run configuration file (key = value lines)");
    sub->add_option("--seed", state->seed, "override the root seed");
    sub->add_option("--out", state->out_dir, "override the output directory");
    sub->add_option("--set", state->sets,
                    "override one config key as key=value (repeatable)");
    sub->callback([spec, state, sub] {
      CliOverrides o;
      o.config_path = state->config_path;
      o.out_dir = state->out_dir;
      o.sets = state->sets;
      if (sub->count("--seed") > 0) o.seed = state->seed;
      const RunConfig rc = gridpath::cli::resolve_config(o);
      spec.fn(rc);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's exit codes to the documented contract: help is
    // success, any usage problem is exit code 1.
    return app.exit(e) == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gridpath;
  try {
    return run_cli(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
