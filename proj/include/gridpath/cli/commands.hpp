#pragma once

#include "gridpath/cli/run_config.hpp"

namespace gridpath::cli {

// One function per subcommand. Each loads its inputs from the paths in the
// RunConfig, writes its outputs plus a `<command>_manifest.json`, and prints
// a one-line summary to stdout. Errors surface as ConfigError (exit 1),
// DataError (exit 2) or InvariantError (exit 3).
void cmd_ingest(const RunConfig& rc);
void cmd_preprocess(const RunConfig& rc);
void cmd_synth(const RunConfig& rc);
void cmd_train(const RunConfig& rc);
void cmd_predict(const RunConfig& rc);
void cmd_eval(const RunConfig& rc);
void cmd_sweep(const RunConfig& rc);
void cmd_plot(const RunConfig& rc);

}  // namespace gridpath::cli
