#pragma once

#include <ostream>

#include "run_config.hpp"

namespace weldgeom::cli {

int cmd_fit_mlr(const RunConfig& config, std::ostream& out);
int cmd_train_ann(const RunConfig& config, std::ostream& out);
int cmd_tune(const RunConfig& config, std::ostream& out);
int cmd_explain(const RunConfig& config, std::ostream& out);
int cmd_cv(const RunConfig& config, std::ostream& out);
int cmd_report(const RunConfig& config, std::ostream& out);

// Parses argv, writes the manifest and dispatches. Returns the exit code;
// errors are reported on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace weldgeom::cli
