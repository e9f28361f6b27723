#include "run_config.hpp"

#include <charconv>

#include "CLI11.hpp"
#include "weldgeom/csv.hpp"
#include "weldgeom/error.hpp"

namespace weldgeom::cli {

std::uint64_t RunConfig::require_seed() const {
  if (!seed) {
    throw ConfigError(command + " needs an explicit --seed (or `seed = N` in the config file)");
  }
  return *seed;
}

std::vector<std::size_t> RunConfig::hidden_sizes() const {
  std::vector<std::size_t> sizes;
  if (hidden.empty()) return sizes;
  for (const auto& cell : csv::split(hidden)) {
    const auto s = csv::trim(cell);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
      throw ConfigError("hidden: expected comma-separated positive sizes, got '" + hidden + "'");
    }
    sizes.push_back(v);
  }
  return sizes;
}

void add_options(CLI::App& app, RunConfig& c) {
  app.option_defaults()->always_capture_default();
  app.add_option("--data-dir", c.data_dir, "Directory holding train.csv and test.csv");
  app.add_option("--out-dir", c.out_dir, "Output directory");
  app.add_option("--scheme", c.scheme, "linear|interactive|full (fit-mlr also: all)");
  app.add_option("--response", c.response, "width|penetration|throat|leg|all");
  app.add_option("--feature-order", c.feature_order,
                 "expand-then-scale|scale-then-expand");
  app.add_flag("--scale-targets", c.scale_targets, "Min-max scale the responses too");
  app.add_flag("--published-coefficients", c.published_coefficients,
               "fit-mlr: evaluate the published equations only");
  app.add_option("--seed", c.seed, "Master seed (required by randomized commands)");
  app.add_option("--epochs", c.epochs, "Training epochs");
  app.add_option("--learning-rate,--lr", c.learning_rate, "Adam learning rate");
  app.add_option("--validation-fraction", c.validation_fraction,
                 "Share of training rows held out for validation");
  app.add_option("--head", c.head, "joint|per-response");
  app.add_option("--hidden", c.hidden, "Hidden sizes, e.g. 34,32 (default: preset)");
  app.add_option("--dropout", c.dropout, "Dropout rate (default: preset)");
  app.add_option("--trials", c.trials, "tune: number of trials");
  app.add_option("--executions", c.executions, "tune: executions per trial");
  app.add_option("--family", c.family, "cv: mlr|ann");
  app.add_option("--splits", c.splits, "cv: folds per repeat");
  app.add_option("--repeats", c.repeats, "cv: repeats");
  app.add_option("--model", c.model, "explain: serialized model file");
  app.add_option("--source", c.source, "explain without --model: mlr-refit|mlr-published");
  app.add_option("--instances", c.instances, "explain: train|test|all");
  app.add_option("--background", c.background, "explain: train|test|all");
  app.add_option("--shap-mode", c.shap_mode, "explain: exact|sampling");
  app.add_option("--permutations", c.permutations, "explain: permutations (sampling)");
  app.add_flag("--check-closed-form", c.check_closed_form,
               "explain: compare against the linear closed form");
  app.add_option("--r2-tolerance", c.r2_tolerance, "report: R^2 tolerance");
  app.add_option("--rmse-tolerance", c.rmse_tolerance, "report: RMSE tolerance (mm)");
  app.add_option("--max-error-tolerance", c.max_error_tolerance,
                 "report: max %error tolerance (percentage points)");
  app.add_option("--threads", c.threads, "Worker threads");
  app.set_config("--config", "", "Flat key = value config file; flags override it")
      ->check(CLI::ExistingFile);
}

}  // namespace weldgeom::cli
