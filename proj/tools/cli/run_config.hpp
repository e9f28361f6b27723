#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace weldgeom::cli {

// Everything a command reads. Populated from flags and an optional flat
// `key = value` file (flags win); the resolved values are written to the run
// manifest.
struct RunConfig {
  std::string command;

  std::filesystem::path data_dir = "data";
  std::filesystem::path out_dir = "out";
  std::filesystem::path config_file;

  std::string scheme;  // empty: command default
  std::string response = "all";
  std::string feature_order = "expand-then-scale";
  bool scale_targets = false;
  bool published_coefficients = false;

  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;  // train-ann/cv: 2500, tune: 250
  double learning_rate = 0.01;
  double validation_fraction = 0.1;
  std::string head = "joint";
  std::string hidden;  // "34,32"; empty: preset
  std::optional<double> dropout;

  int trials = 10;
  int executions = 2;

  std::string family = "mlr";
  int splits = 10;
  int repeats = 5;

  std::filesystem::path model;
  std::string source = "mlr-refit";
  std::string instances = "test";
  std::string background = "train";
  std::string shap_mode = "exact";
  int permutations = 256;
  bool check_closed_form = false;

  double r2_tolerance = 0.05;
  double rmse_tolerance = 0.02;
  double max_error_tolerance = 2.0;

  unsigned threads = 1;

  std::uint64_t require_seed() const;
  std::vector<std::size_t> hidden_sizes() const;
};

// Registers every option on `app` (subcommands fall through to it).
void add_options(CLI::App& app, RunConfig& config);

}  // namespace weldgeom::cli
