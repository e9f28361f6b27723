#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "weldgeom/dataset.hpp"
#include "weldgeom/neuralnet.hpp"
#include "weldgeom/rng.hpp"

namespace weldgeom {

struct TrialConfig {
  std::vector<std::size_t> hidden_sizes;
  double dropout_rate = 0.1;
  double learning_rate = 0.01;
};

// Neurons per hidden layer on an integer grid, dropout from a discrete set,
// learning rate uniform on a closed interval, layer count on an integer range.
struct SearchSpace {
  std::size_t neurons_min = 30;
  std::size_t neurons_max = 40;
  std::size_t neurons_step = 1;
  std::vector<double> dropout_rates = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  double learning_rate_min = 0.01;
  double learning_rate_max = 0.02;
  std::size_t layers_min = 2;
  std::size_t layers_max = 3;

  TrialConfig sample(Rng& rng) const;
  bool contains(const TrialConfig& config) const;
  void validate() const;
};

struct SearchBudget {
  int max_trials = 10;
  int executions_per_trial = 2;
  int epochs = 250;

  static SearchBudget published() { return {100, 2, 2500}; }
  static SearchBudget desk() { return {10, 2, 250}; }
  void validate() const;
};

struct TrialResult {
  int trial = 0;
  TrialConfig config;
  std::vector<double> executions;  // final validation MAE per execution
  double objective = 0;            // mean of executions; +inf when failed
  bool failed = false;
};

struct SearchResult {
  TrialResult best;
  std::vector<TrialResult> trials;
};

// Trains one execution and returns its final validation MAE. May throw
// TrainingError (or return a non-finite value) to mark the trial failed.
using TrialEvaluator = std::function<double(const TrialConfig& config, int epochs,
                                            std::uint64_t seed)>;

// Trial t samples its configuration from stream (seed, t); execution e of
// trial t trains with stream (seed, t, e + 1). Results are therefore the same
// for any `threads`. Best is the lowest objective, earliest trial on ties.
// Throws Error when every trial failed.
SearchResult random_search(const SearchSpace& space, const SearchBudget& budget,
                           const TrialEvaluator& evaluator, std::uint64_t seed,
                           unsigned threads = 1);

// Evaluator that trains an AnnPredictor of `base` (scheme, head, transforms)
// with the trial's topology on `train_records`.
TrialEvaluator ann_trial_evaluator(std::span<const WeldRecord> train_records,
                                   AnnConfig base);

// `trial,execution,neurons_1..neurons_k,dropout,lr,final_val_mae`; layers
// absent from a trial leave their neuron cell empty.
void write_trials_csv(const std::filesystem::path& path, const SearchResult& result,
                      std::size_t max_layers);

}  // namespace weldgeom
