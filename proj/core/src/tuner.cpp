#include "weldgeom/tuner.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "weldgeom/csv.hpp"
#include "weldgeom/error.hpp"
#include "weldgeom/parallel.hpp"

namespace weldgeom {
namespace {

constexpr std::uint64_t kSampleStream = 0x54524941;  // trial configuration draws

}  // namespace

void SearchSpace::validate() const {
  if (neurons_min == 0 || neurons_max < neurons_min || neurons_step == 0) {
    throw ConfigError("neuron range must be non-empty with a positive step");
  }
  if (dropout_rates.empty()) throw ConfigError("dropout rate set is empty");
  for (double d : dropout_rates) {
    if (!(d >= 0 && d < 1)) throw ConfigError("dropout rates must lie in [0, 1)");
  }
  if (!(learning_rate_min > 0 && learning_rate_max >= learning_rate_min)) {
    throw ConfigError("learning rate interval must be positive and non-empty");
  }
  if (layers_min == 0 || layers_max < layers_min) {
    throw ConfigError("hidden layer count range must be non-empty");
  }
}

TrialConfig SearchSpace::sample(Rng& rng) const {
  TrialConfig c;
  const auto layers = static_cast<std::size_t>(rng.uniform_int(
      static_cast<std::int64_t>(layers_min), static_cast<std::int64_t>(layers_max)));
  const auto steps = static_cast<std::int64_t>((neurons_max - neurons_min) / neurons_step);
  for (std::size_t l = 0; l < layers; ++l) {
    c.hidden_sizes.push_back(neurons_min +
                             neurons_step * static_cast<std::size_t>(rng.uniform_int(0, steps)));
  }
  c.dropout_rate = dropout_rates[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(dropout_rates.size()) - 1))];
  c.learning_rate = rng.uniform(learning_rate_min, learning_rate_max);
  return c;
}

bool SearchSpace::contains(const TrialConfig& c) const {
  if (c.hidden_sizes.size() < layers_min || c.hidden_sizes.size() > layers_max) return false;
  for (auto n : c.hidden_sizes) {
    if (n < neurons_min || n > neurons_max || (n - neurons_min) % neurons_step != 0) return false;
  }
  bool dropout_ok = false;
  for (double d : dropout_rates) dropout_ok = dropout_ok || d == c.dropout_rate;
  return dropout_ok && c.learning_rate >= learning_rate_min &&
         c.learning_rate <= learning_rate_max;
}

void SearchBudget::validate() const {
  if (max_trials <= 0 || executions_per_trial <= 0 || epochs <= 0) {
    throw ConfigError("search budget (trials, executions, epochs) must be positive");
  }
}

SearchResult random_search(const SearchSpace& space, const SearchBudget& budget,
                           const TrialEvaluator& evaluator, std::uint64_t seed,
                           unsigned threads) {
  space.validate();
  budget.validate();
  const auto n_trials = static_cast<std::size_t>(budget.max_trials);
  const auto n_exec = static_cast<std::size_t>(budget.executions_per_trial);

  SearchResult result;
  result.trials.resize(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, kSampleStream, t));
    auto& trial = result.trials[t];
    trial.trial = static_cast<int>(t);
    trial.config = space.sample(rng);
    trial.executions.assign(n_exec, std::numeric_limits<double>::infinity());
  }

  // One job per (trial, execution).
  std::vector<char> ok(n_trials * n_exec, 0);
  parallel_for(n_trials * n_exec, threads, [&](std::size_t job) {
    const auto t = job / n_exec;
    const auto e = job % n_exec;
    auto& trial = result.trials[t];
    try {
      const double mae = evaluator(trial.config, budget.epochs, derive_seed(seed, t, e + 1));
      if (std::isfinite(mae)) {
        trial.executions[e] = mae;
        ok[job] = 1;
      }
    } catch (const TrainingError&) {
      // Divergent execution; the trial is scored +inf below.
    }
  });

  const TrialResult* best = nullptr;
  for (std::size_t t = 0; t < n_trials; ++t) {
    auto& trial = result.trials[t];
    bool all_ok = true;
    for (std::size_t e = 0; e < n_exec; ++e) all_ok = all_ok && ok[t * n_exec + e];
    trial.failed = !all_ok;
    trial.objective = trial.failed
                          ? std::numeric_limits<double>::infinity()
                          : std::accumulate(trial.executions.begin(), trial.executions.end(), 0.0) /
                                static_cast<double>(n_exec);
    if (!trial.failed && (best == nullptr || trial.objective < best->objective)) best = &trial;
  }
  if (best == nullptr) throw Error("random search: every trial failed");
  result.best = *best;
  return result;
}

TrialEvaluator ann_trial_evaluator(std::span<const WeldRecord> train_records, AnnConfig base) {
  std::vector<WeldRecord> data(train_records.begin(), train_records.end());
  return [data = std::move(data), base = std::move(base)](
             const TrialConfig& config, int epochs, std::uint64_t seed) {
    AnnConfig cfg = base;
    cfg.hidden_sizes = config.hidden_sizes;
    cfg.dropout_rate = config.dropout_rate;
    cfg.training.learning_rate = config.learning_rate;
    cfg.training.epochs = epochs;
    cfg.training.seed = seed;
    std::vector<TrainingHistory> histories;
    AnnPredictor::train(data, cfg, &histories);
    double total = 0;
    for (const auto& h : histories) {
      if (h.val_mae.empty()) throw ConfigError("tuning needs a validation split");
      total += h.val_mae.back();
    }
    return total / static_cast<double>(histories.size());
  };
}

void write_trials_csv(const std::filesystem::path& path, const SearchResult& result,
                      std::size_t max_layers) {
  csv::Writer out(path);
  std::vector<std::string> header{"trial", "execution"};
  for (std::size_t l = 0; l < max_layers; ++l) header.push_back("neurons_" + std::to_string(l + 1));
  header.insert(header.end(), {"dropout", "lr", "final_val_mae"});
  out.row(header);
  for (const auto& t : result.trials) {
    for (std::size_t e = 0; e < t.executions.size(); ++e) {
      std::vector<std::string> row{std::to_string(t.trial), std::to_string(e)};
      for (std::size_t l = 0; l < max_layers; ++l) {
        row.push_back(l < t.config.hidden_sizes.size() ? std::to_string(t.config.hidden_sizes[l])
                                                       : "");
      }
      row.push_back(csv::format_number(t.config.dropout_rate));
      row.push_back(csv::format_exact(t.config.learning_rate));
      row.push_back(std::isfinite(t.executions[e]) ? csv::format_exact(t.executions[e]) : "inf");
      out.row(row);
    }
  }
}

}  // namespace weldgeom
