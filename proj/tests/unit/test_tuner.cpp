#include <gtest/gtest.h>

#include <cmath>
#include <mutex>
#include <set>

#include "test_support.hpp"
#include "weldgeom/csv.hpp"
#include "weldgeom/dataset.hpp"
#include "weldgeom/error.hpp"
#include "weldgeom/tuner.hpp"

namespace weldgeom {
namespace {

// Cheap deterministic objective depending on config and seed.
double synthetic(const TrialConfig& c, int, std::uint64_t seed) {
  double s = 0;
  for (auto n : c.hidden_sizes) s += static_cast<double>(n);
  return std::abs(s - 70) + c.dropout_rate + 100 * std::abs(c.learning_rate - 0.015) +
         static_cast<double>(seed % 7) * 1e-3;
}

TEST(SearchSpace, ThousandSamplesWithinBounds) {
  const SearchSpace space;
  Rng rng(5);
  std::set<std::size_t> neurons, layers;
  std::set<double> dropouts;
  for (int k = 0; k < 1000; ++k) {
    const auto c = space.sample(rng);
    ASSERT_TRUE(space.contains(c));
    ASSERT_GE(c.learning_rate, 0.01);
    ASSERT_LE(c.learning_rate, 0.02);
    layers.insert(c.hidden_sizes.size());
    for (auto n : c.hidden_sizes) {
      ASSERT_GE(n, 30u);
      ASSERT_LE(n, 40u);
      neurons.insert(n);
    }
    dropouts.insert(c.dropout_rate);
  }
  EXPECT_EQ(neurons.size(), 11u);
  EXPECT_EQ(layers, (std::set<std::size_t>{2, 3}));
  EXPECT_EQ(dropouts, (std::set<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
}

TEST(SearchSpace, ContainsRejectsOutsiders) {
  const SearchSpace space;
  EXPECT_FALSE(space.contains({{29, 35}, 0.1, 0.015}));
  EXPECT_FALSE(space.contains({{35, 35}, 0.7, 0.015}));
  EXPECT_FALSE(space.contains({{35, 35}, 0.1, 0.03}));
  EXPECT_FALSE(space.contains({{35}, 0.1, 0.015}));
  EXPECT_TRUE(space.contains({{30, 40, 35}, 0.6, 0.02}));
}

TEST(SearchBudget, PublishedAndDeskBudgetsValid) {
  EXPECT_NO_THROW(SearchBudget::published().validate());
  EXPECT_NO_THROW(SearchBudget::desk().validate());
  EXPECT_EQ(SearchBudget::published().max_trials, 100);
  EXPECT_EQ(SearchBudget::published().epochs, 2500);
  EXPECT_THROW((SearchBudget{0, 2, 10}).validate(), ConfigError);
  EXPECT_THROW((SearchBudget{2, 0, 10}).validate(), ConfigError);
}

TEST(RandomSearch, SingleTrialIsBest) {
  const auto r = random_search({}, {1, 1, 5}, synthetic, 3);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.best.trial, 0);
  EXPECT_EQ(r.best.executions.size(), 1u);
}

TEST(RandomSearch, ArgminAndExecutionCount) {
  const auto r = random_search({}, {25, 3, 5}, synthetic, 8);
  ASSERT_EQ(r.trials.size(), 25u);
  for (const auto& t : r.trials) {
    EXPECT_EQ(t.executions.size(), 3u);
    EXPECT_LE(r.best.objective, t.objective);
    EXPECT_NEAR(t.objective, (t.executions[0] + t.executions[1] + t.executions[2]) / 3, 1e-15);
  }
}

TEST(RandomSearch, TiesGoToEarliestTrial) {
  const auto r = random_search({}, {6, 2, 5}, [](const TrialConfig&, int, std::uint64_t) {
    return 1.0;
  }, 1);
  EXPECT_EQ(r.best.trial, 0);
}

TEST(RandomSearch, SeedReplayAndThreadIndependence) {
  const auto a = random_search({}, {12, 2, 5}, synthetic, 4, 1);
  const auto b = random_search({}, {12, 2, 5}, synthetic, 4, 3);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t k = 0; k < a.trials.size(); ++k) {
    EXPECT_EQ(a.trials[k].config.hidden_sizes, b.trials[k].config.hidden_sizes);
    EXPECT_EQ(a.trials[k].config.learning_rate, b.trials[k].config.learning_rate);
    EXPECT_EQ(a.trials[k].executions, b.trials[k].executions);
  }
  EXPECT_EQ(a.best.trial, b.best.trial);
  const auto c = random_search({}, {12, 2, 5}, synthetic, 5, 1);
  EXPECT_NE(c.trials[0].config.learning_rate, a.trials[0].config.learning_rate);
}

TEST(RandomSearch, ExecutionsUseDistinctSeeds) {
  std::vector<std::uint64_t> seeds;
  std::mutex mu;
  random_search({}, {3, 2, 5}, [&](const TrialConfig&, int, std::uint64_t s) {
    std::lock_guard lock(mu);
    seeds.push_back(s);
    return 0.0;
  }, 9);
  EXPECT_EQ(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size(), 6u);
}

TEST(RandomSearch, FailedTrialsScoreInfinity) {
  int calls = 0;
  const auto r = random_search({}, {4, 1, 5}, [&](const TrialConfig&, int, std::uint64_t) {
    if (calls++ % 2 == 0) throw TrainingError("diverged", 3);
    return 0.5;
  }, 2);
  int failed = 0;
  for (const auto& t : r.trials) {
    if (t.failed) {
      ++failed;
      EXPECT_TRUE(std::isinf(t.objective));
    }
  }
  EXPECT_EQ(failed, 2);
  EXPECT_FALSE(r.best.failed);
  EXPECT_THROW(random_search({}, {3, 1, 5}, [](const TrialConfig&, int, std::uint64_t) {
    return std::nan("");
  }, 2), Error);
}

TEST(RandomSearch, TrialsCsvShape) {
  const auto dir = test::scratch_dir("trials_csv");
  const auto r = random_search({}, SearchBudget::desk(), synthetic, 4);
  write_trials_csv(dir / "t.csv", r, 3);
  const auto text = csv::read_text(dir / "t.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "trial,execution,neurons_1,neurons_2,neurons_3,dropout,lr,final_val_mae");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
}

TEST(AnnTrialEvaluator, ReturnsFiniteValidationMae) {
  AnnConfig base;
  base.scheme = FeatureScheme::Linear;
  const auto eval = ann_trial_evaluator(canonical_training_records(), base);
  const double v = eval({{32, 31}, 0.2, 0.015}, 30, 7);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0);
  EXPECT_EQ(eval({{32, 31}, 0.2, 0.015}, 30, 7), v);
}

}  // namespace
}  // namespace weldgeom
