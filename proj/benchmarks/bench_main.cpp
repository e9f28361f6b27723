#include <benchmark/benchmark.h>

#include "weldgeom/dataset.hpp"
#include "weldgeom/explain.hpp"
#include "weldgeom/features.hpp"
#include "weldgeom/linmodel.hpp"
#include "weldgeom/neuralnet.hpp"

using namespace weldgeom;

namespace {

void BM_OlsFit(benchmark::State& state) {
  const auto scheme = kAllSchemes[static_cast<std::size_t>(state.range(0))];
  const auto& train = canonical_training_records();
  for (auto _ : state) benchmark::DoNotOptimize(MlrPredictor::fit(train, scheme));
  state.SetLabel(std::string(scheme_name(scheme)));
}
BENCHMARK(BM_OlsFit)->DenseRange(0, 2);

// One full-batch Adam epoch on the 53 training rows.
void BM_MlpEpoch(benchmark::State& state) {
  const auto scheme = kAllSchemes[static_cast<std::size_t>(state.range(0))];
  const auto& train = canonical_training_records();
  const auto pipeline = FeaturePipeline::fit(train, scheme);
  const Eigen::MatrixXd X = pipeline.features(train);
  const Eigen::MatrixXd Y = response_matrix(train);
  TrainingConfig cfg;
  cfg.epochs = 1;
  cfg.seed = 1;
  const auto model = init(MlpArchitecture::preset(scheme), 1);
  for (auto _ : state) benchmark::DoNotOptimize(weldgeom::train(model, X, Y, cfg));
  state.SetLabel(std::string(scheme_name(scheme)));
}
BENCHMARK(BM_MlpEpoch)->DenseRange(0, 2);

// Exact enumeration over the 14 full-polynomial features, 10 test rows.
void BM_ShapExactFull(benchmark::State& state) {
  const auto& train = canonical_training_records();
  const auto p = MlrPredictor::fit(train, FeatureScheme::Full);
  const BatchFunction f = [&](const Eigen::MatrixXd& F) { return p.predict_features(F); };
  const Eigen::MatrixXd bg = p.pipeline().features(train);
  const Eigen::MatrixXd x = p.pipeline().features(canonical_test_records());
  const auto names = feature_names(FeatureScheme::Full);
  const std::vector<std::string> outputs = {"width", "penetration", "throat", "leg"};
  for (auto _ : state) benchmark::DoNotOptimize(shapley_values(f, bg, x, names, outputs));
}
BENCHMARK(BM_ShapExactFull)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
