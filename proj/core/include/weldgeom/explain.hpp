#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weldgeom/features.hpp"

namespace weldgeom {

// Any model evaluated on a batch: rows of features -> rows of outputs.
using BatchFunction = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

enum class ShapMode { Exact, Sampling };

struct ShapOptions {
  ShapMode mode = ShapMode::Exact;
  int permutations = 256;  // Sampling mode only
  std::uint64_t seed = 0;  // Sampling mode only
  unsigned threads = 1;
};

inline constexpr std::size_t kMaxExactFeatures = 16;

// phi[r](i, k): attribution of feature k for instance i on output r.
struct ShapMatrix {
  std::vector<std::string> feature_names;
  std::vector<std::string> output_names;
  Eigen::VectorXd base_value;     // mean prediction over the background
  Eigen::MatrixXd predictions;    // instances x outputs
  std::vector<Eigen::MatrixXd> phi;

  std::size_t instances() const { return static_cast<std::size_t>(predictions.rows()); }
  std::size_t features() const { return feature_names.size(); }
};

// Shapley values under the marginal (interventional) value function: for a
// coalition C the features outside C take background values and predictions
// are averaged over the background. Exact mode enumerates all 2^n coalitions
// and refuses n > kMaxExactFeatures; Sampling mode averages marginal
// contributions over seeded random permutations.
ShapMatrix shapley_values(const BatchFunction& predictor,
                          const Eigen::MatrixXd& background,
                          const Eigen::MatrixXd& instances,
                          std::vector<std::string> feature_names,
                          std::vector<std::string> output_names,
                          const ShapOptions& options = {});

struct FeatureImportance {
  std::string feature;
  double mean_abs = 0;
  double share = 0;  // mean_abs / sum(mean_abs)
};

// Per-feature mean |phi| over instances for one output. Throws Error when the
// total attribution is zero.
std::vector<FeatureImportance> mean_abs_shap(const ShapMatrix& matrix,
                                             std::size_t output);

// Collapses expanded-feature shares onto the four process inputs: a term's
// share is split evenly between its distinct factors (t*i gives half to t and
// half to i; t^2 gives all to t).
std::array<double, kNumInputs> input_group_shares(
    const std::vector<FeatureImportance>& importance, FeatureScheme scheme);

void write_shap_csv(const std::filesystem::path& path, const ShapMatrix& matrix);
void write_importance_csv(const std::filesystem::path& path, const ShapMatrix& matrix);

}  // namespace weldgeom
