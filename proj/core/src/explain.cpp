#include "weldgeom/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "weldgeom/csv.hpp"
#include "weldgeom/error.hpp"
#include "weldgeom/parallel.hpp"
#include "weldgeom/rng.hpp"

namespace weldgeom {
namespace {

constexpr Eigen::Index kTargetBatchRows = 4096;

// |C|! (n - |C| - 1)! / n! for |C| = 0 .. n-1.
std::vector<double> coalition_weights(std::size_t n) {
  std::vector<double> fact(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
  std::vector<double> w(n);
  for (std::size_t s = 0; s < n; ++s) w[s] = fact[s] * fact[n - s - 1] / fact[n];
  return w;
}

Eigen::MatrixXd evaluate(const BatchFunction& f, const Eigen::MatrixXd& batch,
                         Eigen::Index outputs) {
  Eigen::MatrixXd out = f(batch);
  if (out.rows() != batch.rows() || out.cols() != outputs) {
    throw ShapeError("predictor returned a " + std::to_string(out.rows()) + "x" +
                     std::to_string(out.cols()) + " batch, expected " +
                     std::to_string(batch.rows()) + "x" + std::to_string(outputs));
  }
  return out;
}

// Value of every coalition mask for one instance: rows = masks, cols = outputs.
Eigen::MatrixXd coalition_values(const BatchFunction& f, const Eigen::MatrixXd& background,
                                 const Eigen::RowVectorXd& x, Eigen::Index outputs) {
  const auto n = x.size();
  const auto B = background.rows();
  const std::uint64_t masks = std::uint64_t{1} << n;
  const auto per_batch = std::max<Eigen::Index>(1, kTargetBatchRows / B);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(masks), outputs);
  Eigen::MatrixXd batch;
  for (std::uint64_t first = 0; first < masks; first += static_cast<std::uint64_t>(per_batch)) {
    const auto count = static_cast<Eigen::Index>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(per_batch), masks - first));
    batch.resize(count * B, n);
    for (Eigen::Index m = 0; m < count; ++m) {
      const std::uint64_t mask = first + static_cast<std::uint64_t>(m);
      auto block = batch.middleRows(m * B, B);
      block = background;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (mask & (std::uint64_t{1} << j)) block.col(j).setConstant(x(j));
      }
    }
    const Eigen::MatrixXd out = evaluate(f, batch, outputs);
    for (Eigen::Index m = 0; m < count; ++m) {
      values.row(static_cast<Eigen::Index>(first) + m) = out.middleRows(m * B, B).colwise().mean();
    }
  }
  return values;
}

}  // namespace

ShapMatrix shapley_values(const BatchFunction& predictor, const Eigen::MatrixXd& background,
                          const Eigen::MatrixXd& instances,
                          std::vector<std::string> feature_names,
                          std::vector<std::string> output_names, const ShapOptions& options) {
  if (background.rows() == 0) throw DataError("SHAP background dataset is empty");
  if (instances.rows() == 0) throw DataError("no instances to explain");
  const auto n = background.cols();
  if (instances.cols() != n) throw ShapeError("instances and background differ in feature count");
  if (static_cast<Eigen::Index>(feature_names.size()) != n) {
    throw ShapeError("feature name count does not match feature columns");
  }
  if (options.mode == ShapMode::Exact && static_cast<std::size_t>(n) > kMaxExactFeatures) {
    throw ConfigError("exact Shapley enumeration supports at most " +
                      std::to_string(kMaxExactFeatures) + " features, got " + std::to_string(n) +
                      "; use sampling mode");
  }
  if (options.mode == ShapMode::Sampling && options.permutations < 1) {
    throw ConfigError("sampling mode needs at least one permutation");
  }

  ShapMatrix result;
  const Eigen::MatrixXd base_batch = predictor(background);
  const auto outputs = base_batch.cols();
  if (base_batch.rows() != background.rows() || outputs == 0) {
    throw ShapeError("predictor output does not match the background batch");
  }
  if (output_names.empty()) {
    for (Eigen::Index r = 0; r < outputs; ++r) output_names.push_back("y" + std::to_string(r));
  }
  if (static_cast<Eigen::Index>(output_names.size()) != outputs) {
    throw ShapeError("output name count does not match predictor outputs");
  }
  result.feature_names = std::move(feature_names);
  result.output_names = std::move(output_names);
  result.base_value = base_batch.colwise().mean().transpose();
  result.predictions = evaluate(predictor, instances, outputs);
  result.phi.assign(static_cast<std::size_t>(outputs),
                    Eigen::MatrixXd::Zero(instances.rows(), n));

  const auto weights = coalition_weights(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(instances.rows()), options.threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    const Eigen::RowVectorXd x = instances.row(i);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, outputs);
    if (options.mode == ShapMode::Exact) {
      const auto values = coalition_values(predictor, background, x, outputs);
      for (Eigen::Index k = 0; k < n; ++k) {
        const std::uint64_t bit = std::uint64_t{1} << k;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
          if (mask & bit) continue;
          const double w = weights[static_cast<std::size_t>(std::popcount(mask))];
          phi.row(k) += w * (values.row(static_cast<Eigen::Index>(mask | bit)) -
                             values.row(static_cast<Eigen::Index>(mask)));
        }
      }
    } else {
      Rng rng(derive_seed(options.seed, 0x53484150, row));
      std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      for (int p = 0; p < options.permutations; ++p) {
        rng.shuffle(perm.begin(), perm.end());
        Eigen::MatrixXd z = background;
        Eigen::RowVectorXd prev = result.base_value.transpose();
        for (auto j : perm) {
          z.col(j).setConstant(x(j));
          const Eigen::RowVectorXd cur = evaluate(predictor, z, outputs).colwise().mean();
          phi.row(j) += cur - prev;
          prev = cur;
        }
      }
      phi /= static_cast<double>(options.permutations);
    }
    for (Eigen::Index r = 0; r < outputs; ++r) {
      result.phi[static_cast<std::size_t>(r)].row(i) = phi.col(r).transpose();
    }
  });
  return result;
}

std::vector<FeatureImportance> mean_abs_shap(const ShapMatrix& matrix, std::size_t output) {
  if (output >= matrix.phi.size()) throw ShapeError("output index out of range");
  const auto& phi = matrix.phi[output];
  if (phi.rows() == 0) throw DataError("SHAP matrix is empty");
  const Eigen::VectorXd m = phi.cwiseAbs().colwise().mean().transpose();
  const double total = m.sum();
  if (!(total > 0)) throw Error("zero total attribution; shares are undefined");
  std::vector<FeatureImportance> out;
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    out.push_back({matrix.feature_names[static_cast<std::size_t>(k)], m(k), m(k) / total});
  }
  return out;
}

std::array<double, kNumInputs> input_group_shares(
    const std::vector<FeatureImportance>& importance, FeatureScheme scheme) {
  if (importance.size() != feature_count(scheme)) {
    throw ShapeError("importance vector does not match the feature scheme");
  }
  std::array<double, kNumInputs> groups{};
  for (std::size_t k = 0; k < importance.size(); ++k) {
    const auto f = feature_factors(scheme, k);
    if (f.second < 0 || f.second == f.first) {
      groups[static_cast<std::size_t>(f.first)] += importance[k].share;
    } else {
      groups[static_cast<std::size_t>(f.first)] += importance[k].share / 2;
      groups[static_cast<std::size_t>(f.second)] += importance[k].share / 2;
    }
  }
  return groups;
}

void write_shap_csv(const std::filesystem::path& path, const ShapMatrix& matrix) {
  csv::Writer out(path);
  out.row({"instance", "feature", "response", "phi"});
  for (std::size_t r = 0; r < matrix.phi.size(); ++r) {
    const auto& phi = matrix.phi[r];
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      for (Eigen::Index k = 0; k < phi.cols(); ++k) {
        out.row({std::to_string(i + 1), matrix.feature_names[static_cast<std::size_t>(k)],
                 matrix.output_names[r], csv::format_exact(phi(i, k))});
      }
    }
  }
}

void write_importance_csv(const std::filesystem::path& path, const ShapMatrix& matrix) {
  csv::Writer out(path);
  out.row({"feature", "response", "mean_abs_shap", "share"});
  for (std::size_t r = 0; r < matrix.phi.size(); ++r) {
    for (const auto& imp : mean_abs_shap(matrix, r)) {
      out.row({imp.feature, matrix.output_names[r], csv::format_exact(imp.mean_abs),
               csv::format_exact(imp.share)});
    }
  }
}

}  // namespace weldgeom
