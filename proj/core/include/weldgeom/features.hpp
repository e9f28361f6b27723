#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "weldgeom/dataset.hpp"

namespace weldgeom {

// Polynomial bases over the four process inputs (t, i, v, s).
//   Linear      t i v s
//   Interactive t i v s ti tv ts iv is vs
//   Full        t i v s t² ti tv ts i² iv is v² vs s²
// The order matches the subscripts of the published coefficient lists.
enum class FeatureScheme { Linear, Interactive, Full };

inline constexpr std::array<FeatureScheme, 3> kAllSchemes = {
    FeatureScheme::Linear, FeatureScheme::Interactive, FeatureScheme::Full};

std::size_t feature_count(FeatureScheme scheme);
std::string_view scheme_name(FeatureScheme scheme);
FeatureScheme parse_scheme(std::string_view name);

// Lower-case names: "t", "i", "t*i", "t^2", ...
std::vector<std::string> feature_names(FeatureScheme scheme);

// Input indices (0=t .. 3=s) of a feature's factors. second == -1 for a
// linear term, first == second for a square.
struct FeatureFactors {
  int first;
  int second;
};
FeatureFactors feature_factors(FeatureScheme scheme, std::size_t feature);

struct FeatureVector {
  FeatureScheme scheme = FeatureScheme::Linear;
  std::vector<double> values;
};

// Deterministic expansion in canonical order. Throws DataError on non-finite
// input.
FeatureVector expand(const InputVector& inputs, FeatureScheme scheme);

// Row-wise expansion of an N x 4 matrix.
Eigen::MatrixXd expand_rows(const Eigen::MatrixXd& inputs, FeatureScheme scheme);

// Where min-max scaling sits relative to polynomial expansion.
//   ExpandThenScale: polynomial terms are formed on raw inputs and every
//     expanded column is then min-max scaled with training extrema.
//   ScaleThenExpand: the four raw inputs are min-max scaled and the products
//     are formed on the scaled values.
// The linear scheme is identical under both.
enum class ExpansionOrder { ExpandThenScale, ScaleThenExpand };

std::string_view order_name(ExpansionOrder order);
ExpansionOrder parse_order(std::string_view name);

// Fitted raw-record -> model-feature transform. Fit only on training records.
class FeaturePipeline {
 public:
  static FeaturePipeline fit(std::span<const WeldRecord> train,
                             FeatureScheme scheme,
                             ExpansionOrder order = ExpansionOrder::ExpandThenScale);

  FeatureScheme scheme() const { return scheme_; }
  ExpansionOrder order() const { return order_; }
  std::size_t feature_count() const { return weldgeom::feature_count(scheme_); }

  // Scaler over the raw (T, I, V, S) columns; always fitted.
  const ScalerParams& input_scaler() const { return input_scaler_; }
  // Scaler over expanded columns; fitted only for ExpandThenScale.
  const ScalerParams& feature_scaler() const { return feature_scaler_; }

  Eigen::MatrixXd features(std::span<const WeldRecord> records) const;
  Eigen::MatrixXd features_from_inputs(const Eigen::MatrixXd& raw_inputs) const;
  FeatureVector features(const WeldRecord& record) const;

 private:
  FeatureScheme scheme_ = FeatureScheme::Linear;
  ExpansionOrder order_ = ExpansionOrder::ExpandThenScale;
  ScalerParams input_scaler_;
  ScalerParams feature_scaler_;
};

}  // namespace weldgeom
