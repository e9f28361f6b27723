#include "weldgeom/features.hpp"

#include <cmath>
#include <string>

#include "weldgeom/error.hpp"

namespace weldgeom {
namespace {

constexpr std::array<char, kNumInputs> kInputLetters = {'t', 'i', 'v', 's'};

// Factor pairs in canonical order; -1 marks a linear term.
constexpr FeatureFactors kLinear[] = {{0, -1}, {1, -1}, {2, -1}, {3, -1}};
constexpr FeatureFactors kInteractive[] = {
    {0, -1}, {1, -1}, {2, -1}, {3, -1}, {0, 1},
    {0, 2},  {0, 3},  {1, 2},  {1, 3},  {2, 3}};
constexpr FeatureFactors kFull[] = {
    {0, -1}, {1, -1}, {2, -1}, {3, -1}, {0, 0}, {0, 1}, {0, 2},
    {0, 3},  {1, 1},  {1, 2},  {1, 3},  {2, 2}, {2, 3}, {3, 3}};

std::span<const FeatureFactors> factors(FeatureScheme scheme) {
  switch (scheme) {
    case FeatureScheme::Linear: return kLinear;
    case FeatureScheme::Interactive: return kInteractive;
    case FeatureScheme::Full: return kFull;
  }
  return kLinear;
}

template <typename Row>
double term(const Row& x, const FeatureFactors& f) {
  return f.second < 0 ? x[f.first] : x[f.first] * x[f.second];
}

}  // namespace

std::size_t feature_count(FeatureScheme scheme) { return factors(scheme).size(); }

std::string_view scheme_name(FeatureScheme scheme) {
  switch (scheme) {
    case FeatureScheme::Linear: return "linear";
    case FeatureScheme::Interactive: return "interactive";
    case FeatureScheme::Full: return "full";
  }
  return "linear";
}

FeatureScheme parse_scheme(std::string_view name) {
  for (auto s : kAllSchemes) {
    if (name == scheme_name(s)) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected linear|interactive|full)");
}

std::vector<std::string> feature_names(FeatureScheme scheme) {
  std::vector<std::string> names;
  for (const auto& f : factors(scheme)) {
    std::string n(1, kInputLetters[f.first]);
    if (f.second == f.first) {
      n += "^2";
    } else if (f.second >= 0) {
      n += '*';
      n += kInputLetters[f.second];
    }
    names.push_back(std::move(n));
  }
  return names;
}

FeatureFactors feature_factors(FeatureScheme scheme, std::size_t feature) {
  const auto f = factors(scheme);
  if (feature >= f.size()) {
    throw ShapeError("feature index " + std::to_string(feature) + " out of range for " +
                     std::string(scheme_name(scheme)));
  }
  return f[feature];
}

FeatureVector expand(const InputVector& inputs, FeatureScheme scheme) {
  for (double x : inputs) {
    if (!std::isfinite(x)) throw DataError("cannot expand non-finite input");
  }
  FeatureVector out{scheme, {}};
  for (const auto& f : factors(scheme)) out.values.push_back(term(inputs, f));
  return out;
}

Eigen::MatrixXd expand_rows(const Eigen::MatrixXd& inputs, FeatureScheme scheme) {
  if (inputs.cols() != static_cast<Eigen::Index>(kNumInputs)) {
    throw ShapeError("expansion needs 4 input columns, got " +
                     std::to_string(inputs.cols()));
  }
  if (!inputs.allFinite()) throw DataError("cannot expand non-finite input");
  const auto f = factors(scheme);
  Eigen::MatrixXd out(inputs.rows(), static_cast<Eigen::Index>(f.size()));
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const auto row = inputs.row(i);
    for (std::size_t k = 0; k < f.size(); ++k) {
      out(i, static_cast<Eigen::Index>(k)) = term(row, f[k]);
    }
  }
  return out;
}

std::string_view order_name(ExpansionOrder order) {
  return order == ExpansionOrder::ExpandThenScale ? "expand-then-scale"
                                                  : "scale-then-expand";
}

ExpansionOrder parse_order(std::string_view name) {
  if (name == "expand-then-scale") return ExpansionOrder::ExpandThenScale;
  if (name == "scale-then-expand") return ExpansionOrder::ScaleThenExpand;
  throw ConfigError("unknown feature order '" + std::string(name) +
                    "' (expected expand-then-scale|scale-then-expand)");
}

FeaturePipeline FeaturePipeline::fit(std::span<const WeldRecord> train,
                                     FeatureScheme scheme, ExpansionOrder order) {
  FeaturePipeline p;
  p.scheme_ = scheme;
  p.order_ = order;
  p.input_scaler_ = fit_scaler(train, kInputColumns);
  if (order == ExpansionOrder::ExpandThenScale) {
    p.feature_scaler_ = fit_scaler(expand_rows(input_matrix(train), scheme));
  }
  return p;
}

Eigen::MatrixXd FeaturePipeline::features_from_inputs(
    const Eigen::MatrixXd& raw_inputs) const {
  WELDGEOM_REQUIRE(input_scaler_.fitted(), Error, "feature pipeline is not fitted");
  if (order_ == ExpansionOrder::ExpandThenScale) {
    return transform(feature_scaler_, expand_rows(raw_inputs, scheme_));
  }
  return expand_rows(transform(input_scaler_, raw_inputs), scheme_);
}

Eigen::MatrixXd FeaturePipeline::features(std::span<const WeldRecord> records) const {
  return features_from_inputs(input_matrix(records));
}

FeatureVector FeaturePipeline::features(const WeldRecord& record) const {
  const Eigen::MatrixXd row = features(std::span<const WeldRecord>(&record, 1));
  FeatureVector out{scheme_, std::vector<double>(row.data(), row.data() + row.size())};
  return out;
}

}  // namespace weldgeom
