#include "weldgeom/linmodel.hpp"

#include <map>
#include <sstream>
#include <string>

#include "weldgeom/csv.hpp"
#include "weldgeom/error.hpp"

namespace weldgeom {
namespace {

constexpr double kRankTolerance = 1e-10;

std::string column_label(std::span<const std::string> names, Eigen::Index design_col) {
  if (design_col == 0) return "intercept";
  const auto k = static_cast<std::size_t>(design_col - 1);
  if (k < names.size()) return names[k];
  return "x" + std::to_string(k + 1);
}

void check_scheme(const LinearModel& model, std::size_t n) {
  if (n != feature_count(model.scheme)) {
    throw ShapeError("model expects " + std::to_string(feature_count(model.scheme)) +
                     " " + std::string(scheme_name(model.scheme)) + " features, got " +
                     std::to_string(n));
  }
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0;
  if (!csv::parse_number(text, v)) {
    throw DataError("model file: '" + key + "' is not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  return p == Provenance::Refit ? "refit" : "published";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "refit") return Provenance::Refit;
  if (name == "published") return Provenance::Published;
  throw DataError("unknown provenance '" + std::string(name) + "'");
}

LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  std::span<const std::string> column_names) {
  if (X.rows() != y.size()) {
    throw ShapeError("design has " + std::to_string(X.rows()) + " rows but response has " +
                     std::to_string(y.size()));
  }
  if (X.rows() < X.cols() + 1) {
    throw ShapeError("need at least " + std::to_string(X.cols() + 1) +
                     " rows for " + std::to_string(X.cols()) +
                     " columns plus intercept, got " + std::to_string(X.rows()));
  }
  if (!X.allFinite() || !y.allFinite()) throw DataError("non-finite value in regression data");

  Eigen::MatrixXd design(X.rows(), X.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(X.cols()) = X;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(kRankTolerance);
  const auto rank = qr.rank();
  if (rank < design.cols()) {
    const auto dependent = qr.colsPermutation().indices()(rank);
    const auto name = column_label(column_names, dependent);
    throw RankDeficiencyError("design matrix is rank deficient (rank " +
                                  std::to_string(rank) + " of " +
                                  std::to_string(design.cols()) + "); column '" + name +
                                  "' is linearly dependent on the others",
                              name);
  }
  const Eigen::VectorXd beta = qr.solve(y);
  LeastSquaresFit fit;
  fit.intercept = beta(0);
  fit.coefficients = beta.tail(X.cols());
  fit.rank = static_cast<int>(rank);
  return fit;
}

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    FeatureScheme scheme, Response response) {
  if (static_cast<std::size_t>(X.cols()) != feature_count(scheme)) {
    throw ShapeError(std::string(scheme_name(scheme)) + " scheme has " +
                     std::to_string(feature_count(scheme)) + " features, design has " +
                     std::to_string(X.cols()) + " columns");
  }
  const auto names = feature_names(scheme);
  const auto fit = fit_least_squares(X, y, names);
  LinearModel m;
  m.scheme = scheme;
  m.response = response;
  m.intercept = fit.intercept;
  m.coefficients.assign(fit.coefficients.data(),
                        fit.coefficients.data() + fit.coefficients.size());
  m.provenance = Provenance::Refit;
  return m;
}

double predict(const LinearModel& model, const FeatureVector& features) {
  if (features.scheme != model.scheme) {
    throw ShapeError("model scheme " + std::string(scheme_name(model.scheme)) +
                     " does not match feature scheme " +
                     std::string(scheme_name(features.scheme)));
  }
  check_scheme(model, features.values.size());
  double y = model.intercept;
  for (std::size_t k = 0; k < features.values.size(); ++k) {
    y += model.coefficients[k] * features.values[k];
  }
  return y;
}

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& X) {
  check_scheme(model, static_cast<std::size_t>(X.cols()));
  const Eigen::Map<const Eigen::VectorXd> beta(model.coefficients.data(),
                                               static_cast<Eigen::Index>(model.coefficients.size()));
  return (X * beta).array() + model.intercept;
}

std::string serialize(const LinearModel& model) {
  std::ostringstream out;
  out << "# weldgeom linear model\n"
      << "kind = linear\n"
      << "scheme = " << scheme_name(model.scheme) << '\n'
      << "response = " << response_name(model.response) << '\n'
      << "provenance = " << provenance_name(model.provenance) << '\n'
      << "n_coefficients = " << model.coefficients.size() << '\n'
      << "alpha0 = " << csv::format_exact(model.intercept) << '\n';
  for (std::size_t k = 0; k < model.coefficients.size(); ++k) {
    out << "alpha" << k + 1 << " = " << csv::format_exact(model.coefficients[k]) << '\n';
  }
  return out.str();
}

LinearModel parse_linear_model(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line, key, value;
  while (std::getline(in, line)) {
    if (csv::split_key_value(line, key, value)) kv[key] = value;
  }
  auto need = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw DataError("model file: missing key '" + k + "'");
    return it->second;
  };
  if (need("kind") != "linear") throw DataError("model file: not a linear model");
  LinearModel m;
  try {
    m.scheme = parse_scheme(need("scheme"));
    m.response = parse_response(need("response"));
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  m.provenance = parse_provenance(need("provenance"));
  const auto n = static_cast<std::size_t>(parse_double("n_coefficients", need("n_coefficients")));
  if (n != feature_count(m.scheme)) {
    throw DataError("model file: " + std::string(scheme_name(m.scheme)) + " needs " +
                    std::to_string(feature_count(m.scheme)) + " coefficients, header says " +
                    std::to_string(n));
  }
  m.intercept = parse_double("alpha0", need("alpha0"));
  for (std::size_t k = 1; k <= n; ++k) {
    const auto name = "alpha" + std::to_string(k);
    m.coefficients.push_back(parse_double(name, need(name)));
  }
  return m;
}

void save_linear_model(const std::filesystem::path& path, const LinearModel& model) {
  csv::write_text(path, serialize(model));
}

LinearModel load_linear_model(const std::filesystem::path& path) {
  return parse_linear_model(csv::read_text(path));
}

MlrPredictor::MlrPredictor(FeaturePipeline pipeline, TargetTransform targets,
                           std::vector<LinearModel> models)
    : pipeline_(std::move(pipeline)), targets_(std::move(targets)), models_(std::move(models)) {
  if (models_.size() != kNumResponses) {
    throw ShapeError("MLR predictor needs one model per response");
  }
  for (std::size_t r = 0; r < kNumResponses; ++r) {
    if (models_[r].response != kAllResponses[r] || models_[r].scheme != pipeline_.scheme()) {
      throw ShapeError("MLR models must be in response order and match the pipeline scheme");
    }
  }
}

MlrPredictor MlrPredictor::fit(std::span<const WeldRecord> train, FeatureScheme scheme,
                               ExpansionOrder order, bool scale_targets) {
  auto pipeline = FeaturePipeline::fit(train, scheme, order);
  auto targets = scale_targets ? TargetTransform::fit(train) : TargetTransform{};
  const Eigen::MatrixXd X = pipeline.features(train);
  const Eigen::MatrixXd Y = targets.forward(response_matrix(train));
  std::vector<LinearModel> models;
  for (auto r : kAllResponses) {
    models.push_back(fit_ols(X, Y.col(static_cast<Eigen::Index>(index_of(r))), scheme, r));
  }
  return {std::move(pipeline), std::move(targets), std::move(models)};
}

MlrPredictor MlrPredictor::published(std::span<const WeldRecord> train, FeatureScheme scheme,
                                 ExpansionOrder order, bool scale_targets) {
  auto pipeline = FeaturePipeline::fit(train, scheme, order);
  auto targets = scale_targets ? TargetTransform::fit(train) : TargetTransform{};
  std::vector<LinearModel> models;
  for (auto r : kAllResponses) models.push_back(published_model(scheme, r));
  return {std::move(pipeline), std::move(targets), std::move(models)};
}

Eigen::MatrixXd MlrPredictor::predict(std::span<const WeldRecord> records) const {
  return predict_features(pipeline_.features(records));
}

Eigen::MatrixXd MlrPredictor::predict_features(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd out(features.rows(), static_cast<Eigen::Index>(kNumResponses));
  for (std::size_t r = 0; r < kNumResponses; ++r) {
    out.col(static_cast<Eigen::Index>(r)) = weldgeom::predict(models_[r], features);
  }
  return targets_.inverse(out);
}

}  // namespace weldgeom
