#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "weldgeom/dataset.hpp"
#include "weldgeom/features.hpp"

namespace weldgeom {

enum class Provenance { Refit, Published };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

// y = intercept + sum_k coefficients[k] * feature[k], one response.
struct LinearModel {
  FeatureScheme scheme = FeatureScheme::Linear;
  Response response = Response::Width;
  double intercept = 0;
  std::vector<double> coefficients;
  Provenance provenance = Provenance::Refit;
};

// Intercept + slopes of an unconstrained least-squares fit.
struct LeastSquaresFit {
  double intercept = 0;
  Eigen::VectorXd coefficients;
  int rank = 0;
};

// Minimizes ||y - b0 - X b||^2 through a column-pivoted Householder QR of
// [1 | X]. Throws RankDeficiencyError naming the first column found to be
// dependent (using `column_names`, or "x<k>" when empty) and ShapeError when
// rows < columns + 1 or X and y disagree.
LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y,
                                  std::span<const std::string> column_names = {});

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    FeatureScheme scheme, Response response);

double predict(const LinearModel& model, const FeatureVector& features);
Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& X);

// The twelve published equations (3 schemes x 4 responses), to full printed
// precision. Index with published_model().
const std::vector<LinearModel>& load_published_models();
const LinearModel& published_model(FeatureScheme scheme, Response response);

// Flat `key = value` text; numbers at 17 significant digits.
std::string serialize(const LinearModel& model);
LinearModel parse_linear_model(std::string_view text);
void save_linear_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_linear_model(const std::filesystem::path& path);

// Four per-response linear models sharing one feature pipeline, predicting in
// mm whatever space the coefficients live in.
class MlrPredictor {
 public:
  MlrPredictor(FeaturePipeline pipeline, TargetTransform targets,
               std::vector<LinearModel> models);

  static MlrPredictor fit(std::span<const WeldRecord> train, FeatureScheme scheme,
                          ExpansionOrder order = ExpansionOrder::ExpandThenScale,
                          bool scale_targets = false);

  // Published coefficients; the pipeline (scalers) still comes from `train`.
  static MlrPredictor published(std::span<const WeldRecord> train, FeatureScheme scheme,
                            ExpansionOrder order = ExpansionOrder::ExpandThenScale,
                            bool scale_targets = false);

  const FeaturePipeline& pipeline() const { return pipeline_; }
  const TargetTransform& targets() const { return targets_; }
  const std::vector<LinearModel>& models() const { return models_; }
  const LinearModel& model(Response r) const { return models_[index_of(r)]; }

  // N x 4, mm.
  Eigen::MatrixXd predict(std::span<const WeldRecord> records) const;
  // Rows of already-expanded features -> N x 4, mm.
  Eigen::MatrixXd predict_features(const Eigen::MatrixXd& features) const;

 private:
  FeaturePipeline pipeline_;
  TargetTransform targets_;
  std::vector<LinearModel> models_;
};

}  // namespace weldgeom
