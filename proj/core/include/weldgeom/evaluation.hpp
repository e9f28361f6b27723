#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weldgeom/dataset.hpp"

namespace weldgeom {

double r_squared(std::span<const double> y_true, std::span<const double> y_pred);
double rmse(std::span<const double> y_true, std::span<const double> y_pred);

enum class StdDivisor { Population, Sample };
// Population (divisor N) reproduces the published STD(test) column.
double std_dev(std::span<const double> values,
               StdDivisor divisor = StdDivisor::Population);

// 100 * (pred - true) / true per sample.
std::vector<double> percent_errors(std::span<const double> y_true,
                                   std::span<const double> y_pred);

struct MetricsRow {
  Response response = Response::Width;
  double r2 = 0;
  double rmse = 0;
  double std_test = 0;   // of the targets
  double std_model = 0;  // of the predictions
};

// Rows in response order; both matrices are N x 4 in mm.
std::vector<MetricsRow> metrics_table(const Eigen::MatrixXd& y_true,
                                      const Eigen::MatrixXd& y_pred,
                                      StdDivisor divisor = StdDivisor::Population);

struct CvPlan {
  int n_splits = 10;
  int n_repeats = 5;
  std::uint64_t seed = 0;
};

struct Fold {
  int repeat = 0;
  int index = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Each repeat shuffles 0..n-1 with stream (seed, repeat) and cuts it into
// n_splits contiguous folds; the first n % n_splits folds get one extra
// sample.
std::vector<Fold> make_folds(std::size_t n, const CvPlan& plan);

// A fitted model: records -> N x 4 predictions in mm.
using Predictor = std::function<Eigen::MatrixXd(std::span<const WeldRecord>)>;
using ModelFactory = std::function<Predictor(std::span<const WeldRecord> train)>;

struct FoldMetrics {
  int repeat = 0;
  int fold = 0;
  std::vector<MetricsRow> rows;  // r2 is NaN when the fold's targets are constant
};

struct CvSummary {
  Response response = Response::Width;
  double mean_r2 = 0;
  double std_r2 = 0;
  double mean_rmse = 0;
  double std_rmse = 0;
  int r2_folds = 0;  // folds contributing to the r2 aggregate
};

struct CvReport {
  std::vector<FoldMetrics> folds;  // ordered by (repeat, fold)
  std::vector<CvSummary> summary;
};

CvReport repeated_kfold(std::span<const WeldRecord> data, const CvPlan& plan,
                        const ModelFactory& factory, unsigned threads = 1);

// Output tables.
void write_metrics_csv(const std::filesystem::path& path, const std::string& model,
                       const std::vector<MetricsRow>& rows, bool append = false);

struct PredictionRow {
  std::size_t sample = 0;
  Response response = Response::Width;
  double actual = 0;
  double predicted = 0;
  double percent_error = 0;
  std::string model;
};

std::vector<PredictionRow> prediction_rows(const Eigen::MatrixXd& y_true,
                                           const Eigen::MatrixXd& y_pred,
                                           const std::string& model);
void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRow>& rows);
void write_cv_csv(const std::filesystem::path& path, const CvReport& report);

}  // namespace weldgeom
