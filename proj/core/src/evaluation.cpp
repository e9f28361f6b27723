#include "weldgeom/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "weldgeom/csv.hpp"
#include "weldgeom/error.hpp"
#include "weldgeom/parallel.hpp"
#include "weldgeom/rng.hpp"

namespace weldgeom {
namespace {

constexpr std::uint64_t kShuffleStream = 0x4b464f4c44;  // fold shuffles

void check_pair(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
  if (a.size() != b.size()) {
    throw ShapeError("length mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  if (a.size() < min_len) {
    throw ShapeError("need at least " + std::to_string(min_len) + " values");
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  return {m.col(c).data(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, 2);
  const double m = mean(y_true);
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - m) * (y_true[i] - m);
  }
  if (ss_tot == 0) throw DataError("R^2 is undefined for constant targets");
  return 1.0 - ss_res / ss_tot;
}

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, 1);
  double ss = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  }
  return std::sqrt(ss / static_cast<double>(y_true.size()));
}

double std_dev(std::span<const double> values, StdDivisor divisor) {
  if (values.size() < 2) throw ShapeError("standard deviation needs at least 2 values");
  const double m = mean(values);
  double ss = 0;
  for (double v : values) ss += (v - m) * (v - m);
  const auto n = static_cast<double>(values.size());
  return std::sqrt(ss / (divisor == StdDivisor::Population ? n : n - 1));
}

std::vector<double> percent_errors(std::span<const double> y_true,
                                   std::span<const double> y_pred) {
  check_pair(y_true, y_pred, 1);
  std::vector<double> out;
  out.reserve(y_true.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 0) {
      throw DataError("percentage error undefined: true value of sample " +
                      std::to_string(i) + " is zero");
    }
    out.push_back(100.0 * (y_pred[i] - y_true[i]) / y_true[i]);
  }
  return out;
}

std::vector<MetricsRow> metrics_table(const Eigen::MatrixXd& y_true,
                                      const Eigen::MatrixXd& y_pred, StdDivisor divisor) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols() ||
      y_true.cols() != static_cast<Eigen::Index>(kNumResponses)) {
    throw ShapeError("metrics need matching N x 4 target and prediction matrices");
  }
  std::vector<MetricsRow> rows;
  for (auto r : kAllResponses) {
    const auto c = static_cast<Eigen::Index>(index_of(r));
    const auto t = column(y_true, c);
    const auto p = column(y_pred, c);
    rows.push_back({r, r_squared(t, p), rmse(t, p), std_dev(t, divisor), std_dev(p, divisor)});
  }
  return rows;
}

std::vector<Fold> make_folds(std::size_t n, const CvPlan& plan) {
  if (plan.n_splits < 2) throw ConfigError("cross-validation needs at least 2 splits");
  if (plan.n_repeats < 1) throw ConfigError("cross-validation needs at least 1 repeat");
  const auto k = static_cast<std::size_t>(plan.n_splits);
  if (k > n) {
    throw DataError("cannot make " + std::to_string(k) + " folds from " + std::to_string(n) +
                    " samples");
  }
  std::vector<Fold> folds;
  for (int rep = 0; rep < plan.n_repeats; ++rep) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(plan.seed, kShuffleStream, static_cast<std::uint64_t>(rep)));
    rng.shuffle(order.begin(), order.end());
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t size = n / k + (f < n % k ? 1 : 0);
      Fold fold;
      fold.repeat = rep;
      fold.index = static_cast<int>(f);
      fold.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                               order.begin() + static_cast<std::ptrdiff_t>(start + size));
      for (std::size_t j = 0; j < n; ++j) {
        if (j < start || j >= start + size) fold.train_indices.push_back(order[j]);
      }
      std::sort(fold.test_indices.begin(), fold.test_indices.end());
      std::sort(fold.train_indices.begin(), fold.train_indices.end());
      folds.push_back(std::move(fold));
      start += size;
    }
  }
  return folds;
}

CvReport repeated_kfold(std::span<const WeldRecord> data, const CvPlan& plan,
                        const ModelFactory& factory, unsigned threads) {
  const auto folds = make_folds(data.size(), plan);
  CvReport report;
  report.folds.resize(folds.size());
  parallel_for(folds.size(), threads, [&](std::size_t f) {
    const auto& fold = folds[f];
    std::vector<WeldRecord> train, test;
    for (auto i : fold.train_indices) train.push_back(data[i]);
    for (auto i : fold.test_indices) test.push_back(data[i]);
    const auto predictor = factory(train);
    const Eigen::MatrixXd pred = predictor(test);
    const Eigen::MatrixXd truth = response_matrix(test);
    FoldMetrics fm{fold.repeat, fold.index, {}};
    for (auto r : kAllResponses) {
      const auto c = static_cast<Eigen::Index>(index_of(r));
      MetricsRow row{r, std::numeric_limits<double>::quiet_NaN(), rmse(column(truth, c), column(pred, c)),
                     0, 0};
      if (test.size() >= 2) {
        row.std_test = std_dev(column(truth, c));
        row.std_model = std_dev(column(pred, c));
        if (row.std_test > 0) row.r2 = r_squared(column(truth, c), column(pred, c));
      }
      fm.rows.push_back(row);
    }
    report.folds[f] = std::move(fm);
  });

  for (auto r : kAllResponses) {
    std::vector<double> r2s, rmses;
    for (const auto& fm : report.folds) {
      const auto& row = fm.rows[index_of(r)];
      if (std::isfinite(row.r2)) r2s.push_back(row.r2);
      rmses.push_back(row.rmse);
    }
    CvSummary s;
    s.response = r;
    s.r2_folds = static_cast<int>(r2s.size());
    s.mean_r2 = r2s.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(r2s);
    s.std_r2 = r2s.size() >= 2 ? std_dev(r2s) : 0;
    s.mean_rmse = mean(rmses);
    s.std_rmse = rmses.size() >= 2 ? std_dev(rmses) : 0;
    report.summary.push_back(s);
  }
  return report;
}

void write_metrics_csv(const std::filesystem::path& path, const std::string& model,
                       const std::vector<MetricsRow>& rows, bool append) {
  const bool header = !append || !std::filesystem::exists(path) ||
                      std::filesystem::file_size(path) == 0;
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  if (header) out << "model,parameter,r2,rmse,std_test,std_model\n";
  for (const auto& r : rows) {
    out << model << ',' << response_name(r.response) << ',' << csv::format_exact(r.r2) << ','
        << csv::format_exact(r.rmse) << ',' << csv::format_exact(r.std_test) << ','
        << csv::format_exact(r.std_model) << '\n';
  }
}

std::vector<PredictionRow> prediction_rows(const Eigen::MatrixXd& y_true,
                                           const Eigen::MatrixXd& y_pred,
                                           const std::string& model) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols()) {
    throw ShapeError("prediction and target matrices differ in shape");
  }
  std::vector<PredictionRow> rows;
  for (auto r : kAllResponses) {
    const auto c = static_cast<Eigen::Index>(index_of(r));
    const auto pe = percent_errors(column(y_true, c), column(y_pred, c));
    for (Eigen::Index i = 0; i < y_true.rows(); ++i) {
      rows.push_back({static_cast<std::size_t>(i) + 1, r, y_true(i, c), y_pred(i, c),
                      pe[static_cast<std::size_t>(i)], model});
    }
  }
  return rows;
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRow>& rows) {
  csv::Writer out(path);
  out.row({"sample", "response", "actual", "predicted", "percent_error", "model"});
  for (const auto& r : rows) {
    out.row({std::to_string(r.sample), std::string(response_name(r.response)),
             csv::format_number(r.actual), csv::format_exact(r.predicted),
             csv::format_exact(r.percent_error), r.model});
  }
}

void write_cv_csv(const std::filesystem::path& path, const CvReport& report) {
  csv::Writer out(path);
  out.row({"repeat", "fold", "parameter", "r2", "rmse"});
  for (const auto& fm : report.folds) {
    for (const auto& row : fm.rows) {
      out.row({std::to_string(fm.repeat), std::to_string(fm.fold),
               std::string(response_name(row.response)),
               std::isfinite(row.r2) ? csv::format_exact(row.r2) : "nan",
               csv::format_exact(row.rmse)});
    }
  }
}

}  // namespace weldgeom
