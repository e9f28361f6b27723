#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "weldgeom/dataset.hpp"
#include "weldgeom/evaluation.hpp"
#include "weldgeom/features.hpp"

namespace weldgeom {

// Reported test-set statistics for one (scheme, response) cell.
struct PublishedMetrics {
  FeatureScheme scheme;
  Response response;
  double r2;
  double rmse;
  double std_test;
  double std_model;
};

const std::vector<PublishedMetrics>& published_mlr_metrics();
const std::vector<PublishedMetrics>& published_ann_metrics();

// Largest reported |percentage error| among the MLR width predictions.
inline constexpr double kPublishedMaxWidthErrorPct = 14.2;

struct ReproductionTolerance {
  double r2 = 0.05;
  double rmse_mm = 0.02;
  double max_error_pp = 2.0;
};

struct CellComparison {
  FeatureScheme scheme;
  Response response;
  std::string metric;  // "r2", "rmse", "std_test", "std_model"
  double published;
  double computed;
  double tolerance;  // 0 for informational metrics

  bool within() const;
};

// Evaluation of the twelve published equations on the test data under one
// preprocessing convention.
struct ReproductionRun {
  ExpansionOrder order = ExpansionOrder::ExpandThenScale;
  bool scale_targets = false;
  std::vector<MetricsRow> rows;  // scheme-major, response-minor (12 rows)
  std::vector<CellComparison> cells;
  double max_width_error_pct = 0;

  std::string label() const;
  std::size_t gated_cells() const;
  std::size_t gated_within() const;
  bool max_error_within(const ReproductionTolerance& tol) const;
};

ReproductionRun reproduce_published_mlr(std::span<const WeldRecord> train,
                                        std::span<const WeldRecord> test,
                                        ExpansionOrder order, bool scale_targets,
                                        const ReproductionTolerance& tol = {});

// Markdown notes listing every gated cell outside tolerance, per run.
std::string reproduction_notes(const std::vector<ReproductionRun>& runs,
                               const ReproductionTolerance& tol = {});
void write_reproduction_csv(const std::filesystem::path& path,
                            const std::vector<ReproductionRun>& runs);

}  // namespace weldgeom
