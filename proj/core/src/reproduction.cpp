#include "weldgeom/reproduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "weldgeom/csv.hpp"
#include "weldgeom/linmodel.hpp"

namespace weldgeom {
namespace {

using enum FeatureScheme;
using enum Response;

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

}  // namespace

const std::vector<PublishedMetrics>& published_mlr_metrics() {
  static const std::vector<PublishedMetrics> table = {
      {Linear, Width, 0.825, 0.182, 0.484, 0.379},
      {Linear, Penetration, 0.969, 0.062, 0.248, 0.255},
      {Linear, Throat, 0.432, 0.251, 0.254, 0.210},
      {Linear, Leg, 0.724, 0.182, 0.249, 0.238},
      {Interactive, Width, 0.9905, 0.0673, 0.484, 0.4703},
      {Interactive, Penetration, 0.9199, 0.1006, 0.248, 0.2029},
      {Interactive, Throat, 0.9585, 0.0746, 0.254, 0.2274},
      {Interactive, Leg, 0.9793, 0.0542, 0.249, 0.2640},
      {Full, Width, 0.9884, 0.0770, 0.484, 0.5014},
      {Full, Penetration, 0.9697, 0.0673, 0.248, 0.2114},
      {Full, Throat, 0.9483, 0.0822, 0.254, 0.2268},
      {Full, Leg, 0.9823, 0.0524, 0.249, 0.2689},
  };
  return table;
}

const std::vector<PublishedMetrics>& published_ann_metrics() {
  static const std::vector<PublishedMetrics> table = {
      {Linear, Width, 0.979, 0.099, 0.484, 0.451},
      {Linear, Penetration, 0.923, 0.100, 0.248, 0.198},
      {Linear, Throat, 0.908, 0.106, 0.254, 0.229},
      {Linear, Leg, 0.942, 0.087, 0.249, 0.257},
      {Interactive, Width, 0.9562, 0.1427, 0.484, 0.4466},
      {Interactive, Penetration, 0.8295, 0.1388, 0.248, 0.2132},
      {Interactive, Throat, 0.8849, 0.1191, 0.254, 0.2357},
      {Interactive, Leg, 0.9222, 0.0989, 0.249, 0.2092},
      {Full, Width, 0.9510, 0.1715, 0.484, 0.544},
      {Full, Penetration, 0.9079, 0.1043, 0.248, 0.2177},
      {Full, Throat, 0.9001, 0.1208, 0.254, 0.2771},
      {Full, Leg, 0.9535, 0.1059, 0.249, 0.3126},
  };
  return table;
}

bool CellComparison::within() const {
  return tolerance <= 0 || std::abs(computed - published) <= tolerance;
}

std::string ReproductionRun::label() const {
  return std::string(order_name(order)) + (scale_targets ? ", scaled targets" : ", mm targets");
}

std::size_t ReproductionRun::gated_cells() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.tolerance > 0; }));
}

std::size_t ReproductionRun::gated_within() const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [](const auto& c) { return c.tolerance > 0 && c.within(); }));
}

bool ReproductionRun::max_error_within(const ReproductionTolerance& tol) const {
  return std::abs(max_width_error_pct - kPublishedMaxWidthErrorPct) <= tol.max_error_pp;
}

ReproductionRun reproduce_published_mlr(std::span<const WeldRecord> train,
                                        std::span<const WeldRecord> test,
                                        ExpansionOrder order, bool scale_targets,
                                        const ReproductionTolerance& tol) {
  ReproductionRun run;
  run.order = order;
  run.scale_targets = scale_targets;
  const Eigen::MatrixXd truth = response_matrix(test);
  for (auto scheme : kAllSchemes) {
    const auto predictor = MlrPredictor::published(train, scheme, order, scale_targets);
    const Eigen::MatrixXd pred = predictor.predict(test);
    const auto rows = metrics_table(truth, pred);
    for (const auto& row : rows) {
      run.rows.push_back(row);
      const auto& pub = *std::find_if(
          published_mlr_metrics().begin(), published_mlr_metrics().end(),
          [&](const auto& p) { return p.scheme == scheme && p.response == row.response; });
      run.cells.push_back({scheme, row.response, "r2", pub.r2, row.r2, tol.r2});
      run.cells.push_back({scheme, row.response, "rmse", pub.rmse, row.rmse, tol.rmse_mm});
      run.cells.push_back({scheme, row.response, "std_test", pub.std_test, row.std_test, 0});
      run.cells.push_back({scheme, row.response, "std_model", pub.std_model, row.std_model, 0});
    }
    const auto c = static_cast<Eigen::Index>(index_of(Response::Width));
    const auto errors =
        percent_errors({truth.col(c).data(), static_cast<std::size_t>(truth.rows())},
                       {pred.col(c).data(), static_cast<std::size_t>(pred.rows())});
    for (double e : errors) run.max_width_error_pct = std::max(run.max_width_error_pct, std::abs(e));
  }
  return run;
}

std::string reproduction_notes(const std::vector<ReproductionRun>& runs,
                               const ReproductionTolerance& tol) {
  std::ostringstream out;
  out << "# Reproduction notes: published MLR equations on the test set\n\n"
      << "Tolerances: R^2 +/-" << tol.r2 << ", RMSE +/-" << tol.rmse_mm
      << " mm, max width error +/-" << tol.max_error_pp << " percentage points.\n"
      << "STD columns are informational (no tolerance).\n";
  for (const auto& run : runs) {
    out << "\n## " << run.label() << "\n\n"
        << run.gated_within() << " of " << run.gated_cells()
        << " R^2/RMSE cells within tolerance.\n"
        << "Max |width error| " << fixed(run.max_width_error_pct, 2) << "% (published "
        << kPublishedMaxWidthErrorPct << "%): "
        << (run.max_error_within(tol) ? "within" : "OUTSIDE") << " tolerance.\n\n";
    bool any = false;
    for (const auto& c : run.cells) {
      if (c.within()) continue;
      if (!any) {
        out << "| scheme | parameter | metric | published | computed | diff |\n"
            << "|---|---|---|---|---|---|\n";
        any = true;
      }
      out << "| " << scheme_name(c.scheme) << " | " << response_name(c.response) << " | "
          << c.metric << " | " << c.published << " | " << fixed(c.computed, 4) << " | "
          << fixed(c.computed - c.published, 4) << " |\n";
    }
    if (!any) out << "No discrepancies beyond tolerance.\n";
  }
  return out.str();
}

void write_reproduction_csv(const std::filesystem::path& path,
                            const std::vector<ReproductionRun>& runs) {
  csv::Writer out(path);
  out.row({"convention", "scheme", "parameter", "metric", "published", "computed", "tolerance",
           "within"});
  for (const auto& run : runs) {
    for (const auto& c : run.cells) {
      out.row({run.label(), std::string(scheme_name(c.scheme)),
               std::string(response_name(c.response)), c.metric, csv::format_number(c.published),
               csv::format_exact(c.computed), csv::format_number(c.tolerance),
               c.within() ? "yes" : "no"});
    }
  }
}

}  // namespace weldgeom
