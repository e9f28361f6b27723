#include "weldgeom/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "weldgeom/csv.hpp"
#include "weldgeom/error.hpp"
#include "weldgeom/rng.hpp"

namespace weldgeom {
namespace {

constexpr std::array<std::string_view, 8> kColumnNames = {"T", "I",  "V", "S",
                                                          "W", "P", "TH", "L"};
constexpr std::array<std::string_view, kNumResponses> kResponseNames = {
    "width", "penetration", "throat", "leg"};

void check_columns(const ScalerParams& params, std::size_t column) {
  WELDGEOM_REQUIRE(params.fitted(), Error, "scaler is not fitted");
  if (column >= params.size()) {
    throw ShapeError("scaler has " + std::to_string(params.size()) +
                     " columns, column " + std::to_string(column) + " requested");
  }
}

ColumnRange range_of(const Eigen::VectorXd& col, std::size_t index) {
  const ColumnRange r{col.minCoeff(), col.maxCoeff()};
  if (!(r.x_max > r.x_min)) {
    throw DataError("column " + std::to_string(index) +
                    " is constant; min-max scaling is undefined");
  }
  return r;
}

}  // namespace

std::string_view column_name(Column c) { return kColumnNames[static_cast<int>(c)]; }

std::string_view response_name(Response r) {
  return kResponseNames[static_cast<int>(r)];
}

std::string_view response_symbol(Response r) {
  return column_name(kResponseColumns[static_cast<int>(r)]);
}

std::size_t index_of(Response r) { return static_cast<std::size_t>(r); }

Response parse_response(std::string_view name) {
  for (auto r : kAllResponses) {
    if (name == response_name(r) || name == response_symbol(r)) return r;
  }
  throw ConfigError("unknown response '" + std::string(name) +
                    "' (expected width|penetration|throat|leg)");
}

double WeldRecord::value(Column c) const {
  switch (c) {
    case Column::T: return thickness_mm;
    case Column::I: return current_a;
    case Column::V: return voltage_v;
    case Column::S: return speed_mm_s;
    case Column::W: return width_mm;
    case Column::P: return penetration_mm;
    case Column::TH: return throat_mm;
    case Column::L: return leg_mm;
  }
  return 0;
}

double WeldRecord::response(Response r) const {
  return value(kResponseColumns[index_of(r)]);
}

InputVector WeldRecord::inputs() const {
  return {thickness_mm, current_a, voltage_v, speed_mm_s};
}

ResponseVector WeldRecord::responses() const {
  return {width_mm, penetration_mm, throat_mm, leg_mm};
}

void validate(const WeldRecord& record) {
  for (std::size_t c = 0; c < kColumnNames.size(); ++c) {
    const double v = record.value(static_cast<Column>(c));
    if (!std::isfinite(v) || v <= 0) {
      throw DataError("column " + std::string(kColumnNames[c]) +
                      " must be strictly positive, got " + csv::format_number(v));
    }
  }
}

std::vector<WeldRecord> parse_csv(std::string_view text) {
  std::vector<WeldRecord> records;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      // Tolerate a UTF-8 byte-order mark.
      if (line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
      const auto cells = csv::split(line);
      bool ok = cells.size() == kColumnNames.size();
      for (std::size_t c = 0; ok && c < cells.size(); ++c) {
        ok = csv::trim(cells[c]) == kColumnNames[c];
      }
      if (!ok) {
        throw DataError("line 1: header must be T,I,V,S,W,P,TH,L, got '" +
                        std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    if (csv::trim(line).empty()) continue;
    const auto cells = csv::split(line);
    const auto row = "row " + std::to_string(records.size() + 1) + " (line " +
                     std::to_string(line_no) + ")";
    if (cells.size() != kColumnNames.size()) {
      throw DataError(row + ": expected 8 cells, got " + std::to_string(cells.size()));
    }
    std::array<double, 8> v{};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!csv::parse_number(cells[c], v[c])) {
        throw DataError(row + ": column " + std::string(kColumnNames[c]) +
                        " is not a number: '" + cells[c] + "'");
      }
    }
    WeldRecord rec{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    try {
      validate(rec);
    } catch (const DataError& e) {
      throw DataError(row + ": " + e.what());
    }
    records.push_back(rec);
  }
  if (!header_seen) throw DataError("no data rows (file is empty)");
  if (records.empty()) throw DataError("no data rows");
  return records;
}

std::vector<WeldRecord> load_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError("data file not found: " + path.string());
  }
  try {
    return parse_csv(csv::read_text(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_csv(const std::filesystem::path& path, std::span<const WeldRecord> records) {
  csv::Writer out(path);
  out.row({kColumnNames.begin(), kColumnNames.end()});
  for (const auto& r : records) {
    std::vector<std::string> cells;
    for (std::size_t c = 0; c < kColumnNames.size(); ++c) {
      cells.push_back(csv::format_number(r.value(static_cast<Column>(c))));
    }
    out.row(cells);
  }
}

Eigen::MatrixXd input_matrix(std::span<const WeldRecord> records) {
  Eigen::MatrixXd m(records.size(), kNumInputs);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto x = records[i].inputs();
    for (std::size_t c = 0; c < kNumInputs; ++c) m(i, c) = x[c];
  }
  return m;
}

Eigen::MatrixXd response_matrix(std::span<const WeldRecord> records) {
  Eigen::MatrixXd m(records.size(), kNumResponses);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto y = records[i].responses();
    for (std::size_t c = 0; c < kNumResponses; ++c) m(i, c) = y[c];
  }
  return m;
}

DataSplit random_split(std::span<const WeldRecord> records, double test_fraction,
                       std::uint64_t seed) {
  WELDGEOM_REQUIRE(test_fraction > 0 && test_fraction < 1, ConfigError,
                   "test fraction must be in (0, 1)");
  WELDGEOM_REQUIRE(records.size() >= 2, DataError, "need at least two records to split");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x53504c4954ULL));
  rng.shuffle(order.begin(), order.end());
  auto n_test = static_cast<std::size_t>(
      std::lround(test_fraction * static_cast<double>(records.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, records.size() - 1);
  DataSplit split;
  split.seed = seed;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_test ? split.test : split.train).push_back(records[order[k]]);
  }
  return split;
}

ScalerParams fit_scaler(std::span<const WeldRecord> records,
                        std::span<const Column> columns) {
  WELDGEOM_REQUIRE(!records.empty(), DataError, "cannot fit a scaler on no records");
  WELDGEOM_REQUIRE(!columns.empty(), ConfigError, "no columns selected for scaling");
  ScalerParams params;
  for (auto c : columns) {
    Eigen::VectorXd col(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) col(i) = records[i].value(c);
    try {
      params.columns.push_back(range_of(col, params.columns.size()));
    } catch (const DataError&) {
      throw DataError("column " + std::string(column_name(c)) +
                      " is constant; min-max scaling is undefined");
    }
  }
  return params;
}

ScalerParams fit_scaler(const Eigen::MatrixXd& data) {
  WELDGEOM_REQUIRE(data.rows() > 0 && data.cols() > 0, DataError,
                   "cannot fit a scaler on an empty matrix");
  ScalerParams params;
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    params.columns.push_back(range_of(data.col(c), static_cast<std::size_t>(c)));
  }
  return params;
}

double transform(const ScalerParams& params, std::size_t column, double x) {
  check_columns(params, column);
  const auto& r = params.columns[column];
  const double std_value = (x - r.x_min) / (r.x_max - r.x_min);
  return std_value * (params.range_max - params.range_min) + params.range_min;
}

double inverse_transform(const ScalerParams& params, std::size_t column,
                         double scaled) {
  check_columns(params, column);
  const auto& r = params.columns[column];
  const double std_value =
      (scaled - params.range_min) / (params.range_max - params.range_min);
  return std_value * (r.x_max - r.x_min) + r.x_min;
}

Eigen::MatrixXd transform(const ScalerParams& params, const Eigen::MatrixXd& data) {
  WELDGEOM_REQUIRE(params.fitted(), Error, "scaler is not fitted");
  if (static_cast<std::size_t>(data.cols()) != params.size()) {
    throw ShapeError("scaler has " + std::to_string(params.size()) +
                     " columns, matrix has " + std::to_string(data.cols()));
  }
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      out(i, c) = transform(params, static_cast<std::size_t>(c), data(i, c));
    }
  }
  return out;
}

Eigen::MatrixXd inverse_transform(const ScalerParams& params,
                                  const Eigen::MatrixXd& scaled) {
  WELDGEOM_REQUIRE(params.fitted(), Error, "scaler is not fitted");
  if (static_cast<std::size_t>(scaled.cols()) != params.size()) {
    throw ShapeError("scaler has " + std::to_string(params.size()) +
                     " columns, matrix has " + std::to_string(scaled.cols()));
  }
  Eigen::MatrixXd out(scaled.rows(), scaled.cols());
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
      out(i, c) = inverse_transform(params, static_cast<std::size_t>(c), scaled(i, c));
    }
  }
  return out;
}

TargetTransform TargetTransform::fit(std::span<const WeldRecord> train) {
  return from_params(fit_scaler(train, kResponseColumns));
}

TargetTransform TargetTransform::from_params(ScalerParams params) {
  if (params.fitted() && params.size() != kNumResponses) {
    throw ShapeError("target scaler must cover the four responses");
  }
  TargetTransform t;
  t.params_ = std::move(params);
  return t;
}

Eigen::MatrixXd TargetTransform::forward(const Eigen::MatrixXd& responses_mm) const {
  return enabled() ? transform(params_, responses_mm) : responses_mm;
}

Eigen::MatrixXd TargetTransform::inverse(const Eigen::MatrixXd& responses_model) const {
  return enabled() ? inverse_transform(params_, responses_model) : responses_model;
}

double TargetTransform::inverse(std::size_t response, double value) const {
  return enabled() ? inverse_transform(params_, response, value) : value;
}

}  // namespace weldgeom
