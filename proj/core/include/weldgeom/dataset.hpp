#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace weldgeom {

inline constexpr std::size_t kNumInputs = 4;
inline constexpr std::size_t kNumResponses = 4;

enum class Response { Width, Penetration, Throat, Leg };

inline constexpr std::array<Response, kNumResponses> kAllResponses = {
    Response::Width, Response::Penetration, Response::Throat, Response::Leg};

// Column order of the CSV files: the four process inputs then the four
// bead-geometry responses.
enum class Column { T, I, V, S, W, P, TH, L };

inline constexpr std::array<Column, kNumInputs> kInputColumns = {
    Column::T, Column::I, Column::V, Column::S};
inline constexpr std::array<Column, kNumResponses> kResponseColumns = {
    Column::W, Column::P, Column::TH, Column::L};

std::string_view column_name(Column c);
std::string_view response_name(Response r);  // "width", "penetration", ...
std::string_view response_symbol(Response r);  // "W", "P", "TH", "L"
Response parse_response(std::string_view name);
std::size_t index_of(Response r);

using InputVector = std::array<double, kNumInputs>;
using ResponseVector = std::array<double, kNumResponses>;

// One fillet-weld experiment in physical units (mm, A, V, mm/s).
struct WeldRecord {
  double thickness_mm = 0;
  double current_a = 0;
  double voltage_v = 0;
  double speed_mm_s = 0;
  double width_mm = 0;
  double penetration_mm = 0;
  double throat_mm = 0;
  double leg_mm = 0;

  double value(Column c) const;
  double response(Response r) const;
  InputVector inputs() const;
  ResponseVector responses() const;

  friend bool operator==(const WeldRecord&, const WeldRecord&) = default;
};

// Throws DataError unless every field is strictly positive and finite.
void validate(const WeldRecord& record);

// The published training (53 rows) and test (10 rows) experiments.
const std::vector<WeldRecord>& canonical_training_records();
const std::vector<WeldRecord>& canonical_test_records();

// CSV with header `T,I,V,S,W,P,TH,L`. LF or CRLF line endings.
std::vector<WeldRecord> load_csv(const std::filesystem::path& path);
std::vector<WeldRecord> parse_csv(std::string_view text);
void write_csv(const std::filesystem::path& path,
               std::span<const WeldRecord> records);

// N x 4 matrices in (T, I, V, S) and (W, P, TH, L) order.
Eigen::MatrixXd input_matrix(std::span<const WeldRecord> records);
Eigen::MatrixXd response_matrix(std::span<const WeldRecord> records);

struct DataSplit {
  std::vector<WeldRecord> train;
  std::vector<WeldRecord> test;
  std::uint64_t seed = 0;
};

// Seeded shuffle then split; test size is round(n * test_fraction), at least 1.
DataSplit random_split(std::span<const WeldRecord> records,
                       double test_fraction, std::uint64_t seed);

// Min-max scaling parameters. transform maps [x_min, x_max] of each column
// onto [range_min, range_max]; values outside the fitted extrema extrapolate
// linearly (no clipping).
struct ColumnRange {
  double x_min = 0;
  double x_max = 0;
};

struct ScalerParams {
  std::vector<ColumnRange> columns;
  double range_min = 0.0;
  double range_max = 1.0;

  bool fitted() const { return !columns.empty(); }
  std::size_t size() const { return columns.size(); }
};

ScalerParams fit_scaler(std::span<const WeldRecord> records,
                        std::span<const Column> columns);
ScalerParams fit_scaler(const Eigen::MatrixXd& data);

double transform(const ScalerParams& params, std::size_t column, double x);
double inverse_transform(const ScalerParams& params, std::size_t column,
                         double scaled);
Eigen::MatrixXd transform(const ScalerParams& params,
                          const Eigen::MatrixXd& data);
Eigen::MatrixXd inverse_transform(const ScalerParams& params,
                                  const Eigen::MatrixXd& scaled);

// Optional min-max transform of the four response columns. Default-constructed
// it is the identity (targets stay in mm).
class TargetTransform {
 public:
  TargetTransform() = default;
  static TargetTransform fit(std::span<const WeldRecord> train);
  static TargetTransform from_params(ScalerParams params);

  bool enabled() const { return params_.fitted(); }
  const ScalerParams& params() const { return params_; }

  // mm -> model space
  Eigen::MatrixXd forward(const Eigen::MatrixXd& responses_mm) const;
  // model space -> mm
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& responses_model) const;
  double inverse(std::size_t response, double value) const;

 private:
  ScalerParams params_;
};

}  // namespace weldgeom
