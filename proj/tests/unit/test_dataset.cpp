#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "test_support.hpp"
#include "weldgeom/csv.hpp"
#include "weldgeom/dataset.hpp"
#include "weldgeom/error.hpp"

namespace weldgeom {
namespace {

constexpr const char* kHeader = "T,I,V,S,W,P,TH,L\n";

TEST(LoadCsv, ShippedTrainingFile) {
  const auto train = load_csv(test::data_dir() / "train.csv");
  ASSERT_EQ(train.size(), 53u);
  EXPECT_EQ(train.front(), (WeldRecord{10, 310, 28, 9.25, 4.7, 1.8, 4.2, 4.9}));
  EXPECT_EQ(train, canonical_training_records());
}

TEST(LoadCsv, ShippedTestFile) {
  const auto test = load_csv(test::data_dir() / "test.csv");
  ASSERT_EQ(test.size(), 10u);
  EXPECT_EQ(test.front(), (WeldRecord{10, 280, 28, 6, 5.5, 2.2, 4.5, 5.2}));
  EXPECT_EQ(test, canonical_test_records());
}

TEST(LoadCsv, TrainingColumnMeans) {
  // Fixture computed independently from the published table.
  const double expected[8] = {5.679245283018868, 218.22641509433961, 28.11320754716981,
                              6.533018867924528, 5.035849056603771,  1.635849056603774,
                              4.586792452830187, 4.749056603773586};
  const auto& train = canonical_training_records();
  for (int c = 0; c < 8; ++c) {
    double sum = 0;
    for (const auto& r : train) sum += r.value(static_cast<Column>(c));
    EXPECT_NEAR(sum / 53.0, expected[c], 1e-12) << column_name(static_cast<Column>(c));
  }
}

TEST(LoadCsv, MissingFile) {
  EXPECT_THROW(load_csv("/nonexistent/weld.csv"), DataError);
}

TEST(ParseCsv, EmptyInput) {
  try {
    parse_csv("");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no data rows"), std::string::npos);
  }
  EXPECT_THROW(parse_csv(kHeader), DataError);
}

TEST(ParseCsv, AcceptsCrlfAndBom) {
  const auto rows =
      parse_csv("\xEF\xBB\xBFT,I,V,S,W,P,TH,L\r\n3,125,18,3.25,1,1,1,1\r\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].speed_mm_s, 3.25);
}

TEST(ParseCsv, BadHeader) {
  EXPECT_THROW(parse_csv("T,I,V,S,W,P,L,TH\n1,1,1,1,1,1,1,1\n"), DataError);
}

TEST(ParseCsv, WrongArityNamesRow) {
  try {
    parse_csv(std::string(kHeader) + "1,1,1,1,1,1,1,1\n1,1,1\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(ParseCsv, NonNumericCellNamesRow) {
  try {
    parse_csv(std::string(kHeader) + "1,1,x,1,1,1,1,1\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(ParseCsv, NonPositiveValueRejected) {
  EXPECT_THROW(parse_csv(std::string(kHeader) + "1,1,1,1,0,1,1,1\n"), DataError);
  EXPECT_THROW(parse_csv(std::string(kHeader) + "1,-2,1,1,1,1,1,1\n"), DataError);
}

TEST(WriteCsv, RoundTrip) {
  const auto dir = test::scratch_dir("dataset_roundtrip");
  write_csv(dir / "t.csv", canonical_training_records());
  EXPECT_EQ(load_csv(dir / "t.csv"), canonical_training_records());
}

TEST(FitScaler, TrainingExtrema) {
  const auto p = fit_scaler(canonical_training_records(), kInputColumns);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p.columns[0].x_min, 3);
  EXPECT_EQ(p.columns[0].x_max, 10);
  EXPECT_EQ(p.columns[1].x_min, 125);
  EXPECT_EQ(p.columns[1].x_max, 310);
  EXPECT_EQ(p.columns[2].x_min, 18);
  EXPECT_EQ(p.columns[2].x_max, 36);
  EXPECT_EQ(p.columns[3].x_min, 3.25);
  EXPECT_EQ(p.columns[3].x_max, 9.25);
}

TEST(FitScaler, ConstantColumnRejected) {
  std::vector<WeldRecord> rows(3, WeldRecord{1, 2, 3, 4, 5, 6, 7, 8});
  rows[1].current_a = 5;
  const Column t[] = {Column::T};
  EXPECT_THROW(fit_scaler(rows, t), DataError);
  const Column i[] = {Column::I};
  EXPECT_NO_THROW(fit_scaler(rows, i));
}

TEST(FitScaler, EmptyInputRejected) {
  EXPECT_THROW(fit_scaler(std::vector<WeldRecord>{}, kInputColumns), DataError);
}

TEST(Transform, Examples) {
  ScalerParams current{{{125, 310}}};
  EXPECT_EQ(transform(current, 0, 125), 0.0);
  EXPECT_EQ(transform(current, 0, 217.5), 0.5);
  EXPECT_EQ(inverse_transform(current, 0, 0.0), 125);
  ScalerParams thickness{{{3, 10}}};
  EXPECT_EQ(transform(thickness, 0, 10), 1.0);
  EXPECT_DOUBLE_EQ(inverse_transform(thickness, 0, 1.5), 13.5);
  EXPECT_LT(transform(thickness, 0, 1), 0.0);  // no clipping
}

TEST(Transform, UnfittedScaler) {
  EXPECT_THROW(transform(ScalerParams{}, 0, 1.0), Error);
}

TEST(Transform, RoundTripEveryTrainingValue) {
  const auto& train = canonical_training_records();
  const auto p = fit_scaler(train, kInputColumns);
  const Eigen::MatrixXd x = input_matrix(train);
  const Eigen::MatrixXd back = inverse_transform(p, transform(p, x));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      EXPECT_LE(std::abs(back(i, c) - x(i, c)), 1e-12 * std::max(1.0, std::abs(x(i, c))));
    }
  }
}

TEST(Transform, RoundTripProperty) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> lo(-1e3, 1e3), width(1e-3, 1e3), x(-1e4, 1e4);
  for (int k = 0; k < 2000; ++k) {
    const double a = lo(gen);
    ScalerParams p{{{a, a + width(gen)}}};
    const double v = x(gen);
    EXPECT_LE(std::abs(inverse_transform(p, 0, transform(p, 0, v)) - v),
              1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST(Transform, ExtremaMapExactly) {
  const auto& train = canonical_training_records();
  const auto p = fit_scaler(train, kInputColumns);
  const Eigen::MatrixXd s = transform(p, input_matrix(train));
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    EXPECT_EQ(s.col(c).minCoeff(), 0.0);
    EXPECT_EQ(s.col(c).maxCoeff(), 1.0);
  }
}

TEST(Transform, TestRowUsesTrainingExtrema) {
  const auto p = fit_scaler(canonical_training_records(), kInputColumns);
  const auto x = canonical_test_records().front().inputs();
  EXPECT_DOUBLE_EQ(transform(p, 0, x[0]), 1.0);
  EXPECT_NEAR(transform(p, 1, x[1]), 155.0 / 185.0, 1e-15);
  EXPECT_NEAR(transform(p, 2, x[2]), 10.0 / 18.0, 1e-15);
  EXPECT_NEAR(transform(p, 3, x[3]), 2.75 / 6.0, 1e-15);
}

TEST(TargetTransform, IdentityByDefault) {
  const TargetTransform t;
  EXPECT_FALSE(t.enabled());
  EXPECT_EQ(t.inverse(0, 4.2), 4.2);
}

TEST(TargetTransform, RoundTrip) {
  const auto& train = canonical_training_records();
  const auto t = TargetTransform::fit(train);
  const Eigen::MatrixXd y = response_matrix(train);
  EXPECT_LE((t.inverse(t.forward(y)) - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RandomSplit, NinetyTen) {
  std::vector<WeldRecord> all = canonical_training_records();
  all.insert(all.end(), canonical_test_records().begin(), canonical_test_records().end());
  const auto split = random_split(all, 0.1, 5);
  EXPECT_EQ(split.test.size(), 6u);
  EXPECT_EQ(split.train.size() + split.test.size(), all.size());
  std::multiset<double> seen;
  for (const auto& r : split.train) seen.insert(r.width_mm * 1000 + r.current_a);
  for (const auto& r : split.test) seen.insert(r.width_mm * 1000 + r.current_a);
  std::multiset<double> expected;
  for (const auto& r : all) expected.insert(r.width_mm * 1000 + r.current_a);
  EXPECT_EQ(seen, expected);
  const auto again = random_split(all, 0.1, 5);
  EXPECT_EQ(again.test, split.test);
}

TEST(ParseResponse, NamesAndSymbols) {
  EXPECT_EQ(parse_response("throat"), Response::Throat);
  EXPECT_EQ(parse_response("TH"), Response::Throat);
  EXPECT_THROW(parse_response("depth"), ConfigError);
}

TEST(CsvNumbers, FormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 5.70231832, -1e-300, 12345.678}) {
    double back = 0;
    ASSERT_TRUE(csv::parse_number(csv::format_number(v), back));
    EXPECT_EQ(back, v);
    ASSERT_TRUE(csv::parse_number(csv::format_exact(v), back));
    EXPECT_EQ(back, v);
  }
}

}  // namespace
}  // namespace weldgeom
