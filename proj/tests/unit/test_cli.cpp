#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "test_support.hpp"
#include "weldgeom/csv.hpp"

namespace weldgeom {
namespace {

namespace fs = std::filesystem;
using namespace std::string_literals;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "weldgeom");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> base(const std::string& command, const fs::path& out) {
  return {command, "--data-dir", test::data_dir().string(), "--out-dir", out.string()};
}

std::vector<std::string> with(std::vector<std::string> args,
                              std::initializer_list<std::string> more) {
  args.insert(args.end(), more);
  return args;
}

std::size_t line_count(const fs::path& p) {
  const auto text = csv::read_text(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string first_line(const fs::path& p) {
  const auto text = csv::read_text(p);
  return text.substr(0, text.find('\n'));
}

// Every file in `a` except the manifest has a byte-identical twin in `b`.
void expect_same_outputs(const fs::path& a, const fs::path& b) {
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.txt") continue;
    const auto twin = b / fs::relative(e.path(), a);
    ASSERT_TRUE(fs::exists(twin)) << twin;
    EXPECT_EQ(csv::read_text(e.path()), csv::read_text(twin)) << e.path();
    ++compared;
  }
  EXPECT_GT(compared, 0u);
}

TEST(CliFitMlr, DefaultRunWritesTwelveModelsAndTable) {
  const auto dir = test::scratch_dir("cli_fit_default");
  const auto r = run_cli(base("fit-mlr", dir));
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t models = 0;
  for (const auto& e : fs::directory_iterator(dir / "models")) models += e.is_regular_file();
  EXPECT_EQ(models, 12u);
  EXPECT_EQ(line_count(dir / "mlr_table_refit.csv"), 5u);
  EXPECT_EQ(first_line(dir / "mlr_table_refit.csv").substr(0, 23), "parameter,linear_r2,lin");
  EXPECT_EQ(line_count(dir / "mlr_metrics.csv"), 25u);
  EXPECT_EQ(line_count(dir / "mlr_predictions.csv"), 1u + 6 * 40);
  EXPECT_TRUE(fs::exists(dir / "manifest.txt"));
}

TEST(CliFitMlr, SingleModel) {
  const auto dir = test::scratch_dir("cli_fit_single");
  const auto r = run_cli(with(base("fit-mlr", dir), {"--scheme", "linear", "--response", "width"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "models" / "mlr_linear_width.txt"));
  EXPECT_EQ(std::distance(fs::directory_iterator(dir / "models"), fs::directory_iterator{}), 1);
  EXPECT_NE(r.out.find("mlr-linear-refit width: R2="), std::string::npos) << r.out;
}

TEST(CliFitMlr, PublishedCoefficientsSkipFitting) {
  const auto dir = test::scratch_dir("cli_fit_published");
  const auto r = run_cli(with(base("fit-mlr", dir), {"--published-coefficients"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(dir / "mlr_table_refit.csv"));
  EXPECT_FALSE(fs::exists(dir / "models" / "mlr_full_width.txt"));
  EXPECT_TRUE(fs::exists(dir / "models" / "mlr_full_width_published.txt"));
  EXPECT_EQ(r.out.find("refit"), std::string::npos);
  EXPECT_NE(r.out.find("mlr-linear-published width: R2=0.5844"), std::string::npos) << r.out;
}

TEST(CliFitMlr, Idempotent) {
  const auto a = test::scratch_dir("cli_fit_idem_a"), b = test::scratch_dir("cli_fit_idem_b");
  ASSERT_EQ(run_cli(base("fit-mlr", a)).code, 0);
  ASSERT_EQ(run_cli(base("fit-mlr", b)).code, 0);
  expect_same_outputs(a, b);
}

TEST(CliErrors, MissingDataAndBadValues) {
  const auto dir = test::scratch_dir("cli_errors");
  auto r = run_cli({"fit-mlr", "--data-dir", (dir / "nowhere").string(), "--out-dir", dir.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("data file not found"), std::string::npos) << r.err;
  r = run_cli(with(base("fit-mlr", dir), {"--scheme", "cubic"}));
  EXPECT_NE(r.code, 0);
  r = run_cli(with(base("fit-mlr", dir), {"--bogus"}));
  EXPECT_NE(r.code, 0);
  r = run_cli({});
  EXPECT_NE(r.code, 0);
}

TEST(CliTrainAnn, SeedIsMandatory) {
  const auto dir = test::scratch_dir("cli_ann_noseed");
  const auto r = run_cli(base("train-ann", dir));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST(CliTrainAnn, HistoryRowsAndDeterminism) {
  const auto a = test::scratch_dir("cli_ann_a"), b = test::scratch_dir("cli_ann_b");
  const auto args = {"--scheme"s, "linear"s, "--epochs"s, "250"s, "--seed"s, "11"s};
  ASSERT_EQ(run_cli(with(base("train-ann", a), args)).code, 0);
  ASSERT_EQ(run_cli(with(base("train-ann", b), args)).code, 0);
  EXPECT_EQ(line_count(a / "ann_linear_history.csv"), 251u);
  EXPECT_EQ(first_line(a / "ann_linear_history.csv"), "epoch,train_mae,val_mae");
  EXPECT_EQ(line_count(a / "ann_linear_metrics.csv"), 5u);
  expect_same_outputs(a, b);
}

TEST(CliTrainAnn, FullPresetArchitectureInHeader) {
  const auto dir = test::scratch_dir("cli_ann_full");
  ASSERT_EQ(run_cli(with(base("train-ann", dir), {"--scheme", "full", "--epochs", "5", "--seed", "1"})).code, 0);
  EXPECT_NE(csv::read_text(dir / "ann_full.txt").find("architecture = 14-20-25-15-4"),
            std::string::npos);
}

TEST(CliTune, DeskBudgetAndReplay) {
  const auto a = test::scratch_dir("cli_tune_a"), b = test::scratch_dir("cli_tune_b");
  ASSERT_EQ(run_cli(with(base("tune", a), {"--seed", "3"})).code, 0);
  ASSERT_EQ(run_cli(with(base("tune", b), {"--seed", "3", "--threads", "2"})).code, 0);
  EXPECT_EQ(line_count(a / "tune_linear_trials.csv"), 21u);
  expect_same_outputs(a, b);
  // The best-config file feeds straight back into train-ann.
  const auto c = test::scratch_dir("cli_tune_c");
  const auto r = run_cli(with(base("train-ann", c), {"--config", (a / "tune_linear_best.txt").string(),
                                                     "--seed", "1", "--epochs", "3"}));
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliTune, PublishedBudgetFlagsAccepted) {
  const auto dir = test::scratch_dir("cli_tune_published");
  // Flags validate; the run then stops at the (deliberately) missing data.
  const auto r = run_cli({"tune", "--trials", "100", "--executions", "2", "--epochs", "2500",
                          "--seed", "1", "--data-dir", (dir / "none").string(), "--out-dir",
                          dir.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("data file not found"), std::string::npos) << r.err;
  const auto bad = run_cli(with(base("tune", dir), {"--trials", "0", "--seed", "1"}));
  EXPECT_NE(bad.code, 0);
  EXPECT_EQ(bad.err.find("data file not found"), std::string::npos);
}

TEST(CliExplain, InteractiveMlrNamesCurrentForWidth) {
  const auto dir = test::scratch_dir("cli_explain_mlr");
  const auto r = run_cli(with(base("explain", dir), {"--scheme", "interactive", "--check-closed-form"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("shap interactive width: top feature i "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("top input current"), std::string::npos);
  EXPECT_EQ(line_count(dir / "shap_values.csv"), 1u + 10 * 10 * 4);
  EXPECT_EQ(line_count(dir / "shap_importance.csv"), 1u + 10 * 4);
  EXPECT_EQ(line_count(dir / "shap_groups.csv"), 1u + 4 * 4);
}

TEST(CliExplain, SerializedModelsAndSchemeDisagreement) {
  const auto dir = test::scratch_dir("cli_explain_files");
  ASSERT_EQ(run_cli(with(base("fit-mlr", dir), {"--scheme", "full"})).code, 0);
  ASSERT_EQ(run_cli(with(base("train-ann", dir), {"--scheme", "linear", "--epochs", "20", "--seed", "2"})).code, 0);
  const auto lin = (dir / "models" / "mlr_full_throat.txt").string();
  auto r = run_cli(with(base("explain", dir), {"--model", lin, "--check-closed-form"}));
  EXPECT_EQ(r.code, 0) << r.err;
  r = run_cli(with(base("explain", dir), {"--model", lin, "--scheme", "linear"}));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("disagrees"), std::string::npos) << r.err;
  const auto ann = (dir / "ann_linear.txt").string();
  r = run_cli(with(base("explain", dir), {"--model", ann}));
  EXPECT_EQ(r.code, 0) << r.err;
  r = run_cli(with(base("explain", dir), {"--model", ann, "--scheme", "full"}));
  EXPECT_NE(r.code, 0);
  r = run_cli(with(base("explain", dir), {"--model", ann, "--check-closed-form"}));
  EXPECT_NE(r.code, 0);
  r = run_cli(with(base("explain", dir), {"--model", ann, "--shap-mode", "sampling"}));
  EXPECT_NE(r.code, 0);  // sampling needs a seed
  r = run_cli(with(base("explain", dir), {"--model", ann, "--shap-mode", "sampling", "--seed", "4",
                                          "--permutations", "16"}));
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliConfig, FlagsOverrideFileAndUnknownKeysFail) {
  const auto dir = test::scratch_dir("cli_config");
  csv::write_text(dir / "run.cfg", "# desk run\nscheme = full\nresponse = leg\nseed = 5\n");
  auto r = run_cli(with(base("fit-mlr", dir), {"--config", (dir / "run.cfg").string(),
                                               "--scheme", "linear"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "models" / "mlr_linear_leg.txt"));
  EXPECT_FALSE(fs::exists(dir / "models" / "mlr_full_leg.txt"));
  const auto manifest = csv::read_text(dir / "manifest.txt");
  EXPECT_NE(manifest.find("scheme=\"linear\""), std::string::npos) << manifest;
  EXPECT_NE(manifest.find("seed=5"), std::string::npos);
  EXPECT_NE(manifest.find("# generated "), std::string::npos);

  // The manifest itself replays the run.
  const auto replay = test::scratch_dir("cli_config_replay");
  r = run_cli({"fit-mlr", "--config", (dir / "manifest.txt").string(), "--out-dir", replay.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(replay / "models" / "mlr_linear_leg.txt"));

  csv::write_text(dir / "bad.cfg", "sceme = full\n");
  r = run_cli(with(base("fit-mlr", dir), {"--config", (dir / "bad.cfg").string()}));
  EXPECT_NE(r.code, 0);
}

TEST(CliCv, FiftyFolds) {
  const auto dir = test::scratch_dir("cli_cv");
  const auto r = run_cli(with(base("cv", dir), {"--seed", "1"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir / "cv_mlr_linear_folds.csv"), 1u + 50 * 4);
  EXPECT_EQ(line_count(dir / "cv_mlr_linear_summary.csv"), 5u);
  EXPECT_NE(run_cli(base("cv", dir)).code, 0);
}

TEST(CliReport, WritesNotes) {
  const auto dir = test::scratch_dir("cli_report");
  const auto r = run_cli(base("report", dir));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "reproduction_notes.md"));
  EXPECT_EQ(line_count(dir / "reproduction.csv"), 1u + 3 * 48);
  EXPECT_NE(r.out.find("max width error 14.19%"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace weldgeom
