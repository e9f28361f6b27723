#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "weldgeom/csv.hpp"
#include "weldgeom/dataset.hpp"
#include "weldgeom/error.hpp"
#include "weldgeom/evaluation.hpp"
#include "weldgeom/explain.hpp"
#include "weldgeom/features.hpp"
#include "weldgeom/linmodel.hpp"
#include "weldgeom/neuralnet.hpp"
#include "weldgeom/reproduction.hpp"
#include "weldgeom/tuner.hpp"

namespace weldgeom::cli {
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, kNumInputs> kInputNames = {"thickness", "current",
                                                                  "voltage", "speed"};

struct Data {
  std::vector<WeldRecord> train;
  std::vector<WeldRecord> test;
};

Data load_data(const RunConfig& c) {
  return {load_csv(c.data_dir / "train.csv"), load_csv(c.data_dir / "test.csv")};
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::vector<FeatureScheme> schemes_for(const RunConfig& c, FeatureScheme fallback,
                                       bool allow_all) {
  if (c.scheme.empty()) {
    if (allow_all) return {kAllSchemes.begin(), kAllSchemes.end()};
    return {fallback};
  }
  if (c.scheme == "all") {
    if (!allow_all) throw ConfigError(c.command + " takes a single --scheme");
    return {kAllSchemes.begin(), kAllSchemes.end()};
  }
  return {parse_scheme(c.scheme)};
}

FeatureScheme single_scheme(const RunConfig& c) {
  return schemes_for(c, FeatureScheme::Linear, false).front();
}

std::vector<Response> responses_for(const RunConfig& c) {
  if (c.response == "all") return {kAllResponses.begin(), kAllResponses.end()};
  return {parse_response(c.response)};
}

std::vector<MetricsRow> only(const std::vector<MetricsRow>& rows,
                             const std::vector<Response>& keep) {
  std::vector<MetricsRow> out;
  for (const auto& r : rows) {
    if (std::find(keep.begin(), keep.end(), r.response) != keep.end()) out.push_back(r);
  }
  return out;
}

std::vector<PredictionRow> only(const std::vector<PredictionRow>& rows,
                                const std::vector<Response>& keep) {
  std::vector<PredictionRow> out;
  for (const auto& r : rows) {
    if (std::find(keep.begin(), keep.end(), r.response) != keep.end()) out.push_back(r);
  }
  return out;
}

std::vector<WeldRecord> pick(const Data& data, const std::string& which) {
  if (which == "train") return data.train;
  if (which == "test") return data.test;
  if (which == "all") {
    auto all = data.train;
    all.insert(all.end(), data.test.begin(), data.test.end());
    return all;
  }
  throw ConfigError("expected train|test|all, got '" + which + "'");
}

void print_rows(std::ostream& out, const std::string& label,
                const std::vector<MetricsRow>& rows) {
  for (const auto& r : rows) {
    out << label << ' ' << response_name(r.response) << ": R2=" << fixed(r.r2, 4)
        << " RMSE=" << fixed(r.rmse, 4) << " STD(test)=" << fixed(r.std_test, 4)
        << " STD(model)=" << fixed(r.std_model, 4) << '\n';
  }
}

// Wide layout: one row per parameter, four metric columns per scheme.
void write_scheme_table(const fs::path& path, const std::vector<FeatureScheme>& schemes,
                        const std::vector<std::vector<MetricsRow>>& per_scheme) {
  csv::Writer out(path);
  std::vector<std::string> header = {"parameter"};
  for (auto s : schemes) {
    for (const char* m : {"r2", "rmse", "std_test", "std_model"}) {
      header.push_back(std::string(scheme_name(s)) + "_" + m);
    }
  }
  out.row(header);
  for (std::size_t i = 0; i < per_scheme.front().size(); ++i) {
    std::vector<std::string> cells = {
        std::string(response_name(per_scheme.front()[i].response))};
    for (const auto& rows : per_scheme) {
      const auto& r = rows[i];
      for (double v : {r.r2, r.rmse, r.std_test, r.std_model}) {
        cells.push_back(csv::format_exact(v));
      }
    }
    out.row(cells);
  }
}

AnnConfig ann_config(const RunConfig& c, FeatureScheme scheme, int default_epochs,
                     std::uint64_t seed) {
  AnnConfig a;
  a.scheme = scheme;
  a.order = parse_order(c.feature_order);
  a.scale_targets = c.scale_targets;
  a.head = parse_head_mode(c.head);
  a.hidden_sizes = c.hidden_sizes();
  a.dropout_rate = c.dropout.value_or(-1.0);
  a.training.epochs = c.epochs.value_or(default_epochs);
  a.training.learning_rate = c.learning_rate;
  a.training.validation_fraction = c.validation_fraction;
  a.training.seed = seed;
  a.architecture().validate();
  return a;
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string s;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(sizes[k]);
  }
  return s;
}

std::string model_kind(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("model file not found: " + path.string());
  std::istringstream in(csv::read_text(path));
  std::string line, key, value;
  while (std::getline(in, line)) {
    if (csv::split_key_value(line, key, value) && key == "kind") return value;
  }
  throw DataError(path.string() + ": no `kind` line");
}

// A model to explain: batch function over expanded features plus the
// pipeline that produces them.
struct Explained {
  FeatureScheme scheme = FeatureScheme::Linear;
  FeaturePipeline pipeline;
  BatchFunction function;
  std::vector<std::string> outputs;
  // Linear models only, one per output: coefficients and the slope of the
  // target inverse transform.
  std::vector<LinearModel> linear;
  std::vector<double> slopes;
};

Explained explained_model(const RunConfig& c, const Data& data) {
  const auto order = parse_order(c.feature_order);
  const auto targets =
      c.scale_targets ? TargetTransform::fit(data.train) : TargetTransform{};
  auto slope = [&](Response r) {
    return targets.inverse(index_of(r), 1.0) - targets.inverse(index_of(r), 0.0);
  };
  auto check_scheme = [&](FeatureScheme file_scheme) {
    if (!c.scheme.empty() && parse_scheme(c.scheme) != file_scheme) {
      throw ConfigError("model file scheme '" + std::string(scheme_name(file_scheme)) +
                        "' disagrees with --scheme " + c.scheme);
    }
  };

  Explained e;
  if (!c.model.empty()) {
    const auto kind = model_kind(c.model);
    if (kind == "linear") {
      const auto m = load_linear_model(c.model);
      check_scheme(m.scheme);
      e.scheme = m.scheme;
      e.pipeline = FeaturePipeline::fit(data.train, m.scheme, order);
      e.outputs = {std::string(response_name(m.response))};
      e.function = [m, targets](const Eigen::MatrixXd& F) {
        Eigen::MatrixXd y = predict(m, F);
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
          y(i, 0) = targets.inverse(index_of(m.response), y(i, 0));
        }
        return y;
      };
      e.linear = {m};
      e.slopes = {slope(m.response)};
      return e;
    }
    if (kind == "mlp") {
      auto p = load_ann(c.model, data.train);
      check_scheme(p.config().scheme);
      e.scheme = p.config().scheme;
      e.pipeline = p.pipeline();
      for (auto r : kAllResponses) e.outputs.emplace_back(response_name(r));
      e.function = [p = std::move(p)](const Eigen::MatrixXd& F) {
        return p.predict_features(F);
      };
      return e;
    }
    throw DataError(c.model.string() + ": unknown model kind '" + kind + "'");
  }

  e.scheme = single_scheme(c);
  if (c.source != "mlr-refit" && c.source != "mlr-published") {
    throw ConfigError("--source must be mlr-refit or mlr-published, got '" + c.source + "'");
  }
  auto p = c.source == "mlr-refit"
               ? MlrPredictor::fit(data.train, e.scheme, order, c.scale_targets)
               : MlrPredictor::published(data.train, e.scheme, order, c.scale_targets);
  e.pipeline = p.pipeline();
  for (auto r : kAllResponses) {
    e.outputs.emplace_back(response_name(r));
    e.linear.push_back(p.model(r));
    e.slopes.push_back(slope(r));
  }
  e.function = [p = std::move(p)](const Eigen::MatrixXd& F) { return p.predict_features(F); };
  return e;
}

}  // namespace

int cmd_fit_mlr(const RunConfig& c, std::ostream& out) {
  const auto data = load_data(c);
  const auto order = parse_order(c.feature_order);
  const auto schemes = schemes_for(c, FeatureScheme::Linear, true);
  const auto responses = responses_for(c);
  const Eigen::MatrixXd truth = response_matrix(data.test);
  fs::create_directories(c.out_dir / "models");

  std::vector<std::vector<MetricsRow>> refit_rows, published_rows;
  std::vector<PredictionRow> predictions;
  auto evaluate = [&](const MlrPredictor& p, const std::string& label) {
    const Eigen::MatrixXd pred = p.predict(data.test);
    auto rows = only(metrics_table(truth, pred), responses);
    print_rows(out, label, rows);
    auto pr = only(prediction_rows(truth, pred, label), responses);
    predictions.insert(predictions.end(), pr.begin(), pr.end());
    return rows;
  };
  auto save = [&](const MlrPredictor& p, FeatureScheme s, const std::string& suffix) {
    for (auto r : responses) {
      const auto path = c.out_dir / "models" /
                        ("mlr_" + std::string(scheme_name(s)) + "_" +
                         std::string(response_name(r)) + suffix + ".txt");
      save_linear_model(path, p.model(r));
    }
  };

  for (auto s : schemes) {
    const std::string name(scheme_name(s));
    if (!c.published_coefficients) {
      const auto refit = MlrPredictor::fit(data.train, s, order, c.scale_targets);
      save(refit, s, "");
      refit_rows.push_back(evaluate(refit, "mlr-" + name + "-refit"));
    }
    const auto pub = MlrPredictor::published(data.train, s, order, c.scale_targets);
    if (c.published_coefficients) save(pub, s, "_published");
    published_rows.push_back(evaluate(pub, "mlr-" + name + "-published"));
  }

  const auto metrics = c.out_dir / "mlr_metrics.csv";
  bool append = false;
  for (std::size_t k = 0; k < schemes.size(); ++k) {
    const std::string name(scheme_name(schemes[k]));
    if (!c.published_coefficients) {
      write_metrics_csv(metrics, "mlr-" + name + "-refit", refit_rows[k], append);
      append = true;
    }
    write_metrics_csv(metrics, "mlr-" + name + "-published", published_rows[k], append);
    append = true;
  }
  if (!c.published_coefficients) write_scheme_table(c.out_dir / "mlr_table_refit.csv", schemes, refit_rows);
  write_scheme_table(c.out_dir / "mlr_table_published.csv", schemes, published_rows);
  write_predictions_csv(c.out_dir / "mlr_predictions.csv", predictions);
  return 0;
}

int cmd_train_ann(const RunConfig& c, std::ostream& out) {
  const auto seed = c.require_seed();
  const auto data = load_data(c);
  const auto responses = responses_for(c);
  const Eigen::MatrixXd truth = response_matrix(data.test);
  fs::create_directories(c.out_dir);

  for (auto s : schemes_for(c, FeatureScheme::Linear, true)) {
    const std::string name(scheme_name(s));
    const auto cfg = ann_config(c, s, 2500, seed);
    std::vector<TrainingHistory> histories;
    const auto p = AnnPredictor::train(data.train, cfg, &histories);
    save_ann(c.out_dir / ("ann_" + name + ".txt"), p);
    for (std::size_t k = 0; k < histories.size(); ++k) {
      const std::string tag =
          histories.size() == 1 ? "" : "_" + std::string(response_name(kAllResponses[k]));
      write_history_csv(c.out_dir / ("ann_" + name + tag + "_history.csv"), histories[k]);
      out << "ann-" << name << tag << ' ' << cfg.architecture().layout() << ": train MAE "
          << fixed(histories[k].initial_train_mae, 4) << " -> "
          << fixed(histories[k].train_mae.back(), 4) << " over " << histories[k].epochs()
          << " epochs\n";
    }
    const Eigen::MatrixXd pred = p.predict(data.test);
    const auto rows = only(metrics_table(truth, pred), responses);
    print_rows(out, "ann-" + name, rows);
    write_metrics_csv(c.out_dir / ("ann_" + name + "_metrics.csv"), "ann-" + name, rows);
    write_predictions_csv(c.out_dir / ("ann_" + name + "_predictions.csv"),
                          only(prediction_rows(truth, pred, "ann-" + name), responses));
  }
  return 0;
}

int cmd_tune(const RunConfig& c, std::ostream& out) {
  const auto seed = c.require_seed();
  const auto scheme = single_scheme(c);
  const std::string name(scheme_name(scheme));
  const SearchSpace space;
  const SearchBudget budget{c.trials, c.executions, c.epochs.value_or(250)};
  budget.validate();
  const auto base = ann_config(c, scheme, budget.epochs, seed);
  const auto data = load_data(c);
  fs::create_directories(c.out_dir);
  const auto result =
      random_search(space, budget, ann_trial_evaluator(data.train, base), seed, c.threads);
  write_trials_csv(c.out_dir / ("tune_" + name + "_trials.csv"), result, space.layers_max);

  // Written as a config fragment so it can be fed back to train-ann.
  const auto& best = result.best;
  std::ostringstream text;
  text << "# best of " << result.trials.size() << " trials: trial " << best.trial
       << ", mean final validation MAE " << csv::format_exact(best.objective) << '\n'
       << "scheme = " << name << '\n'
       << "hidden = \"" << join_sizes(best.config.hidden_sizes) << "\"\n"
       << "dropout = " << csv::format_exact(best.config.dropout_rate) << '\n'
       << "learning-rate = " << csv::format_exact(best.config.learning_rate) << '\n';
  csv::write_text(c.out_dir / ("tune_" + name + "_best.txt"), text.str());

  std::size_t failed = 0;
  for (const auto& t : result.trials) failed += t.failed ? 1 : 0;
  out << "tune " << name << ": " << result.trials.size() << " trials (" << failed
      << " failed), best trial " << best.trial << " hidden "
      << join_sizes(best.config.hidden_sizes) << " dropout " << best.config.dropout_rate
      << " lr " << fixed(best.config.learning_rate, 5) << " val MAE "
      << fixed(best.objective, 4) << '\n';
  return 0;
}

int cmd_explain(const RunConfig& c, std::ostream& out) {
  const auto data = load_data(c);
  const auto e = explained_model(c, data);
  const auto background = e.pipeline.features(pick(data, c.background));
  const auto instances = e.pipeline.features(pick(data, c.instances));

  ShapOptions opts;
  if (c.shap_mode == "exact") {
    opts.mode = ShapMode::Exact;
  } else if (c.shap_mode == "sampling") {
    opts.mode = ShapMode::Sampling;
    opts.seed = c.require_seed();
    opts.permutations = c.permutations;
  } else {
    throw ConfigError("--shap-mode must be exact or sampling, got '" + c.shap_mode + "'");
  }
  opts.threads = c.threads;
  const auto shap = shapley_values(e.function, background, instances,
                                   feature_names(e.scheme), e.outputs, opts);

  fs::create_directories(c.out_dir);
  write_shap_csv(c.out_dir / "shap_values.csv", shap);
  write_importance_csv(c.out_dir / "shap_importance.csv", shap);
  csv::Writer groups(c.out_dir / "shap_groups.csv");
  groups.row({"input", "response", "share"});
  for (std::size_t o = 0; o < e.outputs.size(); ++o) {
    const auto importance = mean_abs_shap(shap, o);
    const auto shares = input_group_shares(importance, e.scheme);
    for (std::size_t g = 0; g < kNumInputs; ++g) {
      groups.row({std::string(kInputNames[g]), e.outputs[o], csv::format_exact(shares[g])});
    }
    const auto top = std::max_element(importance.begin(), importance.end(),
                                      [](const auto& a, const auto& b) {
                                        return a.mean_abs < b.mean_abs;
                                      });
    const auto g = static_cast<std::size_t>(
        std::max_element(shares.begin(), shares.end()) - shares.begin());
    out << "shap " << scheme_name(e.scheme) << ' ' << e.outputs[o] << ": top feature "
        << top->feature << " (" << fixed(top->share, 3) << "), top input " << kInputNames[g]
        << " (" << fixed(shares[g], 3) << ")\n";
  }

  if (c.check_closed_form) {
    if (e.linear.empty()) throw ConfigError("--check-closed-form needs a linear model");
    const Eigen::RowVectorXd mean = background.colwise().mean();
    double worst = 0;
    for (std::size_t o = 0; o < e.linear.size(); ++o) {
      const auto& m = e.linear[o];
      for (Eigen::Index i = 0; i < instances.rows(); ++i) {
        for (Eigen::Index k = 0; k < instances.cols(); ++k) {
          const double closed = e.slopes[o] * m.coefficients[static_cast<std::size_t>(k)] *
                                (instances(i, k) - mean(k));
          worst = std::max(worst, std::abs(closed - shap.phi[o](i, k)));
        }
      }
    }
    out << "closed-form check: max |phi - alpha*(x - mean)| = " << worst << '\n';
    if (worst > 1e-8) throw Error("closed-form check failed (tolerance 1e-8)");
  }
  return 0;
}

int cmd_cv(const RunConfig& c, std::ostream& out) {
  const auto seed = c.require_seed();
  const auto data = load_data(c);
  const auto scheme = single_scheme(c);
  const auto order = parse_order(c.feature_order);
  fs::create_directories(c.out_dir);

  ModelFactory factory;
  if (c.family == "mlr") {
    factory = [&](std::span<const WeldRecord> train) -> Predictor {
      auto p = MlrPredictor::fit(train, scheme, order, c.scale_targets);
      return [p = std::move(p)](std::span<const WeldRecord> r) { return p.predict(r); };
    };
  } else if (c.family == "ann") {
    const auto cfg = ann_config(c, scheme, 2500, seed);
    factory = [cfg](std::span<const WeldRecord> train) -> Predictor {
      auto p = AnnPredictor::train(train, cfg);
      return [p = std::move(p)](std::span<const WeldRecord> r) { return p.predict(r); };
    };
  } else {
    throw ConfigError("--family must be mlr or ann, got '" + c.family + "'");
  }

  const CvPlan plan{c.splits, c.repeats, seed};
  const auto report = repeated_kfold(data.train, plan, factory, c.threads);
  const std::string tag = c.family + "_" + std::string(scheme_name(scheme));
  write_cv_csv(c.out_dir / ("cv_" + tag + "_folds.csv"), report);
  csv::Writer summary(c.out_dir / ("cv_" + tag + "_summary.csv"));
  summary.row({"parameter", "mean_r2", "std_r2", "mean_rmse", "std_rmse", "r2_folds"});
  for (const auto& s : report.summary) {
    summary.row({std::string(response_name(s.response)), csv::format_exact(s.mean_r2),
                 csv::format_exact(s.std_r2), csv::format_exact(s.mean_rmse),
                 csv::format_exact(s.std_rmse), std::to_string(s.r2_folds)});
    out << "cv " << tag << ' ' << response_name(s.response) << ": R2 "
        << fixed(s.mean_r2, 4) << " +/- " << fixed(s.std_r2, 4) << ", RMSE "
        << fixed(s.mean_rmse, 4) << " +/- " << fixed(s.std_rmse, 4) << " over "
        << report.folds.size() << " folds\n";
  }
  return 0;
}

int cmd_report(const RunConfig& c, std::ostream& out) {
  const auto data = load_data(c);
  const auto order = parse_order(c.feature_order);
  const auto other = order == ExpansionOrder::ExpandThenScale
                         ? ExpansionOrder::ScaleThenExpand
                         : ExpansionOrder::ExpandThenScale;
  const ReproductionTolerance tol{c.r2_tolerance, c.rmse_tolerance, c.max_error_tolerance};
  // Requested convention first, then the alternate target scaling, then the
  // other expansion order for reference.
  const std::vector<ReproductionRun> runs = {
      reproduce_published_mlr(data.train, data.test, order, c.scale_targets, tol),
      reproduce_published_mlr(data.train, data.test, order, !c.scale_targets, tol),
      reproduce_published_mlr(data.train, data.test, other, c.scale_targets, tol),
  };
  fs::create_directories(c.out_dir);
  csv::write_text(c.out_dir / "reproduction_notes.md", reproduction_notes(runs, tol));
  write_reproduction_csv(c.out_dir / "reproduction.csv", runs);
  for (const auto& run : runs) {
    out << "report [" << run.label() << "]: " << run.gated_within() << '/'
        << run.gated_cells() << " R2/RMSE cells within tolerance, max width error "
        << fixed(run.max_width_error_pct, 2) << "% (published "
        << kPublishedMaxWidthErrorPct << "%)\n";
  }
  return 0;
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_manifest(const RunConfig& c, const CLI::App& app) {
  fs::create_directories(c.out_dir);
  std::ostringstream text;
  text << "# weldgeom " << c.command << '\n'
       << "# generated " << utc_timestamp() << '\n';
  if (!c.seed) text << "# seed: none\n";
  text << app.config_to_str(true, false);
  csv::write_text(c.out_dir / "manifest.txt", text.str());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Weld bead geometry regression toolkit", "weldgeom"};
  app.fallthrough();
  app.require_subcommand(1);
  add_options(app, config);
  app.allow_config_extras(CLI::config_extras_mode::error);

  using Command = int (*)(const RunConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"fit-mlr", "Fit and evaluate the regression equations", cmd_fit_mlr},
      {"train-ann", "Train a multilayer perceptron", cmd_train_ann},
      {"tune", "Random search over MLP hyperparameters", cmd_tune},
      {"explain", "Shapley-value attributions for a model", cmd_explain},
      {"cv", "Repeated k-fold cross-validation", cmd_cv},
      {"report", "Compare the published equations with their published metrics", cmd_report},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    for (const auto& [name, help, fn] : commands) {
      if (!app.got_subcommand(name)) continue;
      config.command = name;
      write_manifest(config, app);
      return fn(config, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace weldgeom::cli
