#include "weldgeom/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "weldgeom/csv.hpp"
#include "weldgeom/error.hpp"

namespace weldgeom {
namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 0x494e4954;     // weights
constexpr std::uint64_t kDropoutStream = 0x44524f50;  // dropout masks
constexpr std::uint64_t kHoldoutStream = 0x56414c;    // validation holdout

bool dropout_after(const MlpArchitecture& arch, std::size_t layer) {
  return layer + 1 < arch.hidden_sizes.size() && arch.dropout_rate > 0;
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
  return a == Activation::ReLU ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
}

Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::Linear) return Eigen::MatrixXd::Ones(z.rows(), z.cols());
  return (z.array() > 0.0).cast<double>().matrix();
}

Gradients zeros_like(const MlpModel& model) {
  Gradients g;
  for (const auto& l : model.layers) {
    g.layers.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

void check_input(const MlpModel& model, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != model.architecture.input_size) {
    throw ShapeError("network expects " + std::to_string(model.architecture.input_size) +
                     " features, got " + std::to_string(X.cols()));
  }
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(idx[k]));
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& sizes, char sep) {
  std::string s;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(sizes[k]);
  }
  return s;
}

}  // namespace

std::string_view activation_name(Activation a) {
  return a == Activation::ReLU ? "relu" : "linear";
}

MlpArchitecture MlpArchitecture::preset(FeatureScheme scheme, std::size_t outputs) {
  MlpArchitecture a;
  a.input_size = feature_count(scheme);
  a.output_size = outputs;
  a.dropout_rate = 0.1;
  switch (scheme) {
    case FeatureScheme::Linear: a.hidden_sizes = {34, 32}; break;
    case FeatureScheme::Interactive: a.hidden_sizes = {34, 35}; break;
    case FeatureScheme::Full: a.hidden_sizes = {20, 25, 15}; break;
  }
  return a;
}

std::string MlpArchitecture::layout() const {
  std::vector<std::size_t> all{input_size};
  all.insert(all.end(), hidden_sizes.begin(), hidden_sizes.end());
  all.push_back(output_size);
  return join_sizes(all, '-');
}

void MlpArchitecture::validate() const {
  if (input_size == 0 || output_size == 0 ||
      std::any_of(hidden_sizes.begin(), hidden_sizes.end(),
                  [](std::size_t s) { return s == 0; })) {
    throw ConfigError("every layer needs at least one neuron (" + layout() + ")");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1)");
  }
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

MlpModel init(const MlpArchitecture& architecture, std::uint64_t seed) {
  architecture.validate();
  MlpModel model;
  model.architecture = architecture;
  model.rng_seed = seed;
  Rng rng(derive_seed(seed, kInitStream));
  std::vector<std::size_t> sizes{architecture.input_size};
  sizes.insert(sizes.end(), architecture.hidden_sizes.begin(),
               architecture.hidden_sizes.end());
  sizes.push_back(architecture.output_size);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(sizes[l]);
    const auto fan_out = static_cast<Eigen::Index>(sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    DenseLayer layer{Eigen::MatrixXd(fan_in, fan_out), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index i = 0; i < fan_in; ++i) {
      for (Eigen::Index j = 0; j < fan_out; ++j) layer.weights(i, j) = rng.uniform(-limit, limit);
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

ForwardTrace forward_trace(const MlpModel& model, const Eigen::MatrixXd& X,
                           Rng* dropout_rng) {
  check_input(model, X);
  const auto& arch = model.architecture;
  const std::size_t n_layers = model.layers.size();
  ForwardTrace trace;
  trace.activations.push_back(X);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = model.layers[l];
    Eigen::MatrixXd z = trace.activations.back() * layer.weights;
    z.rowwise() += layer.bias.transpose();
    const bool output = l + 1 == n_layers;
    Eigen::MatrixXd a = activate(z, output ? arch.output_activation : arch.hidden_activation);
    Eigen::MatrixXd mask;
    if (!output && dropout_rng != nullptr && dropout_after(arch, l)) {
      const double keep = 1.0 - arch.dropout_rate;
      const double scale = 1.0 / keep;
      mask.resize(a.rows(), a.cols());
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          mask(i, j) = dropout_rng->bernoulli(keep) ? scale : 0.0;
        }
      }
      a = a.cwiseProduct(mask);
    }
    trace.pre_activations.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
    trace.dropout_masks.push_back(std::move(mask));
  }
  return trace;
}

Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& X) {
  return forward_trace(model, X, nullptr).activations.back();
}

Eigen::VectorXd forward(const MlpModel& model, const FeatureVector& features) {
  const Eigen::Map<const Eigen::RowVectorXd> row(
      features.values.data(), static_cast<Eigen::Index>(features.values.size()));
  return forward(model, Eigen::MatrixXd(row)).row(0).transpose();
}

Eigen::MatrixXd forward_train(const MlpModel& model, const Eigen::MatrixXd& X,
                              Rng& dropout_rng) {
  return forward_trace(model, X, &dropout_rng).activations.back();
}

double mae_loss(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const Eigen::MatrixXd out = forward(model, X);
  if (out.rows() != Y.rows() || out.cols() != Y.cols()) {
    throw ShapeError("target matrix shape does not match network output");
  }
  return (out - Y).cwiseAbs().mean();
}

LossGradient mae_gradient(const MlpModel& model, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& Y, Rng* dropout_rng) {
  WELDGEOM_REQUIRE(X.rows() > 0, ShapeError, "gradient needs a non-empty batch");
  const auto trace = forward_trace(model, X, dropout_rng);
  const Eigen::MatrixXd& out = trace.activations.back();
  if (out.rows() != Y.rows() || out.cols() != Y.cols()) {
    throw ShapeError("target matrix shape does not match network output");
  }
  const Eigen::MatrixXd residual = out - Y;
  LossGradient result;
  result.loss = residual.cwiseAbs().mean();
  result.gradient = zeros_like(model);

  const double count = static_cast<double>(residual.size());
  Eigen::MatrixXd upstream =
      residual.unaryExpr([](double r) { return r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0); }) / count;

  const auto& arch = model.architecture;
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const bool output = l + 1 == model.layers.size();
    Eigen::MatrixXd dz = upstream;
    if (trace.dropout_masks[l].size() > 0) dz = dz.cwiseProduct(trace.dropout_masks[l]);
    dz = dz.cwiseProduct(activation_derivative(
        trace.pre_activations[l], output ? arch.output_activation : arch.hidden_activation));
    auto& g = result.gradient.layers[l];
    g.weights = trace.activations[l].transpose() * dz;
    g.bias = dz.colwise().sum().transpose();
    if (l > 0) upstream = dz * model.layers[l].weights.transpose();
  }
  return result;
}

AdamState::AdamState(const MlpModel& model, AdamConfig config)
    : config_(config), m_(zeros_like(model)), v_(zeros_like(model)) {}

void AdamState::step(MlpModel& model, const Gradients& gradient) {
  if (gradient.layers.size() != model.layers.size()) {
    throw ShapeError("gradient does not match model layers");
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    const auto m_hat = m.array() / correction1;
    const auto v_hat = v.array() / correction2;
    param.array() -= config_.learning_rate * m_hat / (v_hat.sqrt() + config_.epsilon);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].weights, m_.layers[l].weights, v_.layers[l].weights,
           gradient.layers[l].weights);
    update(model.layers[l].bias, m_.layers[l].bias, v_.layers[l].bias,
           gradient.layers[l].bias);
  }
}

TrainingResult train(MlpModel model, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                     const TrainingConfig& config) {
  if (X.rows() == 0) throw TrainingError("empty training set", 0);
  if (X.rows() != Y.rows()) throw ShapeError("feature and target row counts differ");
  if (config.epochs < 0) throw ConfigError("epochs must be non-negative");
  if (!(config.validation_fraction >= 0.0 && config.validation_fraction <= 0.5)) {
    throw ConfigError("validation fraction must be in [0, 0.5]");
  }
  if (!(config.learning_rate > 0)) throw ConfigError("learning rate must be positive");

  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto n_val = static_cast<std::size_t>(
      std::floor(config.validation_fraction * static_cast<double>(n)));
  if (config.validation_fraction > 0 && (n_val == 0 || n_val >= n)) {
    throw TrainingError("validation fraction " + csv::format_number(config.validation_fraction) +
                            " leaves an empty split for " + std::to_string(n) + " samples",
                        0);
  }
  if (n_val > 0) {
    Rng holdout(derive_seed(config.seed, kHoldoutStream));
    holdout.shuffle(order.begin(), order.end());
  }
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  const Eigen::MatrixXd X_train = rows_of(X, train_idx);
  const Eigen::MatrixXd Y_train = rows_of(Y, train_idx);
  const Eigen::MatrixXd X_val = rows_of(X, val_idx);
  const Eigen::MatrixXd Y_val = rows_of(Y, val_idx);

  TrainingResult result;
  result.history.initial_train_mae = mae_loss(model, X_train, Y_train);
  result.history.train_mae.reserve(static_cast<std::size_t>(config.epochs));
  AdamState adam(model, {config.learning_rate});
  Rng dropout(derive_seed(config.seed, kDropoutStream));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto step = mae_gradient(model, X_train, Y_train, &dropout);
    if (!std::isfinite(step.loss)) {
      throw TrainingError("training loss became non-finite at epoch " +
                              std::to_string(epoch),
                          epoch);
    }
    adam.step(model, step.gradient);
    const double train_mae = mae_loss(model, X_train, Y_train);
    if (!std::isfinite(train_mae)) {
      throw TrainingError("training loss became non-finite at epoch " +
                              std::to_string(epoch),
                          epoch);
    }
    result.history.train_mae.push_back(train_mae);
    if (n_val > 0) result.history.val_mae.push_back(mae_loss(model, X_val, Y_val));
  }
  result.model = std::move(model);
  return result;
}

void write_history_csv(const std::filesystem::path& path, const TrainingHistory& history) {
  csv::Writer out(path);
  out.row({"epoch", "train_mae", "val_mae"});
  for (std::size_t e = 0; e < history.train_mae.size(); ++e) {
    out.row({std::to_string(e + 1), csv::format_exact(history.train_mae[e]),
             e < history.val_mae.size() ? csv::format_exact(history.val_mae[e]) : ""});
  }
}

// ---- pipeline -------------------------------------------------------------

std::string_view head_mode_name(HeadMode mode) {
  return mode == HeadMode::Joint ? "joint" : "per-response";
}

HeadMode parse_head_mode(std::string_view name) {
  if (name == "joint") return HeadMode::Joint;
  if (name == "per-response") return HeadMode::PerResponse;
  throw ConfigError("unknown head mode '" + std::string(name) +
                    "' (expected joint|per-response)");
}

MlpArchitecture AnnConfig::architecture() const {
  auto arch = MlpArchitecture::preset(scheme, head == HeadMode::Joint ? kNumResponses : 1);
  if (!hidden_sizes.empty()) arch.hidden_sizes = hidden_sizes;
  if (dropout_rate >= 0) arch.dropout_rate = dropout_rate;
  return arch;
}

AnnPredictor::AnnPredictor(AnnConfig config, FeaturePipeline pipeline,
                           TargetTransform targets, std::vector<MlpModel> models)
    : config_(std::move(config)),
      pipeline_(std::move(pipeline)),
      targets_(std::move(targets)),
      models_(std::move(models)) {
  const std::size_t expected = config_.head == HeadMode::Joint ? 1 : kNumResponses;
  if (models_.size() != expected) throw ShapeError("wrong number of networks for head mode");
  for (const auto& m : models_) {
    if (m.architecture.input_size != pipeline_.feature_count()) {
      throw ShapeError("network input size does not match the feature scheme");
    }
    if (m.architecture.output_size != kNumResponses / expected) {
      throw ShapeError("network output size does not match the head mode");
    }
  }
}

AnnPredictor AnnPredictor::train(std::span<const WeldRecord> train_records,
                                 const AnnConfig& config,
                                 std::vector<TrainingHistory>* histories) {
  auto pipeline = FeaturePipeline::fit(train_records, config.scheme, config.order);
  auto targets = config.scale_targets ? TargetTransform::fit(train_records) : TargetTransform{};
  const Eigen::MatrixXd X = pipeline.features(train_records);
  const Eigen::MatrixXd Y = targets.forward(response_matrix(train_records));
  const auto arch = config.architecture();
  std::vector<MlpModel> models;
  if (histories) histories->clear();
  if (config.head == HeadMode::Joint) {
    auto result = weldgeom::train(init(arch, derive_seed(config.training.seed, kInitStream)),
                                  X, Y, config.training);
    models.push_back(std::move(result.model));
    if (histories) histories->push_back(std::move(result.history));
  } else {
    for (std::size_t r = 0; r < kNumResponses; ++r) {
      auto cfg = config.training;
      cfg.seed = derive_seed(config.training.seed, r + 1);
      auto result = weldgeom::train(init(arch, derive_seed(cfg.seed, kInitStream)), X,
                                    Y.col(static_cast<Eigen::Index>(r)), cfg);
      models.push_back(std::move(result.model));
      if (histories) histories->push_back(std::move(result.history));
    }
  }
  return {config, std::move(pipeline), std::move(targets), std::move(models)};
}

Eigen::MatrixXd AnnPredictor::predict(std::span<const WeldRecord> records) const {
  return predict_features(pipeline_.features(records));
}

Eigen::MatrixXd AnnPredictor::predict_features(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd out;
  if (config_.head == HeadMode::Joint) {
    out = forward(models_.front(), features);
  } else {
    out.resize(features.rows(), static_cast<Eigen::Index>(kNumResponses));
    for (std::size_t r = 0; r < kNumResponses; ++r) {
      out.col(static_cast<Eigen::Index>(r)) = forward(models_[r], features).col(0);
    }
  }
  return targets_.inverse(out);
}

// ---- serialization --------------------------------------------------------

namespace {

void write_header(std::ostream& out, const MlpFileHeader& header,
                  const std::vector<const MlpModel*>& nets) {
  out << "# weldgeom mlp model\n"
      << "kind = mlp\n"
      << "scheme = " << scheme_name(header.scheme) << '\n'
      << "feature_order = " << order_name(header.order) << '\n'
      << "head = " << head_mode_name(header.head) << '\n'
      << "scale_targets = " << (header.scale_targets ? "true" : "false") << '\n'
      << "architecture = " << nets.front()->architecture.layout() << '\n'
      << "nets = " << nets.size() << '\n';
}

void write_net(std::ostream& out, std::size_t index, const MlpModel& model) {
  const auto& a = model.architecture;
  out << "net " << index << '\n'
      << "architecture = " << a.layout() << '\n'
      << "input_size = " << a.input_size << '\n'
      << "hidden_sizes = " << join_sizes(a.hidden_sizes, ' ') << '\n'
      << "output_size = " << a.output_size << '\n'
      << "dropout_rate = " << csv::format_exact(a.dropout_rate) << '\n'
      << "hidden_activation = " << activation_name(a.hidden_activation) << '\n'
      << "output_activation = " << activation_name(a.output_activation) << '\n'
      << "rng_seed = " << model.rng_seed << '\n';
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    out << "layer " << l << ' ' << layer.weights.rows() << ' ' << layer.weights.cols() << '\n';
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        out << (j ? " " : "") << csv::format_exact(layer.weights(i, j));
      }
      out << '\n';
    }
    out << "bias";
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) {
      out << ' ' << csv::format_exact(layer.bias(j));
    }
    out << '\n';
  }
  out << "end\n";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "linear") return Activation::Linear;
  throw DataError("model file: unknown activation '" + s + "'");
}

std::size_t parse_size(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  std::size_t v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) {
    throw DataError("model file: '" + key + "' is not a non-negative integer: '" + s + "'");
  }
  return v;
}

struct ParsedFile {
  MlpFileHeader header;
  std::vector<MlpModel> nets;
};

ParsedFile parse_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, key, value;
  ParsedFile file;
  std::size_t declared_nets = 0;
  bool kind_ok = false;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError("model file line " + std::to_string(line_no) + ": " + msg);
  };
  auto read_numbers = [&](std::istringstream& src, Eigen::Index count) {
    std::vector<double> values;
    std::string tok;
    while (src >> tok) {
      double v = 0;
      if (!csv::parse_number(tok, v)) throw fail("bad number '" + tok + "'");
      values.push_back(v);
    }
    if (static_cast<Eigen::Index>(values.size()) != count) {
      throw fail("expected " + std::to_string(count) + " values, got " +
                 std::to_string(values.size()));
    }
    return values;
  };

  // Header.
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).starts_with("net ")) break;
    if (!csv::split_key_value(line, key, value)) continue;
    try {
      if (key == "kind") kind_ok = value == "mlp";
      else if (key == "scheme") file.header.scheme = parse_scheme(value);
      else if (key == "feature_order") file.header.order = parse_order(value);
      else if (key == "head") file.header.head = parse_head_mode(value);
      else if (key == "scale_targets") file.header.scale_targets = value == "true";
      else if (key == "nets") declared_nets = parse_size(key, value);
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
  }
  if (!kind_ok) throw DataError("model file: not an mlp model");

  // Nets. `line` holds a "net k" line here, if any.
  while (csv::trim(line).starts_with("net ")) {
    MlpModel model;
    auto& a = model.architecture;
    a.hidden_sizes.clear();
    bool done = false;
    while (!done && std::getline(in, line)) {
      ++line_no;
      const auto t = std::string(csv::trim(line));
      if (t.empty() || t.front() == '#') continue;
      if (t == "end") {
        done = true;
      } else if (t.starts_with("layer ")) {
        std::istringstream hdr(t.substr(6));
        std::size_t index = 0, rows = 0, cols = 0;
        if (!(hdr >> index >> rows >> cols) || index != model.layers.size()) {
          throw fail("malformed layer header '" + t + "'");
        }
        DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(cols)};
        for (std::size_t i = 0; i < rows; ++i) {
          if (!std::getline(in, line)) throw fail("truncated weight block");
          ++line_no;
          std::istringstream row(line);
          const auto v = read_numbers(row, static_cast<Eigen::Index>(cols));
          for (std::size_t j = 0; j < cols; ++j) {
            layer.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
          }
        }
        if (!std::getline(in, line)) throw fail("missing bias line");
        ++line_no;
        std::istringstream bias(line);
        std::string tag;
        if (!(bias >> tag) || tag != "bias") throw fail("expected 'bias' line");
        const auto v = read_numbers(bias, static_cast<Eigen::Index>(cols));
        for (std::size_t j = 0; j < cols; ++j) layer.bias(static_cast<Eigen::Index>(j)) = v[j];
        model.layers.push_back(std::move(layer));
      } else if (csv::split_key_value(t, key, value)) {
        if (key == "input_size") a.input_size = parse_size(key, value);
        else if (key == "output_size") a.output_size = parse_size(key, value);
        else if (key == "hidden_sizes") {
          std::istringstream hs(value);
          std::string tok;
          while (hs >> tok) a.hidden_sizes.push_back(parse_size(key, tok));
        } else if (key == "dropout_rate") {
          if (!csv::parse_number(value, a.dropout_rate)) throw fail("bad dropout_rate");
        } else if (key == "hidden_activation") a.hidden_activation = parse_activation(value);
        else if (key == "output_activation") a.output_activation = parse_activation(value);
        else if (key == "rng_seed") model.rng_seed = std::stoull(value);
      }
    }
    if (!done) throw fail("net block not terminated by 'end'");
    try {
      a.validate();
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
    // Shape chain must match the declared architecture.
    std::vector<std::size_t> sizes{a.input_size};
    sizes.insert(sizes.end(), a.hidden_sizes.begin(), a.hidden_sizes.end());
    sizes.push_back(a.output_size);
    if (model.layers.size() + 1 != sizes.size()) throw fail("layer count does not match architecture");
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      if (static_cast<std::size_t>(model.layers[l].weights.rows()) != sizes[l] ||
          static_cast<std::size_t>(model.layers[l].weights.cols()) != sizes[l + 1]) {
        throw fail("layer " + std::to_string(l) + " shape does not match architecture " +
                   a.layout());
      }
    }
    file.nets.push_back(std::move(model));
    line.clear();
    while (std::getline(in, line)) {
      ++line_no;
      if (!csv::trim(line).empty()) break;
    }
  }
  if (file.nets.empty()) throw DataError("model file: no networks");
  if (declared_nets != 0 && declared_nets != file.nets.size()) {
    throw DataError("model file: header declares " + std::to_string(declared_nets) +
                    " nets, found " + std::to_string(file.nets.size()));
  }
  for (const auto& net : file.nets) {
    if (net.architecture.input_size != feature_count(file.header.scheme)) {
      throw DataError("model file: network input size " +
                      std::to_string(net.architecture.input_size) + " does not match scheme " +
                      std::string(scheme_name(file.header.scheme)));
    }
  }
  return file;
}

}  // namespace

std::string serialize(const MlpModel& model, const MlpFileHeader& header) {
  std::ostringstream out;
  write_header(out, header, {&model});
  write_net(out, 0, model);
  return out.str();
}

MlpModel parse_mlp_model(std::string_view text, MlpFileHeader* header) {
  auto file = parse_file(text);
  if (header) *header = file.header;
  return std::move(file.nets.front());
}

void save_ann(const std::filesystem::path& path, const AnnPredictor& predictor) {
  const auto& cfg = predictor.config();
  MlpFileHeader header{cfg.scheme, cfg.order, cfg.head, cfg.scale_targets};
  std::vector<const MlpModel*> nets;
  for (const auto& m : predictor.models()) nets.push_back(&m);
  std::ostringstream out;
  write_header(out, header, nets);
  for (std::size_t k = 0; k < nets.size(); ++k) write_net(out, k, *nets[k]);
  csv::write_text(path, out.str());
}

AnnPredictor load_ann(const std::filesystem::path& path,
                      std::span<const WeldRecord> train_records) {
  auto file = parse_file(csv::read_text(path));
  AnnConfig cfg;
  cfg.scheme = file.header.scheme;
  cfg.order = file.header.order;
  cfg.head = file.header.head;
  cfg.scale_targets = file.header.scale_targets;
  cfg.hidden_sizes = file.nets.front().architecture.hidden_sizes;
  cfg.dropout_rate = file.nets.front().architecture.dropout_rate;
  auto pipeline = FeaturePipeline::fit(train_records, cfg.scheme, cfg.order);
  auto targets = cfg.scale_targets ? TargetTransform::fit(train_records) : TargetTransform{};
  return {cfg, std::move(pipeline), std::move(targets), std::move(file.nets)};
}

}  // namespace weldgeom
