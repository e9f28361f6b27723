#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "weldgeom/dataset.hpp"
#include "weldgeom/features.hpp"
#include "weldgeom/rng.hpp"

namespace weldgeom {

enum class Activation { ReLU, Linear };

std::string_view activation_name(Activation a);

// Dense feed-forward topology. Dropout sits between consecutive hidden layers
// (never after the last hidden layer, never on the input).
struct MlpArchitecture {
  std::size_t input_size = 4;
  std::vector<std::size_t> hidden_sizes;
  std::size_t output_size = kNumResponses;
  double dropout_rate = 0.1;
  Activation hidden_activation = Activation::ReLU;
  Activation output_activation = Activation::Linear;

  // Tuned topologies per feature scheme: linear 34/32, interactive 34/35,
  // full 20/25/15, dropout 0.1.
  static MlpArchitecture preset(FeatureScheme scheme,
                                std::size_t outputs = kNumResponses);

  // "14-20-25-15-4"
  std::string layout() const;
  void validate() const;

  friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

// Row-vector convention: layer output = input * weights + bias^T, weights are
// fan_in x fan_out.
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

struct MlpModel {
  MlpArchitecture architecture;
  std::vector<DenseLayer> layers;
  std::uint64_t rng_seed = 0;

  std::size_t parameter_count() const;
};

// he-uniform weights on [-sqrt(6/fan_in), sqrt(6/fan_in)], zero biases.
MlpModel init(const MlpArchitecture& architecture, std::uint64_t seed);

// Inference: deterministic, no dropout. X is N x input_size.
Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& X);
Eigen::VectorXd forward(const MlpModel& model, const FeatureVector& features);

// Training-mode forward: every hidden unit feeding a dropout layer is zeroed
// with probability dropout_rate and survivors are scaled by 1/(1-rate).
Eigen::MatrixXd forward_train(const MlpModel& model, const Eigen::MatrixXd& X,
                              Rng& dropout_rng);

// Per-layer outputs (after activation and, in training mode, after dropout).
// activations[0] is the input; activations.back() is the network output.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> pre_activations;
  std::vector<Eigen::MatrixXd> activations;
  std::vector<Eigen::MatrixXd> dropout_masks;  // empty matrix when no dropout
};
ForwardTrace forward_trace(const MlpModel& model, const Eigen::MatrixXd& X,
                           Rng* dropout_rng);

struct Gradients {
  std::vector<DenseLayer> layers;
};

struct LossGradient {
  double loss = 0;
  Gradients gradient;
};

// Mean absolute error over all N x outputs entries and its exact reverse-mode
// gradient. sign(0) and relu'(0) are taken as 0. Pass a dropout RNG to
// differentiate the training-mode network.
double mae_loss(const MlpModel& model, const Eigen::MatrixXd& X,
                const Eigen::MatrixXd& Y);
LossGradient mae_gradient(const MlpModel& model, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& Y, Rng* dropout_rng = nullptr);

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  AdamState(const MlpModel& model, AdamConfig config);

  void step(MlpModel& model, const Gradients& gradient);

  std::int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const Gradients& first_moment() const { return m_; }
  const Gradients& second_moment() const { return v_; }

 private:
  AdamConfig config_;
  Gradients m_;
  Gradients v_;
  std::int64_t t_ = 0;
};

struct TrainingConfig {
  int epochs = 2500;
  double learning_rate = 0.01;
  // Full-batch: one Adam step per epoch over the whole training subset.
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct TrainingHistory {
  double initial_train_mae = 0;
  std::vector<double> train_mae;
  std::vector<double> val_mae;  // empty when validation_fraction == 0

  std::size_t epochs() const { return train_mae.size(); }
};

struct TrainingResult {
  MlpModel model;
  TrainingHistory history;
};

// Adam on MAE with training-mode dropout. The validation subset is a seeded
// random holdout of the given rows. Both curves are inference-mode MAE at the
// end of each epoch. Throws TrainingError naming the epoch on a non-finite
// loss.
TrainingResult train(MlpModel model, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, const TrainingConfig& config);

void write_history_csv(const std::filesystem::path& path,
                       const TrainingHistory& history);

// ---- ANN regression pipeline ----------------------------------------------

enum class HeadMode { Joint, PerResponse };

std::string_view head_mode_name(HeadMode mode);
HeadMode parse_head_mode(std::string_view name);

struct AnnConfig {
  FeatureScheme scheme = FeatureScheme::Linear;
  ExpansionOrder order = ExpansionOrder::ExpandThenScale;
  bool scale_targets = false;
  HeadMode head = HeadMode::Joint;
  std::vector<std::size_t> hidden_sizes;  // empty -> preset for scheme
  double dropout_rate = -1;               // negative -> preset
  TrainingConfig training;

  MlpArchitecture architecture() const;
};

// Trained network(s) plus the feature/target transforms they were trained
// with. Joint: one net with four outputs. PerResponse: four single-output nets.
class AnnPredictor {
 public:
  AnnPredictor(AnnConfig config, FeaturePipeline pipeline, TargetTransform targets,
               std::vector<MlpModel> models);

  // Returns the predictor; histories (one per net) go to `histories` when set.
  static AnnPredictor train(std::span<const WeldRecord> train_records,
                            const AnnConfig& config,
                            std::vector<TrainingHistory>* histories = nullptr);

  const AnnConfig& config() const { return config_; }
  const FeaturePipeline& pipeline() const { return pipeline_; }
  const TargetTransform& targets() const { return targets_; }
  const std::vector<MlpModel>& models() const { return models_; }

  Eigen::MatrixXd predict(std::span<const WeldRecord> records) const;
  Eigen::MatrixXd predict_features(const Eigen::MatrixXd& features) const;

 private:
  AnnConfig config_;
  FeaturePipeline pipeline_;
  TargetTransform targets_;
  std::vector<MlpModel> models_;
};

// Model file: `key = value` header (scheme, head, target scaling,
// architecture, ...) then per layer a `layer <k> <rows> <cols>` line, `rows`
// lines of weights (row-major) and one bias line; 17 significant digits.
struct MlpFileHeader {
  FeatureScheme scheme = FeatureScheme::Linear;
  ExpansionOrder order = ExpansionOrder::ExpandThenScale;
  HeadMode head = HeadMode::Joint;
  bool scale_targets = false;
};

std::string serialize(const MlpModel& model, const MlpFileHeader& header);
MlpModel parse_mlp_model(std::string_view text, MlpFileHeader* header = nullptr);

void save_ann(const std::filesystem::path& path, const AnnPredictor& predictor);
// Rebuilds the predictor; the feature and target transforms are refitted on
// `train_records`, which must be the data the model was trained on.
AnnPredictor load_ann(const std::filesystem::path& path,
                      std::span<const WeldRecord> train_records);

}  // namespace weldgeom
