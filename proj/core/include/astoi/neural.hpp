// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_NEURAL_HPP_
#define ASTOI_NEURAL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "astoi/types.hpp"

namespace astoi {

enum class Activation : std::uint8_t { kRelu = 0, kSigmoid = 1 };

// kSpectralMse is the EMSE loss applied to STFT magnitudes by the classical
// baseline; the arithmetic is identical to kEmse, only the tag differs.
enum class Objective : std::uint8_t { kElc = 0, kEmse = 1, kSpectralMse = 2 };

enum class Mode { kTrain, kInfer };

std::string ObjectiveName(Objective objective);
Objective ParseObjective(const std::string& name);

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::kRelu;
};

/// Normalizes a hidden layer's pre-activations.
struct BatchNorm {
  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;
};

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

/// Feed-forward gain estimator: ReLU hidden layers with batch norm on their
/// pre-activations, then a sigmoid output layer. batch_norm[i] belongs to
/// layers[i]; the output layer has none.
struct MlpModel {
  std::vector<DenseLayer> layers;
  std::vector<BatchNorm> batch_norm;
  Objective objective = Objective::kElc;
  // Outputs are scored in consecutive blocks of this many entries (one
  // envelope vector each).
  int block_len = 30;

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows()); }

  friend bool operator==(const MlpModel& a, const MlpModel& b);
};

struct ModelShape {
  int input_dim = 450;
  std::vector<int> hidden = {512, 512, 512};
  int output_dim = 30;
  int block_len = 30;
  Objective objective = Objective::kElc;
};

/// He-uniform weights for ReLU layers, Xavier-uniform for the sigmoid
/// layer, zero biases, identity batch norm.
MlpModel InitModel(const ModelShape& shape, std::uint64_t seed);

/// Intermediate values kept by a Train-mode forward pass.
struct ForwardCache {
  std::vector<Matrix> inputs;      // activation entering layer i
  std::vector<Matrix> normalized;  // batch-normalized pre-activation (hidden layers)
  std::vector<Vector> batch_mean;
  std::vector<Vector> batch_var;
  std::vector<Matrix> outputs;     // activation leaving layer i
};

/// Runs a batch laid out one sample per column (input_dim x B). Train mode
/// normalizes with batch statistics, Infer mode with the running ones.
/// Returns output_dim x B values in (0, 1).
Matrix Forward(const MlpModel& model, const Matrix& batch, Mode mode, ForwardCache* cache = nullptr);

/// Parameter gradients, laid out like the model.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;
  std::vector<Vector> gamma;
  std::vector<Vector> beta;

  static Gradients ZerosLike(const MlpModel& model);
};

/// Back-propagates d(loss)/d(output) (output_dim x B) through a cached
/// Train-mode pass.
Gradients Backward(const MlpModel& model, const ForwardCache& cache, const Matrix& output_grad);

/// Loss summed over samples and its gradient with respect to the gains.
struct LossResult {
  double loss = 0.0;
  Matrix gain_grad;
  long scored = 0;      // blocks that contributed
  long degenerate = 0;  // blocks skipped (zero-variance ELC input)
};

/// Scores gains (output_dim x B) where the estimate is gains .* noisy and the
/// reference is clean. ELC contributes -L per block, the MSE objectives
/// their mean squared error. `weights` scales each sample (empty = all 1).
/// Degenerate ELC blocks contribute zero loss and zero gradient.
LossResult EvaluateLoss(Objective objective, int block_len, const Matrix& gains, const Matrix& clean,
                        const Matrix& noisy, std::span<const double> weights = {});

struct GradientResult {
  Gradients grads;
  LossResult loss;
};

/// Train-mode forward, loss and backward for one batch.
GradientResult ComputeGradients(const MlpModel& model, const Matrix& inputs, const Matrix& clean,
                                const Matrix& noisy, std::span<const double> weights = {});

/// Sample source for training. Column i of each output is sample indices[i].
class TrainingData {
 public:
  virtual ~TrainingData() = default;
  virtual std::size_t size() const = 0;
  virtual int input_dim() const = 0;
  virtual int target_dim() const = 0;
  virtual void Gather(std::span<const std::size_t> indices, Matrix& inputs, Matrix& clean,
                      Matrix& noisy) const = 0;
};

/// TrainingData backed by dense matrices (one sample per column).
class InMemoryData final : public TrainingData {
 public:
  InMemoryData(Matrix inputs, Matrix clean, Matrix noisy);

  std::size_t size() const override { return static_cast<std::size_t>(inputs_.cols()); }
  int input_dim() const override { return static_cast<int>(inputs_.rows()); }
  int target_dim() const override { return static_cast<int>(clean_.rows()); }
  void Gather(std::span<const std::size_t> indices, Matrix& inputs, Matrix& clean,
              Matrix& noisy) const override;

 private:
  Matrix inputs_;
  Matrix clean_;
  Matrix noisy_;
};

struct TrainConfig {
  double initial_lr_per_sample = 0.01;
  double lr_decay = 0.7;
  double lr_floor = 1e-10;
  int max_epochs = 200;
  int minibatch = 256;
  std::uint64_t seed = 1;

  /// 0.01 per sample for ELC, 5e-5 for the MSE objectives.
  static TrainConfig Defaults(Objective objective);
};

/// Decays the learning rate whenever a validation cost exceeds the best
/// one seen so far.
class LrSchedule {
 public:
  LrSchedule(double initial_lr, double decay, double floor);

  /// Feeds one epoch's validation cost; returns true if this improved (or
  /// tied) the best cost.
  bool Update(double validation_cost);

  double lr() const noexcept { return lr_; }
  double best() const noexcept { return best_; }
  bool exhausted() const noexcept { return lr_ < floor_; }

 private:
  double lr_;
  double decay_;
  double floor_;
  double best_;
  bool seen_ = false;
};

enum class StopReason { kMaxEpochs, kLrFloor };

struct EpochStats {
  double train_cost = 0.0;
  double validation_cost = 0.0;
  double lr = 0.0;  // learning rate after this epoch's schedule update
  long degenerate = 0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  StopReason stop_reason = StopReason::kMaxEpochs;
  int best_epoch = -1;
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

/// Mean per-block cost of the model on `data` in Infer mode (ELC reports -L).
double EvaluateCost(const MlpModel& model, const TrainingData& data);

/// Minibatch SGD. Each step subtracts lr * (sum of per-sample gradients).
/// After every epoch the validation cost drives LrSchedule; training stops
/// after max_epochs or once lr drops below lr_floor. Returns the model with
/// the lowest validation cost.
TrainResult Train(MlpModel model, const TrainingData& train, const TrainingData& validation,
                  const TrainConfig& config);

/// Little-endian "ASTOI" model file with a trailing CRC32.
void SaveModel(const MlpModel& model, const std::filesystem::path& path);

/// Throws IoError if unreadable and FormatError on bad magic, version,
/// truncation, checksum, or (when expected_output_dim >= 0) an output
/// dimension mismatch.
MlpModel LoadModel(const std::filesystem::path& path, int expected_output_dim = -1);

}  // namespace astoi

#endif  // ASTOI_NEURAL_HPP_
