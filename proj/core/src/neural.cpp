// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "astoi/cost.hpp"
#include "astoi/errors.hpp"

namespace astoi {

namespace {

// Keeps sigmoid outputs strictly inside (0, 1) even when exp() saturates.
constexpr double kSigmoidLow = std::numeric_limits<double>::min();
const double kSigmoidHigh = std::nextafter(1.0, 0.0);

double Sigmoid(double z) {
  const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(s, kSigmoidLow, kSigmoidHigh);
}

bool HasBatchNorm(const MlpModel& model, std::size_t layer) { return layer < model.batch_norm.size(); }

void CheckModel(const MlpModel& model) {
  if (model.layers.empty()) throw InvalidArgument("model has no layers");
  if (model.batch_norm.size() >= model.layers.size()) {
    throw InvalidArgument("batch norm is only allowed on hidden layers");
  }
}

}  // namespace

std::string ObjectiveName(Objective objective) {
  switch (objective) {
    case Objective::kElc:
      return "elc";
    case Objective::kEmse:
      return "emse";
    case Objective::kSpectralMse:
      return "spectral-mse";
  }
  return "unknown";
}

Objective ParseObjective(const std::string& name) {
  if (name == "elc") return Objective::kElc;
  if (name == "emse") return Objective::kEmse;
  if (name == "spectral-mse") return Objective::kSpectralMse;
  throw InvalidArgument("unknown objective '" + name + "'");
}

bool operator==(const MlpModel& a, const MlpModel& b) {
  if (a.objective != b.objective || a.block_len != b.block_len || a.layers.size() != b.layers.size() ||
      a.batch_norm.size() != b.batch_norm.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const DenseLayer& x = a.layers[i];
    const DenseLayer& y = b.layers[i];
    if (x.activation != y.activation || x.weights.rows() != y.weights.rows() ||
        x.weights.cols() != y.weights.cols() || x.weights != y.weights || x.bias != y.bias) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.batch_norm.size(); ++i) {
    const BatchNorm& x = a.batch_norm[i];
    const BatchNorm& y = b.batch_norm[i];
    if (x.gamma != y.gamma || x.beta != y.beta || x.running_mean != y.running_mean ||
        x.running_var != y.running_var) {
      return false;
    }
  }
  return true;
}

MlpModel InitModel(const ModelShape& shape, std::uint64_t seed) {
  if (shape.input_dim <= 0 || shape.output_dim <= 0 || shape.block_len <= 0 ||
      shape.output_dim % shape.block_len != 0) {
    throw InvalidArgument("invalid model shape");
  }
  std::mt19937_64 rng(seed);
  MlpModel model;
  model.objective = shape.objective;
  model.block_len = shape.block_len;

  int fan_in = shape.input_dim;
  auto add_layer = [&](int fan_out, Activation act) {
    const double limit = act == Activation::kRelu ? std::sqrt(6.0 / fan_in)
                                                  : std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.activation = act;
    layer.weights.resize(fan_out, fan_in);
    // Row-major fill order so the draw sequence matches the file layout.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = dist(rng);
    }
    layer.bias = Vector::Zero(fan_out);
    model.layers.push_back(std::move(layer));
    fan_in = fan_out;
  };

  for (int width : shape.hidden) {
    if (width <= 0) throw InvalidArgument("hidden width must be positive");
    add_layer(width, Activation::kRelu);
    BatchNorm bn;
    bn.gamma = Vector::Ones(width);
    bn.beta = Vector::Zero(width);
    bn.running_mean = Vector::Zero(width);
    bn.running_var = Vector::Ones(width);
    model.batch_norm.push_back(std::move(bn));
  }
  add_layer(shape.output_dim, Activation::kSigmoid);
  return model;
}

Matrix Forward(const MlpModel& model, const Matrix& batch, Mode mode, ForwardCache* cache) {
  CheckModel(model);
  if (batch.rows() != model.input_dim()) {
    throw InvalidArgument("batch has " + std::to_string(batch.rows()) + " features, model expects " +
                          std::to_string(model.input_dim()));
  }
  if (cache != nullptr) *cache = ForwardCache{};

  Matrix a = batch;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const DenseLayer& layer = model.layers[i];
    if (cache != nullptr) cache->inputs.push_back(a);
    Matrix z = layer.weights * a;
    z.colwise() += layer.bias;

    if (HasBatchNorm(model, i)) {
      const BatchNorm& bn = model.batch_norm[i];
      Vector mean, var;
      if (mode == Mode::kTrain) {
        mean = z.rowwise().mean();
        var = (z.colwise() - mean).array().square().rowwise().mean();
      } else {
        mean = bn.running_mean;
        var = bn.running_var;
      }
      const Vector inv_std = (var.array() + kBatchNormEps).rsqrt();
      Matrix zn = (z.colwise() - mean).array().colwise() * inv_std.array();
      z = (zn.array().colwise() * bn.gamma.array()).colwise() + bn.beta.array();
      if (cache != nullptr) {
        cache->normalized.push_back(std::move(zn));
        cache->batch_mean.push_back(std::move(mean));
        cache->batch_var.push_back(std::move(var));
      }
    }

    if (layer.activation == Activation::kRelu) {
      a = z.cwiseMax(0.0);
    } else {
      a = z.unaryExpr([](double v) { return Sigmoid(v); });
    }
    if (cache != nullptr) cache->outputs.push_back(a);
  }
  return a;
}

Gradients Gradients::ZerosLike(const MlpModel& model) {
  Gradients g;
  for (const DenseLayer& layer : model.layers) {
    g.weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    g.bias.push_back(Vector::Zero(layer.bias.size()));
  }
  for (const BatchNorm& bn : model.batch_norm) {
    g.gamma.push_back(Vector::Zero(bn.gamma.size()));
    g.beta.push_back(Vector::Zero(bn.beta.size()));
  }
  return g;
}

Gradients Backward(const MlpModel& model, const ForwardCache& cache, const Matrix& output_grad) {
  CheckModel(model);
  if (cache.outputs.size() != model.layers.size()) {
    throw InvalidArgument("forward cache does not match model");
  }
  Gradients g = Gradients::ZerosLike(model);
  const auto batch = static_cast<double>(output_grad.cols());

  Matrix da = output_grad;
  for (std::size_t idx = model.layers.size(); idx-- > 0;) {
    const DenseLayer& layer = model.layers[idx];
    const Matrix& out = cache.outputs[idx];
    Matrix dz;
    if (layer.activation == Activation::kSigmoid) {
      dz = da.array() * out.array() * (1.0 - out.array());
    } else {
      dz = (out.array() > 0.0).select(da, 0.0);
    }

    if (HasBatchNorm(model, idx)) {
      const BatchNorm& bn = model.batch_norm[idx];
      const Matrix& zn = cache.normalized[idx];
      g.gamma[idx] = (dz.array() * zn.array()).rowwise().sum();
      g.beta[idx] = dz.rowwise().sum();
      const Vector inv_std = (cache.batch_var[idx].array() + kBatchNormEps).rsqrt();
      const Matrix dzn = dz.array().colwise() * bn.gamma.array();
      const Vector sum_dzn = dzn.rowwise().sum();
      const Vector sum_dzn_zn = (dzn.array() * zn.array()).rowwise().sum();
      Matrix centered = (batch * dzn).colwise() - sum_dzn;
      centered -= (zn.array().colwise() * sum_dzn_zn.array()).matrix();
      dz = (centered.array().colwise() * (inv_std.array() / batch)).matrix();
    }

    g.weights[idx] = dz * cache.inputs[idx].transpose();
    g.bias[idx] = dz.rowwise().sum();
    if (idx > 0) da = layer.weights.transpose() * dz;
  }
  return g;
}

LossResult EvaluateLoss(Objective objective, int block_len, const Matrix& gains, const Matrix& clean,
                        const Matrix& noisy, std::span<const double> weights) {
  if (gains.rows() != clean.rows() || gains.rows() != noisy.rows() || gains.cols() != clean.cols() ||
      gains.cols() != noisy.cols()) {
    throw InvalidArgument("gain and target shapes differ");
  }
  if (block_len <= 0 || gains.rows() % block_len != 0) {
    throw InvalidArgument("output dimension is not a multiple of the block length");
  }
  if (!weights.empty() && weights.size() != static_cast<std::size_t>(gains.cols())) {
    throw InvalidArgument("one weight per sample expected");
  }

  LossResult r;
  r.gain_grad = Matrix::Zero(gains.rows(), gains.cols());
  const auto n = static_cast<std::size_t>(block_len);
  std::vector<double> estimate(n);
  const Eigen::Index blocks = gains.rows() / block_len;

  for (Eigen::Index b = 0; b < gains.cols(); ++b) {
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(b)];
    for (Eigen::Index k = 0; k < blocks; ++k) {
      const Eigen::Index off = k * block_len;
      const double* g = gains.col(b).data() + off;
      const double* x = clean.col(b).data() + off;
      const double* y = noisy.col(b).data() + off;
      double* dg = r.gain_grad.col(b).data() + off;
      for (std::size_t m = 0; m < n; ++m) estimate[m] = g[m] * y[m];
      const std::span<const double> xs(x, n);

      if (objective == Objective::kElc) {
        double l;
        std::vector<double> grad;
        try {
          l = Elc(xs, estimate);
          try {
            grad = ElcGrad(xs, estimate);
          } catch (const DegenerateGradient&) {
            grad = ElcGradReduced(xs, estimate);
          }
        } catch (const DegenerateInput&) {
          ++r.degenerate;
          continue;
        }
        // Minimizing -L.
        r.loss -= w * l;
        for (std::size_t m = 0; m < n; ++m) dg[m] = -w * grad[m] * y[m];
      } else {
        r.loss += w * Emse(xs, estimate);
        const std::vector<double> grad = EmseGrad(xs, estimate);
        for (std::size_t m = 0; m < n; ++m) dg[m] = w * grad[m] * y[m];
      }
      ++r.scored;
    }
  }
  return r;
}

GradientResult ComputeGradients(const MlpModel& model, const Matrix& inputs, const Matrix& clean,
                                const Matrix& noisy, std::span<const double> weights) {
  ForwardCache cache;
  const Matrix gains = Forward(model, inputs, Mode::kTrain, &cache);
  GradientResult out;
  out.loss = EvaluateLoss(model.objective, model.block_len, gains, clean, noisy, weights);
  out.grads = Backward(model, cache, out.loss.gain_grad);
  return out;
}

InMemoryData::InMemoryData(Matrix inputs, Matrix clean, Matrix noisy)
    : inputs_(std::move(inputs)), clean_(std::move(clean)), noisy_(std::move(noisy)) {
  if (inputs_.cols() != clean_.cols() || inputs_.cols() != noisy_.cols() ||
      clean_.rows() != noisy_.rows()) {
    throw InvalidArgument("training matrices disagree in shape");
  }
}

void InMemoryData::Gather(std::span<const std::size_t> indices, Matrix& inputs, Matrix& clean,
                          Matrix& noisy) const {
  const auto b = static_cast<Eigen::Index>(indices.size());
  inputs.resize(inputs_.rows(), b);
  clean.resize(clean_.rows(), b);
  noisy.resize(noisy_.rows(), b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto src = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]);
    inputs.col(i) = inputs_.col(src);
    clean.col(i) = clean_.col(src);
    noisy.col(i) = noisy_.col(src);
  }
}

TrainConfig TrainConfig::Defaults(Objective objective) {
  TrainConfig c;
  c.initial_lr_per_sample = objective == Objective::kElc ? 0.01 : 5e-5;
  return c;
}

LrSchedule::LrSchedule(double initial_lr, double decay, double floor)
    : lr_(initial_lr), decay_(decay), floor_(floor), best_(std::numeric_limits<double>::infinity()) {
  if (!(initial_lr >= 0.0) || !(decay > 0.0 && decay < 1.0) || !(floor >= 0.0)) {
    throw InvalidArgument("invalid learning-rate schedule");
  }
}

bool LrSchedule::Update(double validation_cost) {
  if (seen_ && validation_cost > best_) {
    lr_ *= decay_;
    return false;
  }
  seen_ = true;
  best_ = validation_cost;
  return true;
}

double EvaluateCost(const MlpModel& model, const TrainingData& data) {
  constexpr std::size_t kChunk = 2048;
  std::vector<std::size_t> idx;
  Matrix in, clean, noisy;
  double loss = 0.0;
  long scored = 0;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    const std::size_t end = std::min(data.size(), start + kChunk);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    data.Gather(idx, in, clean, noisy);
    const Matrix gains = Forward(model, in, Mode::kInfer);
    const LossResult r = EvaluateLoss(model.objective, model.block_len, gains, clean, noisy);
    loss += r.loss;
    scored += r.scored;
  }
  return scored > 0 ? loss / static_cast<double>(scored) : 0.0;
}

namespace {

void ApplyStep(MlpModel& model, const Gradients& grads, double lr) {
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    model.layers[i].weights.noalias() -= lr * grads.weights[i];
    model.layers[i].bias.noalias() -= lr * grads.bias[i];
  }
  for (std::size_t i = 0; i < model.batch_norm.size(); ++i) {
    model.batch_norm[i].gamma.noalias() -= lr * grads.gamma[i];
    model.batch_norm[i].beta.noalias() -= lr * grads.beta[i];
  }
}

bool AllFinite(const MlpModel& model) {
  for (const DenseLayer& l : model.layers) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  for (const BatchNorm& bn : model.batch_norm) {
    if (!bn.gamma.allFinite() || !bn.beta.allFinite() || !bn.running_mean.allFinite() ||
        !bn.running_var.allFinite()) {
      return false;
    }
  }
  return true;
}

}  // namespace

TrainResult Train(MlpModel model, const TrainingData& train, const TrainingData& validation,
                  const TrainConfig& config) {
  CheckModel(model);
  if (train.size() == 0 || validation.size() == 0) throw InvalidArgument("empty training or validation set");
  if (train.input_dim() != model.input_dim() || validation.input_dim() != model.input_dim() ||
      train.target_dim() != model.output_dim() || validation.target_dim() != model.output_dim()) {
    throw InvalidArgument("dataset dimensions do not match the model");
  }
  if (config.minibatch <= 0 || config.max_epochs < 0) throw InvalidArgument("invalid training config");

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  LrSchedule schedule(config.initial_lr_per_sample, config.lr_decay, config.lr_floor);
  TrainResult result{model, {}};
  Matrix in, clean, noisy;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (schedule.exhausted()) {
      result.report.stop_reason = StopReason::kLrFloor;
      break;
    }
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    long scored = 0;
    long degenerate = 0;
    const auto batch = static_cast<std::size_t>(config.minibatch);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      train.Gather(std::span<const std::size_t>(order).subspan(start, end - start), in, clean, noisy);

      ForwardCache cache;
      const Matrix gains = Forward(model, in, Mode::kTrain, &cache);
      GradientResult step;
      step.loss = EvaluateLoss(model.objective, model.block_len, gains, clean, noisy);
      if (!std::isfinite(step.loss.loss)) {
        throw NumericError("non-finite training loss in epoch " + std::to_string(epoch) + ", batch at " +
                           std::to_string(start));
      }
      step.grads = Backward(model, cache, step.loss.gain_grad);
      ApplyStep(model, step.grads, schedule.lr());
      for (std::size_t i = 0; i < model.batch_norm.size(); ++i) {
        BatchNorm& bn = model.batch_norm[i];
        bn.running_mean = kBatchNormMomentum * bn.running_mean + (1.0 - kBatchNormMomentum) * cache.batch_mean[i];
        bn.running_var = kBatchNormMomentum * bn.running_var + (1.0 - kBatchNormMomentum) * cache.batch_var[i];
      }
      loss += step.loss.loss;
      scored += step.loss.scored;
      degenerate += step.loss.degenerate;
    }
    if (!AllFinite(model)) {
      throw NumericError("non-finite model parameters after epoch " + std::to_string(epoch));
    }

    EpochStats stats;
    stats.train_cost = scored > 0 ? loss / static_cast<double>(scored) : 0.0;
    stats.validation_cost = EvaluateCost(model, validation);
    stats.degenerate = degenerate;
    if (!std::isfinite(stats.validation_cost)) {
      throw NumericError("non-finite validation cost in epoch " + std::to_string(epoch));
    }
    if (schedule.Update(stats.validation_cost)) {
      result.model = model;
      result.report.best_epoch = epoch;
    }
    stats.lr = schedule.lr();
    result.report.epochs.push_back(stats);
    if (schedule.exhausted()) {
      result.report.stop_reason = StopReason::kLrFloor;
      break;
    }
  }
  return result;
}

}  // namespace astoi
