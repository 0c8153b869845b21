#include "plateau/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "plateau/random.hpp"

namespace plateau {
namespace {

template <typename Derived, typename GradDerived, typename MDerived, typename VDerived>
void adam_update(Eigen::MatrixBase<Derived>& param, const Eigen::MatrixBase<GradDerived>& grad,
                 Eigen::MatrixBase<MDerived>& m, Eigen::MatrixBase<VDerived>& v, double lr, double bias1,
                 double bias2, const TrainConfig& cfg) {
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
  v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
  param -= (lr * (m / bias1).array() / ((v / bias2).array().sqrt() + cfg.adam_eps)).matrix();
}

constexpr std::uint64_t kEpochStream = 0x65706f6368ULL;

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, "train config: " + msg); };
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(initial_lr > 0)) fail("initial_lr must be positive");
  if (!(lr_factor > 0 && lr_factor < 1)) fail("lr_factor must lie in (0, 1)");
  if (lr_patience < 1 || stop_patience < 1) fail("patience values must be >= 1");
  if (!(adam_beta1 > 0 && adam_beta1 < 1) || !(adam_beta2 > 0 && adam_beta2 < 1)) fail("Adam betas must lie in (0, 1)");
  if (!(adam_eps > 0)) fail("adam_eps must be positive");
  if (!(min_improvement >= 0)) fail("min_improvement must be >= 0");
}

AdamState AdamState::zeros(const AnsatzSpec& spec) {
  return {LossGradients::zeros(spec), LossGradients::zeros(spec), 0};
}

void adam_step(ModelParameters& params, const LossGradients& grads, AdamState& state, double lr,
               const TrainConfig& config) {
  if (grads.d_theta.size() != params.theta.size() || grads.d_weights.rows() != params.dense.weights.rows() ||
      grads.d_weights.cols() != params.dense.weights.cols() || grads.d_biases.size() != params.dense.biases.size() ||
      state.first_moment.d_theta.size() != params.theta.size() ||
      state.first_moment.d_weights.cols() != params.dense.weights.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "Adam step: gradient, state and parameter shapes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(config.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(config.adam_beta2, t);
  adam_update(params.theta, grads.d_theta, state.first_moment.d_theta, state.second_moment.d_theta, lr, bias1,
              bias2, config);
  adam_update(params.dense.weights, grads.d_weights, state.first_moment.d_weights, state.second_moment.d_weights,
              lr, bias1, bias2, config);
  adam_update(params.dense.biases, grads.d_biases, state.first_moment.d_biases, state.second_moment.d_biases, lr,
              bias1, bias2, config);
}

Evaluation evaluate(const ModelParameters& model, const Dataset& ds, const AnsatzSpec& spec, const Encoder& encoder) {
  if (ds.size() == 0) throw Error(ErrorKind::InvalidArgument, "cannot evaluate an empty dataset");
  model.check_shape(spec);
  Evaluation out;
  out.predictions.reserve(static_cast<std::size_t>(ds.size()));
  int correct = 0;
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    const Eigen::VectorXd p = predict_probabilities(ds.features.row(r).transpose(), model, spec, encoder);
    const int label = ds.labels[static_cast<std::size_t>(r)];
    out.loss += cross_entropy(p, label);
    out.predictions.push_back(predicted_class(p));
    if (out.predictions.back() == label) ++correct;
  }
  out.loss /= static_cast<double>(ds.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
  return out;
}

TrainResult train(ModelParameters model, const SplitDataset& split, const AnsatzSpec& spec, const Encoder& encoder,
                  const TrainConfig& config, std::ostream* progress) {
  config.validate();
  spec.validate();
  model.check_shape(spec);
  if (split.train.size() == 0 || split.test.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "training needs non-empty train and test partitions");
  }

  TrainResult result{model, {}, 0, false};
  AdamState adam = AdamState::zeros(spec);
  double lr = config.initial_lr;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  int since_reduction = 0;
  const auto train_rows = static_cast<double>(split.train.size());

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    int correct = 0;
    for (const auto& rows : batches(split.train.size(), config.batch_size, derive_seed(config.seed, kEpochStream, epoch))) {
      const BatchLoss batch =
          batch_loss_and_gradients(split.train.features, split.train.labels, rows, model, spec, encoder);
      loss_sum += batch.loss * batch.size;
      correct += batch.correct;
      adam_step(model, batch.grads, adam, lr, config);
    }
    const Evaluation val = evaluate(model, split.test, spec, encoder);

    EpochRecord rec{epoch, loss_sum / train_rows, correct / train_rows, val.loss, val.accuracy, lr};
    result.history.epochs.push_back(rec);
    result.history.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (progress) {
      *progress << "epoch\t" << rec.epoch << "\ttrain_loss\t" << rec.train_loss << "\ttrain_acc\t"
                << rec.train_accuracy << "\tval_loss\t" << rec.val_loss << "\tval_acc\t" << rec.val_accuracy
                << "\tlr\t" << rec.learning_rate << '\n'
                << std::flush;
    }

    if (val.loss < best_loss - config.min_improvement) {
      best_loss = val.loss;
      result.best = model;
      result.best_epoch = epoch;
      since_best = 0;
      since_reduction = 0;
      continue;
    }
    ++since_best;
    ++since_reduction;
    if (since_best >= config.stop_patience) {
      result.stopped_early = true;
      break;
    }
    if (since_reduction >= config.lr_patience) {
      lr *= config.lr_factor;
      since_reduction = 0;
    }
  }
  return result;
}

}  // namespace plateau
