#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "plateau/data.hpp"
#include "plateau/head.hpp"

namespace plateau {

struct TrainConfig {
  int max_epochs = 100;
  int batch_size = 16;
  double initial_lr = 0.01;
  double lr_factor = 0.1;
  int lr_patience = 3;
  int stop_patience = 4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double min_improvement = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct AdamState {
  LossGradients first_moment;
  LossGradients second_moment;
  std::int64_t step = 0;

  static AdamState zeros(const AnsatzSpec& spec);
};

/// Bias-corrected Adam update of every parameter group; increments `state.step`.
void adam_step(ModelParameters& params, const LossGradients& grads, AdamState& state, double lr,
               const TrainConfig& config = {});

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double learning_rate = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Per-epoch metrics. Wall-clock times are kept apart from the epochs so
/// the metric sequence compares bit-for-bit across reruns.
struct History {
  std::vector<EpochRecord> epochs;
  std::vector<double> epoch_seconds;
};

struct TrainResult {
  ModelParameters best;
  History history;
  int best_epoch = 0;  // 1-based epoch whose parameters were returned
  bool stopped_early = false;
};

/// Mini-batch Adam with reduce-on-plateau and early stopping, both driven by
/// the loss on `split.test`. Train metrics are running means over the epoch's
/// batches. Writes one tab-separated line per epoch to `progress` if given.
TrainResult train(ModelParameters model, const SplitDataset& split, const AnsatzSpec& spec, const Encoder& encoder,
                  const TrainConfig& config, std::ostream* progress = nullptr);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<int> predictions;
};

Evaluation evaluate(const ModelParameters& model, const Dataset& ds, const AnsatzSpec& spec, const Encoder& encoder);

}  // namespace plateau
