#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>

#include "plateau/ansatz.hpp"
#include "plateau/encoding.hpp"

namespace plateau {

inline constexpr int kNumClasses = 10;
inline constexpr double kProbabilityFloor = 1e-12;

/// Amplitude type for the training path. Encodings and gates are real, so
/// real amplitudes give the same expectations as complex ones.
using TrainingScalar = double;

/// Classical output layer: logits = weights * expectations + biases.
struct DenseParams {
  Eigen::MatrixXd weights;  // kNumClasses x n
  Eigen::VectorXd biases;   // kNumClasses

  static DenseParams zeros(int width);
  /// Weights uniform on +-sqrt(6 / (n + 10)), biases zero.
  static DenseParams initialize(int width, std::uint64_t seed);
};

struct ModelParameters {
  ParameterVector<double> theta;
  DenseParams dense;

  static ModelParameters initialize(const AnsatzSpec& spec, std::uint64_t seed);
  void check_shape(const AnsatzSpec& spec) const;
};

struct LossGradients {
  Eigen::VectorXd d_theta;
  Eigen::MatrixXd d_weights;
  Eigen::VectorXd d_biases;

  static LossGradients zeros(const AnsatzSpec& spec);

  LossGradients& operator+=(const LossGradients& other);
  LossGradients& operator*=(double factor);
};

Eigen::VectorXd dense_logits(const Eigen::Ref<const Eigen::VectorXd>& expectations, const DenseParams& dense);

/// Numerically stable softmax of the dense-layer logits.
Eigen::VectorXd dense_softmax(const Eigen::Ref<const Eigen::VectorXd>& expectations, const DenseParams& dense);

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits);

/// -ln(max(p_label, 1e-12)).
double cross_entropy(const Eigen::Ref<const Eigen::VectorXd>& probabilities, int label);

/// Lowest index wins ties.
int predicted_class(const Eigen::Ref<const Eigen::VectorXd>& probabilities);

struct SampleLoss {
  double loss = 0.0;
  LossGradients grads;
  Eigen::VectorXd probabilities;
};

/// Loss and full chain-rule gradient for one sample. The quantum part uses
/// the parameter-shift Jacobian of the per-qubit expectations.
SampleLoss loss_and_gradients(const Eigen::Ref<const FeatureVector>& x, int label, const ModelParameters& model,
                              const AnsatzSpec& spec, const Encoder& encoder);

/// Forward pass only.
Eigen::VectorXd predict_probabilities(const Eigen::Ref<const FeatureVector>& x, const ModelParameters& model,
                                      const AnsatzSpec& spec, const Encoder& encoder);

struct BatchLoss {
  double loss = 0.0;
  LossGradients grads;
  int correct = 0;
  int size = 0;
};

/// Mean loss and gradients over the given rows. Per-sample terms are summed
/// in row order so results do not depend on scheduling.
BatchLoss batch_loss_and_gradients(const Eigen::Ref<const FeatureMatrix>& features, std::span<const int> labels,
                                   std::span<const Eigen::Index> rows, const ModelParameters& model,
                                   const AnsatzSpec& spec, const Encoder& encoder);

}  // namespace plateau
