#include "plateau/head.hpp"

#include <cmath>

#include "plateau/gradient.hpp"
#include "plateau/random.hpp"

namespace plateau {

DenseParams DenseParams::zeros(int width) {
  return {Eigen::MatrixXd::Zero(kNumClasses, width), Eigen::VectorXd::Zero(kNumClasses)};
}

DenseParams DenseParams::initialize(int width, std::uint64_t seed) {
  DenseParams dense = zeros(width);
  const double limit = std::sqrt(6.0 / (width + kNumClasses));
  Rng rng(seed);
  for (Eigen::Index r = 0; r < dense.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < dense.weights.cols(); ++c) dense.weights(r, c) = uniform(rng, -limit, limit);
  }
  return dense;
}

ModelParameters ModelParameters::initialize(const AnsatzSpec& spec, std::uint64_t seed) {
  return {init_parameters(spec, derive_seed(seed, 1)), DenseParams::initialize(spec.width, derive_seed(seed, 2))};
}

void ModelParameters::check_shape(const AnsatzSpec& spec) const {
  if (theta.size() != spec.parameter_count() || dense.weights.rows() != kNumClasses ||
      dense.weights.cols() != spec.width || dense.biases.size() != kNumClasses) {
    throw Error(ErrorKind::DimensionMismatch, "model parameters do not match the ansatz shape");
  }
}

LossGradients LossGradients::zeros(const AnsatzSpec& spec) {
  return {Eigen::VectorXd::Zero(spec.parameter_count()), Eigen::MatrixXd::Zero(kNumClasses, spec.width),
          Eigen::VectorXd::Zero(kNumClasses)};
}

LossGradients& LossGradients::operator+=(const LossGradients& other) {
  d_theta += other.d_theta;
  d_weights += other.d_weights;
  d_biases += other.d_biases;
  return *this;
}

LossGradients& LossGradients::operator*=(double factor) {
  d_theta *= factor;
  d_weights *= factor;
  d_biases *= factor;
  return *this;
}

Eigen::VectorXd dense_logits(const Eigen::Ref<const Eigen::VectorXd>& expectations, const DenseParams& dense) {
  if (expectations.size() != dense.weights.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "dense layer expects " + std::to_string(dense.weights.cols()) +
                                                  " inputs, got " + std::to_string(expectations.size()));
  }
  return dense.weights * expectations + dense.biases;
}

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

Eigen::VectorXd dense_softmax(const Eigen::Ref<const Eigen::VectorXd>& expectations, const DenseParams& dense) {
  return softmax(dense_logits(expectations, dense));
}

double cross_entropy(const Eigen::Ref<const Eigen::VectorXd>& probabilities, int label) {
  if (label < 0 || label >= probabilities.size()) {
    throw Error(ErrorKind::InvalidIndex, "label " + std::to_string(label) + " out of range");
  }
  return -std::log(std::max(probabilities[label], kProbabilityFloor));
}

int predicted_class(const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < probabilities.size(); ++k) {
    if (probabilities[k] > probabilities[best]) best = k;
  }
  return static_cast<int>(best);
}

Eigen::VectorXd predict_probabilities(const Eigen::Ref<const FeatureVector>& x, const ModelParameters& model,
                                      const AnsatzSpec& spec, const Encoder& encoder) {
  const auto prep = encoder.encode<TrainingScalar>(x);
  return dense_softmax(forward(prep, spec, model.theta), model.dense);
}

SampleLoss loss_and_gradients(const Eigen::Ref<const FeatureVector>& x, int label, const ModelParameters& model,
                              const AnsatzSpec& spec, const Encoder& encoder) {
  model.check_shape(spec);
  const auto prep = encoder.encode<TrainingScalar>(x);
  const Eigen::VectorXd expectations = forward(prep, spec, model.theta);

  SampleLoss out;
  out.probabilities = dense_softmax(expectations, model.dense);
  out.loss = cross_entropy(out.probabilities, label);

  Eigen::VectorXd delta = out.probabilities;
  delta[label] -= 1.0;
  out.grads.d_biases = delta;
  out.grads.d_weights = delta * expectations.transpose();
  const Eigen::VectorXd d_expectations = model.dense.weights.transpose() * delta;
  if (d_expectations.isZero(0.0)) {
    out.grads.d_theta = Eigen::VectorXd::Zero(spec.parameter_count());
  } else {
    out.grads.d_theta = parameter_shift_jacobian(prep, spec, model.theta).transpose() * d_expectations;
  }
  return out;
}

BatchLoss batch_loss_and_gradients(const Eigen::Ref<const FeatureMatrix>& features, std::span<const int> labels,
                                   std::span<const Eigen::Index> rows, const ModelParameters& model,
                                   const AnsatzSpec& spec, const Encoder& encoder) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "feature and label counts differ");
  }
  BatchLoss batch{0.0, LossGradients::zeros(spec), 0, static_cast<int>(rows.size())};
  for (const Eigen::Index row : rows) {
    const auto sample = loss_and_gradients(features.row(row).transpose(), labels[row], model, spec, encoder);
    batch.loss += sample.loss;
    batch.grads += sample.grads;
    if (predicted_class(sample.probabilities) == labels[row]) ++batch.correct;
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  batch.loss *= inv;
  batch.grads *= inv;
  return batch;
}

}  // namespace plateau
