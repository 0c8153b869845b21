#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "plateau/head.hpp"
#include "support/oracles.hpp"

using namespace plateau;

namespace {

struct Instance {
  AnsatzSpec spec;
  Encoder encoder;
  ModelParameters model;
  FeatureVector x;
  int label = 0;
};

Instance random_instance(std::mt19937_64& gen, int index) {
  const int n = 2 + index % 3;
  const int m = 1 + index % 2;
  const Entanglement ent = index % 2 == 0 ? Entanglement::Ring : Entanglement::None;
  const Encoding enc = (index / 2) % 2 == 0 ? Encoding::Amplitude : Encoding::Angle;
  Instance inst{{n, m, ent}, {enc, n}, {}, {}, 0};
  inst.model = ModelParameters::initialize(inst.spec, 1000 + index);
  std::normal_distribution<double> bias(0, 0.5);
  for (auto& b : inst.model.dense.biases) b = bias(gen);
  std::uniform_real_distribution<double> feature(0.05, 3.0);
  inst.x.resize(enc == Encoding::Amplitude ? (Eigen::Index{1} << n) : n);
  for (auto& v : inst.x) v = feature(gen);
  inst.label = static_cast<int>(gen() % kNumClasses);
  return inst;
}

double loss_at(const Instance& inst, const ModelParameters& model) {
  return cross_entropy(predict_probabilities(inst.x, model, inst.spec, inst.encoder), inst.label);
}

// Central differences of the scalar loss over every parameter.
LossGradients numeric_gradients(const Instance& inst, double h) {
  LossGradients g = LossGradients::zeros(inst.spec);
  ModelParameters p = inst.model;
  auto diff = [&](double& slot) {
    const double saved = slot;
    slot = saved + h;
    const double plus = loss_at(inst, p);
    slot = saved - h;
    const double minus = loss_at(inst, p);
    slot = saved;
    return (plus - minus) / (2 * h);
  };
  for (Eigen::Index j = 0; j < p.theta.size(); ++j) g.d_theta[j] = diff(p.theta[j]);
  for (Eigen::Index r = 0; r < p.dense.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.dense.weights.cols(); ++c) g.d_weights(r, c) = diff(p.dense.weights(r, c));
  }
  for (Eigen::Index k = 0; k < kNumClasses; ++k) g.d_biases[k] = diff(p.dense.biases[k]);
  return g;
}

void expect_close(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric, const char* what) {
  ASSERT_EQ(analytic.rows(), numeric.rows());
  ASSERT_EQ(analytic.cols(), numeric.cols());
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double b = numeric.data()[i];
    const bool ok = std::abs(a - b) <= 1e-7 || std::abs(a - b) <= 1e-5 * std::abs(b);
    EXPECT_TRUE(ok) << what << "[" << i << "]: analytic " << a << " numeric " << b;
  }
}

}  // namespace

TEST(DenseSoftmax, Examples) {
  const DenseParams zero = DenseParams::zeros(3);
  const Eigen::VectorXd p = dense_softmax(Eigen::Vector3d(0.2, -0.5, 0.9), zero);
  EXPECT_LT((p.array() - 0.1).abs().maxCoeff(), 1e-15);

  DenseParams dominant = DenseParams::zeros(3);
  dominant.biases[0] = 50;
  EXPECT_GT(dense_softmax(Eigen::Vector3d::Zero(), dominant)[0], 1 - 1e-15);

  std::mt19937_64 gen(1);
  DenseParams random = DenseParams::initialize(4, 3);
  const Eigen::VectorXd q = dense_softmax(Eigen::Vector4d(1, -1, 0.5, 0.25), random);
  EXPECT_GE(q.minCoeff(), 0.0);
  EXPECT_NEAR(q.sum(), 1.0, 1e-15);
  EXPECT_THROW(dense_softmax(Eigen::Vector3d::Zero(), random), Error);
}

TEST(Softmax, ShiftInvariantAndStable) {
  Eigen::VectorXd logits(10);
  logits << 0.1, -2, 3, 0.5, 0, 1, -1, 2, 0.3, 0.7;
  const Eigen::VectorXd p = softmax(logits);
  for (double c : {-100.0, 7.0, 500.0}) {
    EXPECT_LT((softmax((logits.array() + c).matrix()) - p).cwiseAbs().maxCoeff(), 1e-12);
  }
  Eigen::VectorXd huge = Eigen::VectorXd::Zero(10);
  huge[3] = 1e4;
  EXPECT_TRUE(softmax(huge).allFinite());
}

TEST(CrossEntropy, Examples) {
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(10, 0.1);
  for (int label = 0; label < 10; ++label) EXPECT_NEAR(cross_entropy(uniform, label), std::log(10.0), 1e-15);
  Eigen::VectorXd onehot = Eigen::VectorXd::Zero(10);
  onehot[4] = 1;
  EXPECT_EQ(cross_entropy(onehot, 4), 0.0);
  EXPECT_NEAR(cross_entropy(onehot, 2), -std::log(kProbabilityFloor), 1e-12);
  EXPECT_TRUE(std::isfinite(cross_entropy(onehot, 2)));
  EXPECT_THROW(cross_entropy(onehot, 10), Error);
}

TEST(PredictedClass, LowestIndexWinsTies) {
  EXPECT_EQ(predicted_class(Eigen::VectorXd::Constant(10, 0.1)), 0);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(10);
  p[3] = 0.5;
  p[7] = 0.5;
  EXPECT_EQ(predicted_class(p), 3);
}

TEST(DenseParams, InitializationRange) {
  const int n = 6;
  const DenseParams d = DenseParams::initialize(n, 9);
  const double limit = std::sqrt(6.0 / (n + 10));
  EXPECT_LE(d.weights.cwiseAbs().maxCoeff(), limit);
  EXPECT_GT(d.weights.cwiseAbs().maxCoeff(), 0.5 * limit);
  EXPECT_EQ(d.biases, Eigen::VectorXd::Zero(10));
  EXPECT_EQ(d.weights, DenseParams::initialize(n, 9).weights);
  EXPECT_NE(d.weights, DenseParams::initialize(n, 10).weights);
}

TEST(LossAndGradients, ZeroHeadKillsQuantumGradient) {
  const AnsatzSpec spec{3, 2, Entanglement::Ring};
  ModelParameters model = ModelParameters::initialize(spec, 5);
  model.dense = DenseParams::zeros(3);
  const auto out = loss_and_gradients(Eigen::VectorXd::LinSpaced(8, 1, 8), 3, model, spec, {Encoding::Amplitude, 3});
  EXPECT_EQ(out.grads.d_theta, Eigen::VectorXd::Zero(6));
  EXPECT_NEAR(out.loss, std::log(10.0), 1e-15);
}

TEST(LossAndGradients, PerfectPredictionHasZeroGradient) {
  const AnsatzSpec spec{2, 1, Entanglement::None};
  ModelParameters model = ModelParameters::initialize(spec, 5);
  model.dense.weights.setZero();
  model.dense.biases.setZero();
  model.dense.biases[6] = 800;  // p_6 rounds to 1, the rest underflow
  const auto out = loss_and_gradients(Eigen::Vector2d(0.4, 1.2), 6, model, spec, {Encoding::Angle, 2});
  EXPECT_EQ(out.loss, 0.0);
  EXPECT_LT(out.grads.d_biases.cwiseAbs().maxCoeff(), 1e-300);
  EXPECT_LT(out.grads.d_weights.cwiseAbs().maxCoeff(), 1e-300);
  EXPECT_LT(out.grads.d_theta.cwiseAbs().maxCoeff(), 1e-300);
}

TEST(LossAndGradients, MatchesFiniteDifferences) {
  std::mt19937_64 gen(77);
  for (int i = 0; i < 20; ++i) {
    const Instance inst = random_instance(gen, i);
    const auto analytic = loss_and_gradients(inst.x, inst.label, inst.model, inst.spec, inst.encoder);
    const LossGradients numeric = numeric_gradients(inst, 1e-5);
    SCOPED_TRACE("instance " + std::to_string(i));
    expect_close(analytic.grads.d_theta, numeric.d_theta, "d_theta");
    expect_close(analytic.grads.d_weights, numeric.d_weights, "d_weights");
    expect_close(analytic.grads.d_biases, numeric.d_biases, "d_biases");
    EXPECT_NEAR(analytic.grads.d_biases.sum(), 0.0, 1e-12);
    EXPECT_GE(analytic.loss, 0.0);
    EXPECT_NEAR(analytic.loss, loss_at(inst, inst.model), 1e-15);
  }
}

TEST(LossAndGradients, RejectsShapeMismatch) {
  const AnsatzSpec spec{3, 2, Entanglement::Ring};
  ModelParameters model = ModelParameters::initialize(spec, 1);
  model.theta.resize(5);
  EXPECT_THROW(loss_and_gradients(Eigen::VectorXd::Ones(8), 0, model, spec, {Encoding::Amplitude, 3}), Error);
}

TEST(BatchLoss, MeanOfSamples) {
  const AnsatzSpec spec{3, 2, Entanglement::Ring};
  const Encoder enc{Encoding::Amplitude, 3};
  const ModelParameters model = ModelParameters::initialize(spec, 11);
  FeatureMatrix features(2, 8);
  features.row(0) = Eigen::RowVectorXd::LinSpaced(8, 1, 8);
  features.row(1) = Eigen::RowVectorXd::LinSpaced(8, 8, 1);
  const std::vector<int> labels{2, 7};

  const auto a = loss_and_gradients(features.row(0).transpose(), 2, model, spec, enc);
  const auto b = loss_and_gradients(features.row(1).transpose(), 7, model, spec, enc);

  const std::vector<Eigen::Index> one{0};
  const auto single = batch_loss_and_gradients(features, labels, one, model, spec, enc);
  EXPECT_EQ(single.loss, a.loss);
  EXPECT_EQ(single.grads.d_theta, a.grads.d_theta);
  EXPECT_EQ(single.size, 1);

  const std::vector<Eigen::Index> twice{0, 0};
  const auto dup = batch_loss_and_gradients(features, labels, twice, model, spec, enc);
  EXPECT_NEAR(dup.loss, a.loss, 1e-15);
  EXPECT_LT((dup.grads.d_theta - a.grads.d_theta).cwiseAbs().maxCoeff(), 1e-15);

  const std::vector<Eigen::Index> both{0, 1};
  const auto mean = batch_loss_and_gradients(features, labels, both, model, spec, enc);
  EXPECT_NEAR(mean.loss, (a.loss + b.loss) / 2, 1e-15);
  EXPECT_LT((mean.grads.d_theta - (a.grads.d_theta + b.grads.d_theta) / 2).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((mean.grads.d_weights - (a.grads.d_weights + b.grads.d_weights) / 2).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((mean.grads.d_biases - (a.grads.d_biases + b.grads.d_biases) / 2).cwiseAbs().maxCoeff(), 1e-15);
  const int expected_correct =
      (predicted_class(a.probabilities) == 2) + (predicted_class(b.probabilities) == 7);
  EXPECT_EQ(mean.correct, expected_correct);

  EXPECT_THROW(batch_loss_and_gradients(features, labels, std::vector<Eigen::Index>{}, model, spec, enc), Error);
}
