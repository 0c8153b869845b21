#pragma once

#include <Eigen/Core>

#include <string>

#include "plateau/simulator.hpp"

namespace plateau {

using FeatureVector = Eigen::VectorXd;
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Encoding { Amplitude, Angle };

std::string to_string(Encoding encoding);
Encoding parse_encoding(const std::string& text);

/// Zero-pads `x` to 2^n entries and normalizes it onto the state amplitudes.
template <typename Scalar = std::complex<double>>
StateVector<Scalar> amplitude_encode(const Eigen::Ref<const FeatureVector>& x, int num_qubits) {
  using State = StateVector<Scalar>;
  const Eigen::Index dim = Eigen::Index{1} << State::checked_width(num_qubits);
  if (x.size() == 0 || x.size() > dim) {
    throw Error(ErrorKind::Capacity, std::to_string(x.size()) + " features do not fit in " +
                                         std::to_string(num_qubits) + " qubits (capacity " +
                                         std::to_string(dim) + ")");
  }
  if (!x.allFinite()) throw Error(ErrorKind::InvalidArgument, "features must be finite");
  const double norm = x.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::ZeroNorm, "cannot amplitude-encode an all-zero vector");

  typename State::Amplitudes amps = State::Amplitudes::Zero(dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) amps[i] = static_cast<Scalar>(x[i] / norm);
  return State(num_qubits, std::move(amps));
}

/// Rotates qubit i of `state` by Ry(x_i). On |0> a single feature t gives
/// cos(t/2)|0> + sin(t/2)|1>.
template <typename Scalar = std::complex<double>>
StateVector<Scalar> angle_encode(const Eigen::Ref<const FeatureVector>& x, StateVector<Scalar> state) {
  if (x.size() != state.num_qubits()) {
    throw Error(ErrorKind::DimensionMismatch,
                "angle encoding needs one feature per qubit: " + std::to_string(x.size()) +
                    " features for " + std::to_string(state.num_qubits()) + " qubits");
  }
  using Real = typename StateVector<Scalar>::RealScalar;
  for (int i = 0; i < state.num_qubits(); ++i) apply_ry(state, i, static_cast<Real>(x[i]));
  return state;
}

/// Per-feature min-max map onto [0, pi], fitted on training rows.
class AngleScaler {
 public:
  static AngleScaler fit(const Eigen::Ref<const FeatureMatrix>& train_features);

  /// Maps each feature to pi * (x - min) / (max - min), clamped to [0, pi].
  /// Constant columns map to pi / 2.
  FeatureVector apply(const Eigen::Ref<const FeatureVector>& x) const;
  FeatureMatrix apply_rows(const Eigen::Ref<const FeatureMatrix>& rows) const;

  const Eigen::VectorXd& min() const noexcept { return min_; }
  const Eigen::VectorXd& max() const noexcept { return max_; }

 private:
  AngleScaler(Eigen::VectorXd min, Eigen::VectorXd max) : min_(std::move(min)), max_(std::move(max)) {}

  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
};

inline AngleScaler scaler_fit(const Eigen::Ref<const FeatureMatrix>& train_features) {
  return AngleScaler::fit(train_features);
}

inline FeatureVector scaler_apply(const AngleScaler& scaler, const Eigen::Ref<const FeatureVector>& x) {
  return scaler.apply(x);
}

/// Feature-to-state map used by the model. Angle encoding expects features
/// already reduced to `width` dimensions and scaled to radians.
struct Encoder {
  Encoding kind = Encoding::Amplitude;
  int width = 6;

  template <typename Scalar = std::complex<double>>
  StateVector<Scalar> encode(const Eigen::Ref<const FeatureVector>& x) const {
    if (kind == Encoding::Amplitude) return amplitude_encode<Scalar>(x, width);
    return angle_encode<Scalar>(x, zero_state<Scalar>(width));
  }
};

}  // namespace plateau
