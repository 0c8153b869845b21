#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "plateau/error.hpp"

namespace plateau {

/// Dense n-qubit register. Qubit i is bit i of the basis index, so qubit 0 is
/// the least significant bit.
///
/// `Scalar` is the amplitude type: complex by default. Every gate here is
/// real, so a real `Scalar` is an exact representation for states prepared
/// from real amplitudes.
///
/// Gate kernels are hidden friends that mutate a state the caller owns; copy
/// the state first when the original is still needed.
template <typename Scalar = std::complex<double>>
class StateVector {
 public:
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  using Amplitudes = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RealVector = Eigen::Matrix<RealScalar, Eigen::Dynamic, 1>;

  static constexpr int kMaxQubits = 24;
  static constexpr double kInputNormTolerance = 1e-9;

  /// Takes ownership of `amplitudes`; length must be 2^n and norm 1 (1e-9).
  StateVector(int num_qubits, Amplitudes amplitudes)
      : num_qubits_(checked_width(num_qubits)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != Eigen::Index{1} << num_qubits_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "state of " + std::to_string(num_qubits_) + " qubits needs " +
                      std::to_string(Eigen::Index{1} << num_qubits_) + " amplitudes, got " +
                      std::to_string(amplitudes_.size()));
    }
    if (!amplitudes_.allFinite()) {
      throw Error(ErrorKind::NormError, "state amplitudes must be finite");
    }
    const double norm2 = static_cast<double>(squared_norm());
    if (std::abs(norm2 - 1.0) > kInputNormTolerance) {
      throw Error(ErrorKind::NormError,
                  "state amplitudes must have unit norm, got squared norm " + std::to_string(norm2));
    }
  }

  int num_qubits() const noexcept { return num_qubits_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const Amplitudes& amplitudes() const noexcept { return amplitudes_; }
  const Scalar& operator[](Eigen::Index i) const { return amplitudes_[i]; }
  RealScalar squared_norm() const { return amplitudes_.squaredNorm(); }

  static int checked_width(int n) {
    if (n < 1 || n > kMaxQubits) {
      throw Error(ErrorKind::InvalidWidth, "qubit count " + std::to_string(n) +
                                               " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    return n;
  }

  // Ry(angle) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]] on `qubit`.
  friend void apply_ry(StateVector& state, int qubit, RealScalar angle) {
    state.check_qubit(qubit);
    const RealScalar c = std::cos(angle / RealScalar(2));
    const RealScalar s = std::sin(angle / RealScalar(2));
    const Eigen::Index stride = Eigen::Index{1} << qubit;
    const Eigen::Index dim = state.dim();
    Scalar* a = state.amplitudes_.data();
    if (stride == 1) {
      for (Eigen::Index k = 0; k < dim; k += 2) {
        const Scalar a0 = a[k];
        const Scalar a1 = a[k + 1];
        a[k] = c * a0 - s * a1;
        a[k + 1] = s * a0 + c * a1;
      }
      return;
    }
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
      Scalar* __restrict lo = a + base;
      Scalar* __restrict hi = a + base + stride;
      for (Eigen::Index k = 0; k < stride; ++k) {
        const Scalar a0 = lo[k];
        const Scalar a1 = hi[k];
        lo[k] = c * a0 - s * a1;
        hi[k] = s * a0 + c * a1;
      }
    }
  }

  friend void apply_cnot(StateVector& state, int control, int target) {
    if (control == target || control < 0 || target < 0 || control >= state.num_qubits_ ||
        target >= state.num_qubits_) {
      throw Error(ErrorKind::InvalidGate, "invalid CNOT(control=" + std::to_string(control) +
                                              ", target=" + std::to_string(target) + ") on " +
                                              std::to_string(state.num_qubits_) + " qubits");
    }
    // Visit only indices with the control bit set and the target bit clear.
    const int lo = std::min(control, target);
    const int hi = std::max(control, target);
    const Eigen::Index cmask = Eigen::Index{1} << control;
    const Eigen::Index tmask = Eigen::Index{1} << target;
    Scalar* a = state.amplitudes_.data();
    for (Eigen::Index k = 0; k < state.dim() / 4; ++k) {
      const Eigen::Index i = insert_zero(insert_zero(k, lo), hi) | cmask;
      std::swap(a[i], a[i | tmask]);
    }
  }

  /// Gather: amplitude i becomes old amplitude source[i]. `source` must be a
  /// permutation of the basis indices.
  friend void apply_basis_permutation(StateVector& state, const std::vector<Eigen::Index>& source) {
    if (static_cast<Eigen::Index>(source.size()) != state.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "basis permutation of length " + std::to_string(source.size()) +
                                                    " for " + std::to_string(state.dim()) + " amplitudes");
    }
    thread_local Amplitudes scratch;
    scratch.resize(state.dim());
    scratch = state.amplitudes_(source);
    state.amplitudes_.swap(scratch);
  }

  /// <Z_qubit> = sum |amp|^2 * (+1 if the qubit bit is 0 else -1).
  friend RealScalar expectation_z(const StateVector& state, int qubit) {
    state.check_qubit(qubit);
    const Eigen::Index mask = Eigen::Index{1} << qubit;
    RealScalar acc = 0;
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
      const RealScalar p = std::norm(state.amplitudes_[i]);
      acc += (i & mask) ? -p : p;
    }
    return acc;
  }

  friend RealVector expectation_z_all(const StateVector& state) {
    const RealVector probs = state.amplitudes_.cwiseAbs2();
    const RealScalar total = probs.sum();
    RealVector out(state.num_qubits_);
    for (int q = 0; q < state.num_qubits_; ++q) {
      // Probabilities with bit q set, viewed as a (2^q) x (dim / 2^(q+1)) block grid.
      const Eigen::Index stride = Eigen::Index{1} << q;
      const Eigen::Map<const Eigen::Matrix<RealScalar, Eigen::Dynamic, Eigen::Dynamic>, 0, Eigen::OuterStride<>>
          ones(probs.data() + stride, stride, state.dim() / (2 * stride), Eigen::OuterStride<>(2 * stride));
      out[q] = total - 2 * ones.sum();
    }
    return out;
  }

 private:
  static Eigen::Index insert_zero(Eigen::Index k, int bit) {
    const Eigen::Index low = k & ((Eigen::Index{1} << bit) - 1);
    return ((k >> bit) << (bit + 1)) | low;
  }

  void check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= num_qubits_) {
      throw Error(ErrorKind::InvalidIndex, "qubit index " + std::to_string(qubit) +
                                               " out of range for " +
                                               std::to_string(num_qubits_) + " qubits");
    }
  }

  int num_qubits_;
  Amplitudes amplitudes_;
};

template <typename Scalar = std::complex<double>>
StateVector<Scalar> zero_state(int num_qubits) {
  using State = StateVector<Scalar>;
  typename State::Amplitudes amps =
      State::Amplitudes::Zero(Eigen::Index{1} << State::checked_width(num_qubits));
  amps[0] = 1;
  return State(num_qubits, std::move(amps));
}

template <typename Scalar = std::complex<double>>
StateVector<Scalar> set_amplitudes(int num_qubits,
                                   typename StateVector<Scalar>::Amplitudes amplitudes) {
  return StateVector<Scalar>(num_qubits, std::move(amplitudes));
}

}  // namespace plateau
