#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "plateau/random.hpp"
#include "plateau/simulator.hpp"

namespace plateau {

enum class Entanglement { Ring, None };

std::string to_string(Entanglement entanglement);
Entanglement parse_entanglement(const std::string& text);

/// Periodic ansatz: `depth` repetitions of an Ry layer (one angle per qubit),
/// each followed by a CNOT ring i -> (i+1) mod n when entangled.
struct AnsatzSpec {
  int width = 1;
  int depth = 1;
  Entanglement entanglement = Entanglement::Ring;

  void validate() const {
    StateVector<>::checked_width(width);
    if (depth < 1) throw Error(ErrorKind::InvalidArgument, "ansatz depth must be >= 1");
    if (entanglement == Entanglement::Ring && width < 2) {
      throw Error(ErrorKind::InvalidWidth, "ring entanglement needs at least 2 qubits");
    }
  }

  /// Angle (layer, qubit) lives at index layer * width + qubit.
  Eigen::Index parameter_count() const { return Eigen::Index{width} * depth; }

  friend bool operator==(const AnsatzSpec&, const AnsatzSpec&) = default;
};

inline Eigen::Index parameter_count(const AnsatzSpec& spec) { return spec.parameter_count(); }

template <typename Scalar = double>
using ParameterVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

/// Read-only view of angles; non-deduced so Scalar comes from the state.
template <typename Scalar>
using ParameterRef = std::type_identity_t<Eigen::Ref<const ParameterVector<Scalar>>>;

namespace detail {

// Source indices for CNOT(0,1), CNOT(1,2), ..., CNOT(n-1,0) applied in that
// order: the gate applied last acts on the index first.
inline std::vector<Eigen::Index> make_ring_source(int n) {
  std::vector<Eigen::Index> source(std::size_t{1} << n);
  for (std::size_t i = 0; i < source.size(); ++i) {
    auto x = static_cast<Eigen::Index>(i);
    for (int c = n - 1; c >= 0; --c) {
      if ((x >> c) & 1) x ^= Eigen::Index{1} << ((c + 1) % n);
    }
    source[i] = x;
  }
  return source;
}

inline const std::vector<Eigen::Index>& ring_source(int n) {
  thread_local std::array<std::vector<Eigen::Index>, StateVector<>::kMaxQubits + 1> cache;
  auto& entry = cache.at(static_cast<std::size_t>(n));
  if (entry.empty()) entry = make_ring_source(n);
  return entry;
}

template <typename Scalar>
void apply_ring(StateVector<Scalar>& state) {
  apply_basis_permutation(state, ring_source(state.num_qubits()));
}

template <typename Scalar>
void check_ansatz_inputs(const StateVector<Scalar>& state, const AnsatzSpec& spec,
                         const ParameterRef<RealOf<Scalar>>& theta) {
  const Eigen::Index theta_size = theta.size();
  spec.validate();
  if (state.num_qubits() != spec.width) {
    throw Error(ErrorKind::DimensionMismatch, "state has " + std::to_string(state.num_qubits()) +
                                                  " qubits, ansatz expects " +
                                                  std::to_string(spec.width));
  }
  if (theta_size != spec.parameter_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "ansatz expects " + std::to_string(spec.parameter_count()) + " parameters, got " +
                    std::to_string(theta_size));
  }
  if (!theta.allFinite()) throw Error(ErrorKind::InvalidArgument, "ansatz parameters must be finite");
}

/// Applies layers [first_layer, spec.depth) without validation.
template <typename Scalar>
void apply_layers(StateVector<Scalar>& state, const AnsatzSpec& spec,
                  const ParameterRef<RealOf<Scalar>>& theta, int first_layer) {
  const int n = spec.width;
  for (int layer = first_layer; layer < spec.depth; ++layer) {
    for (int q = 0; q < n; ++q) apply_ry(state, q, theta[Eigen::Index{layer} * n + q]);
    if (spec.entanglement == Entanglement::Ring) apply_ring(state);
  }
}

}  // namespace detail

template <typename Scalar>
void apply_ansatz(StateVector<Scalar>& state, const AnsatzSpec& spec,
                  const ParameterRef<RealOf<Scalar>>& theta) {
  detail::check_ansatz_inputs(state, spec, theta);
  detail::apply_layers(state, spec, theta, 0);
}

/// Same as `apply_ansatz` but leaves the input untouched.
template <typename Scalar>
StateVector<Scalar> evolve(StateVector<Scalar> state, const AnsatzSpec& spec,
                           const ParameterRef<RealOf<Scalar>>& theta) {
  apply_ansatz(state, spec, theta);
  return state;
}

/// I.i.d. uniform angles on [0, 2*pi); identical for identical (spec, seed).
inline ParameterVector<double> init_parameters(const AnsatzSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ParameterVector<double> theta(spec.parameter_count());
  for (auto& t : theta) t = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return theta;
}

}  // namespace plateau
