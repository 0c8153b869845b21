#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

#include "plateau/ansatz.hpp"
#include "plateau/simulator.hpp"

namespace plateau {

/// Entry (i, j) = d<Z_i>/d theta_j; n rows, n*m columns.
template <typename Scalar = double>
using QuantumJacobian = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Per-qubit <Z> after running the ansatz on a copy of `prep`.
template <typename Scalar>
typename StateVector<Scalar>::RealVector forward(const StateVector<Scalar>& prep, const AnsatzSpec& spec,
                                                 const ParameterRef<RealOf<Scalar>>& theta) {
  return expectation_z_all(evolve(prep, spec, theta));
}

namespace detail {

// Finishes the circuit from the state just before parameter `j`, with that
// rotation replaced by Ry(angle). `state` is overwritten.
template <typename Scalar>
typename StateVector<Scalar>::RealVector finish_from(StateVector<Scalar>& state, const AnsatzSpec& spec,
                                                     const ParameterRef<RealOf<Scalar>>& theta, Eigen::Index j,
                                                     RealOf<Scalar> angle) {
  const int n = spec.width;
  const int layer = static_cast<int>(j / n);
  const int qubit = static_cast<int>(j % n);
  apply_ry(state, qubit, angle);
  for (int q = qubit + 1; q < n; ++q) apply_ry(state, q, theta[Eigen::Index{layer} * n + q]);
  if (spec.entanglement == Entanglement::Ring) apply_ring(state);
  apply_layers(state, spec, theta, layer + 1);
  return expectation_z_all(state);
}

// Advances `state` (positioned before parameter j) past parameter j.
template <typename Scalar>
void step_past(StateVector<Scalar>& state, const AnsatzSpec& spec, const ParameterRef<RealOf<Scalar>>& theta,
               Eigen::Index j) {
  const int n = spec.width;
  apply_ry(state, static_cast<int>(j % n), theta[j]);
  if (j % n == n - 1 && spec.entanglement == Entanglement::Ring) apply_ring(state);
}

}  // namespace detail

/// Parameter-shift Jacobian: column j is (f(theta_j + s) - f(theta_j - s)) / (2 sin s),
/// which reduces to the familiar half-difference at the default s = pi/2.
/// Runs exactly two shifted circuits per parameter; each reuses the state
/// prepared up to the shifted gate.
template <typename Scalar>
QuantumJacobian<RealOf<Scalar>> parameter_shift_jacobian(const StateVector<Scalar>& prep, const AnsatzSpec& spec,
                                                 const ParameterRef<RealOf<Scalar>>& theta,
                                                 RealOf<Scalar> shift = std::numbers::pi_v<RealOf<Scalar>> / 2) {
  using Real = RealOf<Scalar>;
  detail::check_ansatz_inputs(prep, spec, theta);
  const Real denom = 2 * std::sin(shift);
  if (std::abs(denom) < Real(1e-6)) {
    throw Error(ErrorKind::InvalidArgument, "parameter shift must not be a multiple of pi");
  }
  QuantumJacobian<RealOf<Scalar>> jac(spec.width, spec.parameter_count());
  StateVector<Scalar> prefix = prep;
  StateVector<Scalar> work = prep;
  for (Eigen::Index j = 0; j < spec.parameter_count(); ++j) {
    work = prefix;
    const auto plus = detail::finish_from(work, spec, theta, j, theta[j] + shift);
    work = prefix;
    const auto minus = detail::finish_from(work, spec, theta, j, theta[j] - shift);
    jac.col(j) = (plus - minus) / denom;
    detail::step_past(prefix, spec, theta, j);
  }
  return jac;
}

/// d<Z_i>/d theta_j for a single parameter j (column j of the Jacobian).
template <typename Scalar>
typename StateVector<Scalar>::RealVector parameter_shift_column(const StateVector<Scalar>& prep,
                                                                const AnsatzSpec& spec,
                                                                const ParameterRef<RealOf<Scalar>>& theta,
                                                                Eigen::Index j) {
  detail::check_ansatz_inputs(prep, spec, theta);
  if (j < 0 || j >= spec.parameter_count()) {
    throw Error(ErrorKind::InvalidIndex, "parameter index " + std::to_string(j) + " out of range");
  }
  constexpr RealOf<Scalar> shift = std::numbers::pi_v<RealOf<Scalar>> / 2;
  StateVector<Scalar> prefix = prep;
  for (Eigen::Index k = 0; k < j; ++k) detail::step_past(prefix, spec, theta, k);
  StateVector<Scalar> work = prefix;
  const auto plus = detail::finish_from(work, spec, theta, j, theta[j] + shift);
  work = prefix;
  return (plus - detail::finish_from(work, spec, theta, j, theta[j] - shift)) / RealOf<Scalar>(2);
}

/// Central differences (f(theta_j + h) - f(theta_j - h)) / 2h, one full
/// forward pass per evaluation.
template <typename Scalar>
QuantumJacobian<RealOf<Scalar>> finite_difference_jacobian(const StateVector<Scalar>& prep, const AnsatzSpec& spec,
                                                   const ParameterRef<RealOf<Scalar>>& theta, RealOf<Scalar> h) {
  detail::check_ansatz_inputs(prep, spec, theta);
  if (!(h > 0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  QuantumJacobian<RealOf<Scalar>> jac(spec.width, spec.parameter_count());
  ParameterVector<RealOf<Scalar>> shifted = theta;
  for (Eigen::Index j = 0; j < spec.parameter_count(); ++j) {
    shifted[j] = theta[j] + h;
    const auto plus = forward(prep, spec, shifted);
    shifted[j] = theta[j] - h;
    const auto minus = forward(prep, spec, shifted);
    shifted[j] = theta[j];
    jac.col(j) = (plus - minus) / (2 * h);
  }
  return jac;
}

}  // namespace plateau
