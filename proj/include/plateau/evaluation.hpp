#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "plateau/ansatz.hpp"
#include "plateau/head.hpp"

namespace plateau {

/// counts(t, p): samples of true class t predicted as p.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, kNumClasses, kNumClasses> counts =
      Eigen::Matrix<std::int64_t, kNumClasses, kNumClasses>::Zero();

  std::int64_t total() const { return counts.sum(); }
  std::int64_t trace() const { return counts.trace(); }
};

ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted_labels);

struct MetricsReport {
  double accuracy = 0.0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  std::array<std::int64_t, kNumClasses> support{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// Per-class precision/recall/F1 (0 on empty denominators) and their
/// unweighted mean over classes that occur in the true labels.
MetricsReport metrics(const ConfusionMatrix& cm);

struct VarianceRecord {
  int width = 0;
  int depth = 0;
  Entanglement entanglement = Entanglement::Ring;
  int samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;  // of the variance estimate
};

using VarianceScanResult = std::vector<VarianceRecord>;

/// d<Z_0>/d theta_0 on |0...0> for angles drawn uniformly from `sample_seed`.
double probe_gradient(const AnsatzSpec& spec, std::uint64_t sample_seed);

/// mean(g^2) - mean(g)^2 with plain means.
double gradient_variance(std::span<const double> gradients);

/// Standard error of the variance estimate, sqrt((mu4 - var^2) / S).
double variance_standard_error(std::span<const double> gradients);

/// For each width draws `samples` random parameter vectors (seeds derived
/// from `seed`, the width and the sample index) and records the variance of
/// the probe gradient.
VarianceScanResult bp_variance_scan(std::span<const int> widths, int depth, Entanglement entanglement, int samples,
                                    std::uint64_t seed);

/// Columns: width,depth,entanglement,samples,variance (plus mean and standard_error).
void write_variance_csv(std::ostream& out, const VarianceScanResult& result);

}  // namespace plateau
