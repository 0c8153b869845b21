#include "plateau/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "plateau/gradient.hpp"
#include "plateau/random.hpp"

namespace plateau {

ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted_labels) {
  if (true_labels.size() != predicted_labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "label sequences differ in length");
  }
  if (true_labels.empty()) throw Error(ErrorKind::InvalidArgument, "confusion matrix needs at least one sample");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i];
    const int p = predicted_labels[i];
    if (t < 0 || t >= kNumClasses || p < 0 || p >= kNumClasses) {
      throw Error(ErrorKind::InvalidIndex, "label out of range at position " + std::to_string(i));
    }
    ++cm.counts(t, p);
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  const auto total = cm.total();
  r.accuracy = total > 0 ? static_cast<double>(cm.trace()) / static_cast<double>(total) : 0.0;
  int supported = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto tp = static_cast<double>(cm.counts(c, c));
    const auto predicted = static_cast<double>(cm.counts.col(c).sum());
    const auto actual = static_cast<double>(cm.counts.row(c).sum());
    r.support[c] = cm.counts.row(c).sum();
    r.precision[c] = predicted > 0 ? tp / predicted : 0.0;
    r.recall[c] = actual > 0 ? tp / actual : 0.0;
    const double pr = r.precision[c] + r.recall[c];
    r.f1[c] = pr > 0 ? 2.0 * r.precision[c] * r.recall[c] / pr : 0.0;
    if (r.support[c] > 0) {
      ++supported;
      r.macro_precision += r.precision[c];
      r.macro_recall += r.recall[c];
      r.macro_f1 += r.f1[c];
    }
  }
  if (supported > 0) {
    r.macro_precision /= supported;
    r.macro_recall /= supported;
    r.macro_f1 /= supported;
  }
  return r;
}

double probe_gradient(const AnsatzSpec& spec, std::uint64_t sample_seed) {
  const auto theta = init_parameters(spec, sample_seed);
  return parameter_shift_column(zero_state<double>(spec.width), spec, theta, 0)[0];
}

double gradient_variance(std::span<const double> gradients) {
  if (gradients.size() < 2) throw Error(ErrorKind::InvalidArgument, "variance needs at least 2 samples");
  double sum = 0.0, sum_sq = 0.0;
  for (const double g : gradients) {
    sum += g;
    sum_sq += g * g;
  }
  const double n = static_cast<double>(gradients.size());
  const double mean = sum / n;
  return std::max(0.0, sum_sq / n - mean * mean);
}

double variance_standard_error(std::span<const double> gradients) {
  const double var = gradient_variance(gradients);
  double mean = 0.0;
  for (const double g : gradients) mean += g;
  mean /= static_cast<double>(gradients.size());
  double mu4 = 0.0;
  for (const double g : gradients) mu4 += std::pow(g - mean, 4);
  mu4 /= static_cast<double>(gradients.size());
  return std::sqrt(std::max(0.0, mu4 - var * var) / static_cast<double>(gradients.size()));
}

VarianceScanResult bp_variance_scan(std::span<const int> widths, int depth, Entanglement entanglement, int samples,
                                    std::uint64_t seed) {
  if (widths.empty()) throw Error(ErrorKind::InvalidWidth, "variance scan needs at least one width");
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "variance scan needs at least 2 samples per width");
  VarianceScanResult result;
  for (const int width : widths) {
    const AnsatzSpec spec{width, depth, entanglement};
    spec.validate();
    std::vector<double> grads(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
      grads[static_cast<std::size_t>(s)] =
          probe_gradient(spec, derive_seed(seed, static_cast<std::uint64_t>(width), static_cast<std::uint64_t>(s)));
    }
    double mean = 0.0;
    for (const double g : grads) mean += g;
    mean /= samples;
    result.push_back({width, depth, entanglement, samples, mean, gradient_variance(grads),
                      variance_standard_error(grads)});
  }
  return result;
}

void write_variance_csv(std::ostream& out, const VarianceScanResult& result) {
  out << "width,depth,entanglement,samples,variance,mean,standard_error\n";
  out << std::setprecision(17);
  for (const auto& r : result) {
    out << r.width << ',' << r.depth << ',' << to_string(r.entanglement) << ',' << r.samples << ',' << r.variance
        << ',' << r.mean << ',' << r.standard_error << '\n';
  }
}

}  // namespace plateau
