#include "plateau/encoding.hpp"

#include <algorithm>
#include <numbers>

namespace plateau {

std::string to_string(Encoding encoding) {
  return encoding == Encoding::Amplitude ? "amplitude" : "angle";
}

Encoding parse_encoding(const std::string& text) {
  if (text == "amplitude") return Encoding::Amplitude;
  if (text == "angle") return Encoding::Angle;
  throw Error(ErrorKind::Config, "unknown encoding '" + text + "' (expected amplitude or angle)");
}

AngleScaler AngleScaler::fit(const Eigen::Ref<const FeatureMatrix>& train_features) {
  if (train_features.rows() == 0 || train_features.cols() == 0) {
    throw Error(ErrorKind::InvalidArgument, "angle scaler needs at least one training row and column");
  }
  return AngleScaler(train_features.colwise().minCoeff().transpose(),
                     train_features.colwise().maxCoeff().transpose());
}

FeatureVector AngleScaler::apply(const Eigen::Ref<const FeatureVector>& x) const {
  if (x.size() != min_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "scaler fitted on " + std::to_string(min_.size()) +
                                                  " features, got " + std::to_string(x.size()));
  }
  constexpr double pi = std::numbers::pi;
  FeatureVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double span = max_[i] - min_[i];
    out[i] = span > 0.0 ? std::clamp(pi * (x[i] - min_[i]) / span, 0.0, pi) : pi / 2;
  }
  return out;
}

FeatureMatrix AngleScaler::apply_rows(const Eigen::Ref<const FeatureMatrix>& rows) const {
  FeatureMatrix out(rows.rows(), rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) out.row(r) = apply(rows.row(r).transpose()).transpose();
  return out;
}

}  // namespace plateau
