#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "plateau/encoding.hpp"

namespace plateau {

inline constexpr int kDigitFeatures = 64;

/// Feature rows with integer class labels. Files hold the 64 raw pixel
/// columns; derived datasets (after PCA) may carry fewer columns.
struct Dataset {
  FeatureMatrix features;
  std::vector<int> labels;

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index dims() const noexcept { return features.cols(); }

  Dataset rows(std::span<const Eigen::Index> indices) const;
  /// First `count` rows (all rows when count is 0 or too large).
  Dataset head(Eigen::Index count) const;
};

/// Reads 64 feature columns followed by one label column (0-9). A single
/// header line is skipped when its first cell is not numeric.
Dataset load_csv(const std::filesystem::path& path);

struct SplitDataset {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
};

/// Seeded shuffle, then floor(fraction * M) rows for training.
SplitDataset split(const Dataset& ds, double train_fraction, std::uint64_t seed);

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column k pairs with values[k]
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `tolerance`.
SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& symmetric, double tolerance = 1e-12,
                            int max_sweeps = 100);

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // k x d, orthonormal rows
  Eigen::VectorXd explained_variances;
  double total_variance = 0.0;

  Eigen::Index num_components() const noexcept { return components.rows(); }
  double explained_ratio() const { return total_variance > 0 ? explained_variances.sum() / total_variance : 1.0; }
};

/// Covariance uses the (rows - 1) divisor. Each component is signed so its
/// largest-magnitude entry is positive.
PcaModel pca_fit(const Eigen::Ref<const FeatureMatrix>& features, int k);

FeatureVector pca_transform(const PcaModel& model, const Eigen::Ref<const FeatureVector>& x);
FeatureMatrix pca_transform_rows(const PcaModel& model, const Eigen::Ref<const FeatureMatrix>& rows);

/// Shuffled row indices for one epoch in chunks of `batch_size`; the last
/// chunk may be short.
std::vector<std::vector<Eigen::Index>> batches(Eigen::Index num_rows, int batch_size, std::uint64_t epoch_seed);

}  // namespace plateau
