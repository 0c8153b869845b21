#include "plateau/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <string_view>

#include "plateau/random.hpp"

namespace plateau {
namespace {

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size() && !cell.empty() && std::isfinite(out);
}

[[noreturn]] void row_error(const std::filesystem::path& path, std::size_t line_no, const std::string& msg) {
  throw Error(ErrorKind::Parse, path.string() + ": row " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

Dataset Dataset::rows(std::span<const Eigen::Index> indices) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), dims());
  out.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(indices[i]);
    out.labels.push_back(labels[static_cast<std::size_t>(indices[i])]);
  }
  return out;
}

Dataset Dataset::head(Eigen::Index count) const {
  if (count <= 0 || count >= size()) return *this;
  return {features.topRows(count), std::vector<int>(labels.begin(), labels.begin() + count)};
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open dataset file " + path.string());

  std::vector<double> values;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  constexpr std::size_t columns = kDigitFeatures + 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto cells = split_cells(view);
    double probe = 0.0;
    if (line_no == 1 && !parse_double(cells.front(), probe)) continue;  // header
    if (cells.size() != columns) {
      row_error(path, line_no, "expected " + std::to_string(columns) + " columns, found " +
                                   std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < kDigitFeatures; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        row_error(path, line_no, "non-numeric value '" + std::string(trim(cells[c])) + "' in column " +
                                     std::to_string(c + 1));
      }
      values.push_back(v);
    }
    double label = 0.0;
    if (!parse_double(cells.back(), label) || label != std::floor(label)) {
      row_error(path, line_no, "label '" + std::string(trim(cells.back())) + "' is not an integer");
    }
    if (label < 0 || label > 9) row_error(path, line_no, "label " + std::to_string(int(label)) + " outside 0-9");
    labels.push_back(static_cast<int>(label));
  }
  if (in.bad()) throw Error(ErrorKind::Io, "failed reading " + path.string());
  if (labels.empty()) throw Error(ErrorKind::Parse, path.string() + ": no data rows");

  Dataset ds;
  ds.features = Eigen::Map<const FeatureMatrix>(values.data(), static_cast<Eigen::Index>(labels.size()),
                                                kDigitFeatures);
  ds.labels = std::move(labels);
  return ds;
}

SplitDataset split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (ds.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 rows to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  const auto train_count = static_cast<Eigen::Index>(std::floor(train_fraction * static_cast<double>(ds.size())));
  if (train_count < 1 || train_count >= ds.size()) {
    throw Error(ErrorKind::InvalidArgument, "split leaves an empty partition");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  shuffle(std::span(order), rng);

  SplitDataset out;
  out.seed = seed;
  out.train_rows.assign(order.begin(), order.begin() + train_count);
  out.test_rows.assign(order.begin() + train_count, order.end());
  out.train = ds.rows(out.train_rows);
  out.test = ds.rows(out.test_rows);
  return out;
}

SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& symmetric, double tolerance, int max_sweeps) {
  const Eigen::Index n = symmetric.rows();
  if (symmetric.cols() != n) throw Error(ErrorKind::DimensionMismatch, "eigensolver needs a square matrix");
  Eigen::MatrixXd a = (symmetric + symmetric.transpose()) / 2;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, a.norm());

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q)
        if (p != q) s += a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tolerance * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SymmetricEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

PcaModel pca_fit(const Eigen::Ref<const FeatureMatrix>& features, int k) {
  const Eigen::Index rows = features.rows();
  const Eigen::Index dims = features.cols();
  if (k < 1 || k > dims) {
    throw Error(ErrorKind::InvalidArgument, "PCA component count " + std::to_string(k) + " outside [1, " +
                                                std::to_string(dims) + "]");
  }
  if (rows < k || rows < 2) {
    throw Error(ErrorKind::InvalidArgument, "PCA needs at least max(k, 2) rows, got " + std::to_string(rows));
  }
  PcaModel model;
  model.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(rows - 1);
  const SymmetricEigen eig = jacobi_eigen(cov);

  model.total_variance = cov.trace();
  model.components.resize(k, dims);
  model.explained_variances.resize(k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd vec = eig.vectors.col(c);
    Eigen::Index arg = 0;
    vec.cwiseAbs().maxCoeff(&arg);
    if (vec[arg] < 0) vec = -vec;
    model.components.row(c) = vec.transpose();
    model.explained_variances[c] = std::max(0.0, eig.values[c]);
  }
  return model;
}

FeatureVector pca_transform(const PcaModel& model, const Eigen::Ref<const FeatureVector>& x) {
  if (x.size() != model.mean.size()) {
    throw Error(ErrorKind::DimensionMismatch, "PCA fitted on " + std::to_string(model.mean.size()) +
                                                  " features, got " + std::to_string(x.size()));
  }
  return model.components * (x - model.mean);
}

FeatureMatrix pca_transform_rows(const PcaModel& model, const Eigen::Ref<const FeatureMatrix>& rows) {
  if (rows.cols() != model.mean.size()) {
    throw Error(ErrorKind::DimensionMismatch, "PCA input dimension mismatch");
  }
  return (rows.rowwise() - model.mean.transpose()) * model.components.transpose();
}

std::vector<std::vector<Eigen::Index>> batches(Eigen::Index num_rows, int batch_size, std::uint64_t epoch_seed) {
  if (batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch size must be >= 1");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(std::max<Eigen::Index>(num_rows, 0)));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(epoch_seed);
  shuffle(std::span(order), rng);
  std::vector<std::vector<Eigen::Index>> out;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace plateau
