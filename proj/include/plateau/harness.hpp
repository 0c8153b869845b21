#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "plateau/evaluation.hpp"
#include "plateau/training.hpp"

namespace plateau {

inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kErrorsFile = "errors.jsonl";
inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kDataEnvVar = "PLATEAU_LAB_DATA";

std::string library_version();

/// One grid cell: pipeline, circuit shape, seeds and training protocol.
struct ExperimentConfig {
  Encoding encoding = Encoding::Amplitude;
  Entanglement entanglement = Entanglement::Ring;
  int width = 6;
  int depth = 2;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  TrainConfig train;
  double train_fraction = 0.75;
  std::string data_path;
  std::string output_dir = "results";
  Eigen::Index subset = 0;  // 0 keeps every row

  /// Throws ErrorKind::Config naming the violated rule.
  void validate() const;
  AnsatzSpec ansatz() const { return {width, depth, entanglement}; }
  std::string cell_key() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Everything in the config that influences results; used to detect records
/// that already exist when a sweep resumes.
std::string config_fingerprint(const ExperimentConfig& cfg);

/// Features after the encoding-specific preprocessing, ready for `train`.
struct PreparedSplit {
  SplitDataset split;
  std::optional<PcaModel> pca;
  std::optional<AngleScaler> scaler;
};

/// Amplitude: raw features. Angle: PCA to `width` dims then min-max to
/// [0, pi]; both fitted on the training rows only.
PreparedSplit prepare_split(const Dataset& ds, const ExperimentConfig& cfg, std::uint64_t seed);

struct SeedRun {
  std::uint64_t seed = 0;
  History history;
  MetricsReport metrics;
  double test_loss = 0.0;
  int best_epoch = 0;
  bool stopped_early = false;
  double seconds = 0.0;
};

struct ExperimentRecord {
  ExperimentConfig config;
  std::vector<SeedRun> runs;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation over seeds (0 for one seed)
  double wall_seconds = 0.0;
  std::string version;
};

nlohmann::json to_json(const History& history);
nlohmann::json to_json(const MetricsReport& metrics);
nlohmann::json to_json(const ExperimentRecord& record);
ExperimentRecord record_from_json(const nlohmann::json& j);

SeedRun run_seed(const ExperimentConfig& cfg, const Dataset& ds, std::uint64_t seed, std::ostream* progress = nullptr);

/// Loads the data named in `cfg` (truncated to `cfg.subset` rows) and trains
/// one model per seed. Does not persist anything.
ExperimentRecord run_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

/// Rewrites `<dir>/records.jsonl` through a temporary file and a rename, so
/// the file always holds whole records.
void append_record(const std::filesystem::path& dir, const ExperimentRecord& record);
std::vector<ExperimentRecord> load_records(const std::filesystem::path& dir);

struct SweepGrid {
  std::vector<int> amplitude_widths{6, 8, 10, 12, 14};
  std::vector<int> angle_widths{8, 10, 12, 14};
  std::vector<int> depths{2, 4, 6, 8, 10};
  std::vector<Encoding> encodings{Encoding::Amplitude, Encoding::Angle};
  std::vector<Entanglement> entanglements{Entanglement::Ring, Entanglement::None};
  /// Cells left out, as "encoding:entanglement:width".
  std::vector<std::string> skip{"amplitude:none:14"};

  std::vector<ExperimentConfig> expand(const ExperimentConfig& base) const;
};

struct SweepOutcome {
  std::vector<ExperimentRecord> records;  // grid order
  int executed = 0;
  int skipped = 0;
  std::vector<std::string> errors;
};

/// Runs every config whose record is not yet in `out_dir`, up to `jobs` at
/// a time, then writes the summary CSV.
SweepOutcome run_sweep(const std::vector<ExperimentConfig>& grid, const std::filesystem::path& out_dir, int jobs = 1,
                       std::ostream* progress = nullptr);

/// Aggregate over every run of one (encoding, entanglement, width, depth) cell.
struct CellSummary {
  Encoding encoding = Encoding::Amplitude;
  Entanglement entanglement = Entanglement::Ring;
  int width = 0;
  int depth = 0;
  int runs = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double mean_best_epoch = 0.0;
  Eigen::Index parameters = 0;  // quantum angles plus dense weights and biases
};

/// Cells sorted by (encoding, entanglement, width, depth); independent of
/// record order.
std::vector<CellSummary> summarize(std::span<const ExperimentRecord> records);

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells);

struct Recommendation {
  std::string scenario;     // constrained factors joined by '+', or "none"
  std::string constraints;  // factor=value pairs joined by ';'
  CellSummary best;
};

/// For every subset of {encoding, entanglement, width, depth} and every
/// observed value combination of that subset, the cell with the highest mean
/// accuracy; ties go to fewer parameters, then an earlier mean best epoch.
std::vector<Recommendation> recommend(std::span<const CellSummary> cells);

/// Writes summary, accuracy-vs-width, accuracy-vs-depth, entanglement-delta
/// and recommendation CSVs under `out_dir`. Returns the written paths.
std::vector<std::filesystem::path> write_report(std::span<const ExperimentRecord> records,
                                                const std::filesystem::path& out_dir);

/// Sectioned key=value file; keys before any header go to "experiment".
using ConfigFile = std::map<std::string, std::map<std::string, std::string>>;

ConfigFile parse_config(std::istream& in);
ConfigFile load_config(const std::filesystem::path& path);

std::vector<int> parse_int_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Applies [experiment] and [train] keys; unknown keys are config errors.
void apply_config(const ConfigFile& file, ExperimentConfig& cfg);
void apply_config(const ConfigFile& file, SweepGrid& grid);

/// Command-line entry point. Exit codes: 0 success, 1 usage or config
/// error, 2 I/O error.
int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace plateau
