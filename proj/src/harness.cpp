#include "plateau/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "plateau/random.hpp"

namespace plateau {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kTrainStream = 0x747261696eULL;

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double mean_of(std::span<const double> values) {
  double s = 0.0;
  for (const double v : values) s += v;
  return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

json train_config_json(const TrainConfig& t) {
  return {{"max_epochs", t.max_epochs},     {"batch_size", t.batch_size},   {"initial_lr", t.initial_lr},
          {"lr_factor", t.lr_factor},       {"lr_patience", t.lr_patience}, {"stop_patience", t.stop_patience},
          {"adam_beta1", t.adam_beta1},     {"adam_beta2", t.adam_beta2},   {"adam_eps", t.adam_eps},
          {"min_improvement", t.min_improvement}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig t;
  t.max_epochs = j.at("max_epochs").get<int>();
  t.batch_size = j.at("batch_size").get<int>();
  t.initial_lr = j.at("initial_lr").get<double>();
  t.lr_factor = j.at("lr_factor").get<double>();
  t.lr_patience = j.at("lr_patience").get<int>();
  t.stop_patience = j.at("stop_patience").get<int>();
  t.adam_beta1 = j.at("adam_beta1").get<double>();
  t.adam_beta2 = j.at("adam_beta2").get<double>();
  t.adam_eps = j.at("adam_eps").get<double>();
  t.min_improvement = j.at("min_improvement").get<double>();
  return t;
}

template <typename T, std::size_t N>
std::array<T, N> array_from_json(const json& j) {
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = j.at(i).get<T>();
  return out;
}

}  // namespace

std::string library_version() {
#ifdef PLATEAU_LAB_VERSION
  return PLATEAU_LAB_VERSION;
#else
  return "dev";
#endif
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
  if (depth < 1) fail("depth must be >= 1 (got " + std::to_string(depth) + ")");
  if (width < 1 || width > StateVector<>::kMaxQubits) {
    fail("width must lie in [1, " + std::to_string(StateVector<>::kMaxQubits) + "] (got " + std::to_string(width) + ")");
  }
  if (encoding == Encoding::Amplitude && (Eigen::Index{1} << width) < kDigitFeatures) {
    fail("amplitude encoding needs 2^n >= " + std::to_string(kDigitFeatures) + " amplitudes, i.e. n >= 6 (got n = " +
         std::to_string(width) + ")");
  }
  if (encoding == Encoding::Angle && (width < 8 || width > kDigitFeatures)) {
    fail("angle encoding needs n >= 8 PCA components, one per qubit, and at most " + std::to_string(kDigitFeatures) +
         " (got n = " + std::to_string(width) + ")");
  }
  if (entanglement == Entanglement::Ring && width < 2) fail("ring entanglement needs at least 2 qubits");
  if (seeds.empty()) fail("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) fail("seeds must be distinct");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must lie in (0, 1)");
  if (subset < 0) fail("subset must be >= 0");
  if (subset > 0 && subset < 8) fail("subset must keep at least 8 rows");
  train.validate();
}

std::string ExperimentConfig::cell_key() const {
  return to_string(encoding) + ":" + to_string(entanglement) + ":" + std::to_string(width) + ":" +
         std::to_string(depth);
}

json to_json(const ExperimentConfig& cfg) {
  return {{"encoding", to_string(cfg.encoding)},
          {"entanglement", to_string(cfg.entanglement)},
          {"width", cfg.width},
          {"depth", cfg.depth},
          {"seeds", cfg.seeds},
          {"train", train_config_json(cfg.train)},
          {"train_fraction", cfg.train_fraction},
          {"data", cfg.data_path},
          {"subset", cfg.subset},
          {"out", cfg.output_dir}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.encoding = parse_encoding(j.at("encoding").get<std::string>());
  cfg.entanglement = parse_entanglement(j.at("entanglement").get<std::string>());
  cfg.width = j.at("width").get<int>();
  cfg.depth = j.at("depth").get<int>();
  cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.train = train_config_from_json(j.at("train"));
  cfg.train_fraction = j.at("train_fraction").get<double>();
  cfg.data_path = j.at("data").get<std::string>();
  cfg.subset = j.at("subset").get<Eigen::Index>();
  cfg.output_dir = j.value("out", std::string{});
  return cfg;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("out");
  j["data"] = fs::path(cfg.data_path).filename().string();
  return j.dump();
}

PreparedSplit prepare_split(const Dataset& ds, const ExperimentConfig& cfg, std::uint64_t seed) {
  PreparedSplit prepared{split(ds, cfg.train_fraction, derive_seed(seed, kSplitStream)), std::nullopt, std::nullopt};
  if (cfg.encoding == Encoding::Amplitude) return prepared;

  SplitDataset& s = prepared.split;
  prepared.pca = pca_fit(s.train.features, cfg.width);
  s.train.features = pca_transform_rows(*prepared.pca, s.train.features);
  s.test.features = pca_transform_rows(*prepared.pca, s.test.features);
  prepared.scaler = AngleScaler::fit(s.train.features);
  s.train.features = prepared.scaler->apply_rows(s.train.features);
  s.test.features = prepared.scaler->apply_rows(s.test.features);
  return prepared;
}

json to_json(const History& history) {
  json epochs = json::array();
  for (const auto& e : history.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"train_accuracy", e.train_accuracy},
                      {"val_loss", e.val_loss},
                      {"val_accuracy", e.val_accuracy},
                      {"lr", e.learning_rate}});
  }
  return epochs;
}

json to_json(const MetricsReport& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"support", m.support},
          {"macro_precision", m.macro_precision},
          {"macro_recall", m.macro_recall},
          {"macro_f1", m.macro_f1}};
}

json to_json(const ExperimentRecord& record) {
  json runs = json::array();
  for (const auto& r : record.runs) {
    runs.push_back({{"seed", r.seed},
                    {"history", to_json(r.history)},
                    {"epoch_seconds", r.history.epoch_seconds},
                    {"metrics", to_json(r.metrics)},
                    {"test_loss", r.test_loss},
                    {"best_epoch", r.best_epoch},
                    {"stopped_early", r.stopped_early},
                    {"seconds", r.seconds}});
  }
  return {{"cell", record.config.cell_key()},
          {"config", to_json(record.config)},
          {"runs", runs},
          {"mean_accuracy", record.mean_accuracy},
          {"std_accuracy", record.std_accuracy},
          {"mean_definition", "mean and sample standard deviation of test accuracy over seeded runs"},
          {"wall_seconds", record.wall_seconds},
          {"version", record.version}};
}

ExperimentRecord record_from_json(const json& j) {
  ExperimentRecord rec;
  rec.config = config_from_json(j.at("config"));
  for (const auto& r : j.at("runs")) {
    SeedRun run;
    run.seed = r.at("seed").get<std::uint64_t>();
    for (const auto& e : r.at("history")) {
      run.history.epochs.push_back({e.at("epoch").get<int>(), e.at("train_loss").get<double>(),
                                    e.at("train_accuracy").get<double>(), e.at("val_loss").get<double>(),
                                    e.at("val_accuracy").get<double>(), e.at("lr").get<double>()});
    }
    run.history.epoch_seconds = r.value("epoch_seconds", std::vector<double>{});
    const json& m = r.at("metrics");
    run.metrics.accuracy = m.at("accuracy").get<double>();
    run.metrics.precision = array_from_json<double, kNumClasses>(m.at("precision"));
    run.metrics.recall = array_from_json<double, kNumClasses>(m.at("recall"));
    run.metrics.f1 = array_from_json<double, kNumClasses>(m.at("f1"));
    run.metrics.support = array_from_json<std::int64_t, kNumClasses>(m.at("support"));
    run.metrics.macro_precision = m.at("macro_precision").get<double>();
    run.metrics.macro_recall = m.at("macro_recall").get<double>();
    run.metrics.macro_f1 = m.at("macro_f1").get<double>();
    run.test_loss = r.at("test_loss").get<double>();
    run.best_epoch = r.at("best_epoch").get<int>();
    run.stopped_early = r.at("stopped_early").get<bool>();
    run.seconds = r.value("seconds", 0.0);
    rec.runs.push_back(std::move(run));
  }
  rec.mean_accuracy = j.at("mean_accuracy").get<double>();
  rec.std_accuracy = j.at("std_accuracy").get<double>();
  rec.wall_seconds = j.value("wall_seconds", 0.0);
  rec.version = j.value("version", std::string{});
  return rec;
}

SeedRun run_seed(const ExperimentConfig& cfg, const Dataset& ds, std::uint64_t seed, std::ostream* progress) {
  const auto start = std::chrono::steady_clock::now();
  const PreparedSplit prepared = prepare_split(ds, cfg, seed);
  const AnsatzSpec spec = cfg.ansatz();
  const Encoder encoder{cfg.encoding, cfg.width};
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(seed, kTrainStream);

  const TrainResult trained =
      train(ModelParameters::initialize(spec, derive_seed(seed, kInitStream)), prepared.split, spec, encoder, tc, progress);
  const Evaluation eval = evaluate(trained.best, prepared.split.test, spec, encoder);

  SeedRun run;
  run.seed = seed;
  run.history = trained.history;
  run.metrics = metrics(confusion(prepared.split.test.labels, eval.predictions));
  run.test_loss = eval.loss;
  run.best_epoch = trained.best_epoch;
  run.stopped_early = trained.stopped_early;
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = load_csv(cfg.data_path).head(cfg.subset);

  ExperimentRecord rec;
  rec.config = cfg;
  rec.version = library_version();
  std::vector<double> accuracies;
  for (const std::uint64_t seed : cfg.seeds) {
    if (progress) *progress << "# " << cfg.cell_key() << " seed " << seed << '\n';
    rec.runs.push_back(run_seed(cfg, ds, seed, progress));
    accuracies.push_back(rec.runs.back().metrics.accuracy);
  }
  rec.mean_accuracy = mean_of(accuracies);
  rec.std_accuracy = sample_std(accuracies);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

namespace {

void append_line_atomically(const fs::path& dir, const std::string& file_name, const std::string& line) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
  const fs::path target = dir / file_name;
  const fs::path tmp = dir / (file_name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    if (fs::exists(target)) {
      std::ifstream in(target, std::ios::binary);
      out << in.rdbuf();
    }
    out << line << '\n';
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot replace " + target.string() + ": " + ec.message());
}

}  // namespace

void append_record(const fs::path& dir, const ExperimentRecord& record) {
  append_line_atomically(dir, kRecordsFile, to_json(record).dump());
}

std::vector<ExperimentRecord> load_records(const fs::path& dir) {
  const fs::path file = dir / kRecordsFile;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "no records found: cannot open " + file.string());
  std::vector<ExperimentRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, file.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<ExperimentConfig> SweepGrid::expand(const ExperimentConfig& base) const {
  std::vector<ExperimentConfig> grid;
  const std::set<std::string> skipped(skip.begin(), skip.end());
  for (const Encoding enc : encodings) {
    const auto& widths = enc == Encoding::Amplitude ? amplitude_widths : angle_widths;
    for (const Entanglement ent : entanglements) {
      for (const int n : widths) {
        if (skipped.count(to_string(enc) + ":" + to_string(ent) + ":" + std::to_string(n))) continue;
        for (const int m : depths) {
          ExperimentConfig cfg = base;
          cfg.encoding = enc;
          cfg.entanglement = ent;
          cfg.width = n;
          cfg.depth = m;
          grid.push_back(cfg);
        }
      }
    }
  }
  return grid;
}

SweepOutcome run_sweep(const std::vector<ExperimentConfig>& grid, const fs::path& out_dir, int jobs,
                       std::ostream* progress) {
  if (grid.empty()) throw Error(ErrorKind::Config, "sweep grid is empty");
  std::vector<ExperimentRecord> existing;
  if (fs::exists(out_dir / kRecordsFile)) existing = load_records(out_dir);
  std::map<std::string, ExperimentRecord> done;
  for (auto& r : existing) done.emplace(config_fingerprint(r.config), std::move(r));

  SweepOutcome outcome;
  std::vector<std::optional<ExperimentRecord>> slots(grid.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (auto it = done.find(config_fingerprint(grid[i])); it != done.end()) {
      slots[i] = it->second;
      ++outcome.skipped;
    } else {
      pending.push_back(i);
    }
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      const ExperimentConfig& cfg = grid[pending[k]];
      {
        std::lock_guard lock(mu);
        if (progress) *progress << "# cell " << cfg.cell_key() << " start\n" << std::flush;
      }
      try {
        ExperimentRecord rec = run_experiment(cfg, jobs == 1 ? progress : nullptr);
        std::lock_guard lock(mu);
        append_record(out_dir, rec);
        slots[pending[k]] = std::move(rec);
        ++outcome.executed;
        if (progress) *progress << "# cell " << cfg.cell_key() << " done\n" << std::flush;
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        const std::string msg = cfg.cell_key() + ": " + e.what();
        outcome.errors.push_back(msg);
        if (progress) *progress << "# cell " << msg << '\n' << std::flush;
        try {
          append_line_atomically(out_dir, kErrorsFile, json{{"config", to_json(cfg)}, {"error", e.what()}}.dump());
        } catch (const std::exception&) {
        }
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(pending.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& slot : slots) {
    if (slot) outcome.records.push_back(std::move(*slot));
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::ofstream summary(out_dir / kSummaryFile, std::ios::binary | std::ios::trunc);
  if (!summary) throw Error(ErrorKind::Io, "cannot write " + (out_dir / kSummaryFile).string());
  write_summary_csv(summary, summarize(outcome.records));
  return outcome;
}

std::vector<CellSummary> summarize(std::span<const ExperimentRecord> records) {
  using Key = std::tuple<std::string, std::string, int, int>;
  std::map<Key, std::vector<const SeedRun*>> cells;
  for (const auto& rec : records) {
    const auto& c = rec.config;
    auto& runs = cells[{to_string(c.encoding), to_string(c.entanglement), c.width, c.depth}];
    for (const auto& r : rec.runs) runs.push_back(&r);
  }
  std::vector<CellSummary> out;
  for (auto& [key, runs] : cells) {
    std::sort(runs.begin(), runs.end(), [](const SeedRun* a, const SeedRun* b) {
      return std::tie(a->seed, a->metrics.accuracy, a->best_epoch, a->test_loss) <
             std::tie(b->seed, b->metrics.accuracy, b->best_epoch, b->test_loss);
    });
    std::vector<double> acc, prec, rec, f1, epochs;
    for (const SeedRun* r : runs) {
      acc.push_back(r->metrics.accuracy);
      prec.push_back(r->metrics.macro_precision);
      rec.push_back(r->metrics.macro_recall);
      f1.push_back(r->metrics.macro_f1);
      epochs.push_back(r->best_epoch);
    }
    CellSummary s;
    s.encoding = parse_encoding(std::get<0>(key));
    s.entanglement = parse_entanglement(std::get<1>(key));
    s.width = std::get<2>(key);
    s.depth = std::get<3>(key);
    s.runs = static_cast<int>(runs.size());
    s.mean_accuracy = mean_of(acc);
    s.std_accuracy = sample_std(acc);
    s.macro_precision = mean_of(prec);
    s.macro_recall = mean_of(rec);
    s.macro_f1 = mean_of(f1);
    s.mean_best_epoch = mean_of(epochs);
    s.parameters = Eigen::Index{s.width} * s.depth + Eigen::Index{kNumClasses} * s.width + kNumClasses;
    out.push_back(s);
  }
  return out;
}

namespace {

void write_cell_columns(std::ostream& out, const CellSummary& c) {
  out << to_string(c.encoding) << ',' << to_string(c.entanglement) << ',' << c.width << ',' << c.depth << ','
      << c.runs << ',' << c.mean_accuracy << ',' << c.std_accuracy << ',' << c.macro_precision << ','
      << c.macro_recall << ',' << c.macro_f1 << ',' << c.mean_best_epoch << ',' << c.parameters;
}

constexpr const char* kCellHeader =
    "encoding,entanglement,width,depth,runs,mean_accuracy,std_accuracy,macro_precision,macro_recall,macro_f1,"
    "mean_best_epoch,parameters";

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

// Strict "a is the better configuration".
bool better(const CellSummary& a, const CellSummary& b) {
  if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
  if (a.parameters != b.parameters) return a.parameters < b.parameters;
  if (a.mean_best_epoch != b.mean_best_epoch) return a.mean_best_epoch < b.mean_best_epoch;
  return std::make_tuple(to_string(a.encoding), to_string(a.entanglement), a.width, a.depth) <
         std::make_tuple(to_string(b.encoding), to_string(b.entanglement), b.width, b.depth);
}

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells) {
  out << std::setprecision(10) << kCellHeader << '\n';
  for (const auto& c : cells) {
    write_cell_columns(out, c);
    out << '\n';
  }
}

std::vector<Recommendation> recommend(std::span<const CellSummary> cells) {
  static const std::array<std::string, 4> factors{"encoding", "entanglement", "width", "depth"};
  auto value_of = [](const CellSummary& c, int factor) -> std::string {
    switch (factor) {
      case 0: return to_string(c.encoding);
      case 1: return to_string(c.entanglement);
      case 2: return std::to_string(c.width);
      default: return std::to_string(c.depth);
    }
  };
  std::vector<Recommendation> out;
  for (int mask = 0; mask < 16; ++mask) {
    std::string scenario;
    for (int f = 0; f < 4; ++f) {
      if (mask & (1 << f)) scenario += (scenario.empty() ? "" : "+") + factors[static_cast<std::size_t>(f)];
    }
    if (scenario.empty()) scenario = "none";
    std::map<std::string, CellSummary> best;
    for (const auto& c : cells) {
      std::string constraints;
      for (int f = 0; f < 4; ++f) {
        if (mask & (1 << f)) {
          constraints += (constraints.empty() ? "" : ";") + factors[static_cast<std::size_t>(f)] + "=" + value_of(c, f);
        }
      }
      auto [it, inserted] = best.emplace(constraints, c);
      if (!inserted && better(c, it->second)) it->second = c;
    }
    for (const auto& [constraints, cell] : best) out.push_back({scenario, constraints, cell});
  }
  return out;
}

std::vector<fs::path> write_report(std::span<const ExperimentRecord> records, const fs::path& out_dir) {
  if (records.empty()) throw Error(ErrorKind::Io, "no experiment records to report on");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + out_dir.string() + ": " + ec.message());

  const std::vector<CellSummary> cells = summarize(records);
  std::vector<fs::path> written;

  {
    const fs::path p = out_dir / kSummaryFile;
    auto out = open_output(p);
    write_summary_csv(out, cells);
    written.push_back(p);
  }

  // Accuracy as a function of width (rows grouped by depth) and of depth
  // (rows grouped by width).
  for (const bool by_width : {true, false}) {
    std::vector<CellSummary> sorted = cells;
    std::sort(sorted.begin(), sorted.end(), [by_width](const CellSummary& a, const CellSummary& b) {
      const auto ka = std::make_tuple(to_string(a.encoding), to_string(a.entanglement), by_width ? a.depth : a.width,
                                      by_width ? a.width : a.depth);
      const auto kb = std::make_tuple(to_string(b.encoding), to_string(b.entanglement), by_width ? b.depth : b.width,
                                      by_width ? b.width : b.depth);
      return ka < kb;
    });
    const fs::path p = out_dir / (by_width ? "accuracy_vs_width.csv" : "accuracy_vs_depth.csv");
    auto out = open_output(p);
    out << "encoding,entanglement," << (by_width ? "depth,width" : "width,depth")
        << ",runs,mean_accuracy,std_accuracy\n";
    for (const auto& c : sorted) {
      out << to_string(c.encoding) << ',' << to_string(c.entanglement) << ',' << (by_width ? c.depth : c.width) << ','
          << (by_width ? c.width : c.depth) << ',' << c.runs << ',' << c.mean_accuracy << ',' << c.std_accuracy
          << '\n';
    }
    written.push_back(p);
  }

  {
    const fs::path p = out_dir / "entanglement_delta.csv";
    auto out = open_output(p);
    out << "encoding,width,depth,ring_accuracy,none_accuracy,delta\n";
    std::map<std::tuple<std::string, int, int>, std::pair<const CellSummary*, const CellSummary*>> pairs;
    for (const auto& c : cells) {
      auto& slot = pairs[{to_string(c.encoding), c.width, c.depth}];
      (c.entanglement == Entanglement::Ring ? slot.first : slot.second) = &c;
    }
    for (const auto& [key, pair] : pairs) {
      if (!pair.first || !pair.second) continue;
      out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
          << pair.first->mean_accuracy << ',' << pair.second->mean_accuracy << ','
          << pair.first->mean_accuracy - pair.second->mean_accuracy << '\n';
    }
    written.push_back(p);
  }

  {
    const fs::path p = out_dir / "recommendations.csv";
    auto out = open_output(p);
    out << "scenario,constraints," << kCellHeader << '\n';
    for (const auto& r : recommend(cells)) {
      out << r.scenario << ',' << r.constraints << ',';
      write_cell_columns(out, r.best);
      out << '\n';
    }
    written.push_back(p);
  }
  return written;
}

}  // namespace plateau
