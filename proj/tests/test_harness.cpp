#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "plateau/harness.hpp"

using namespace plateau;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plateau_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig smoke_config() {
  ExperimentConfig cfg;
  cfg.encoding = Encoding::Amplitude;
  cfg.entanglement = Entanglement::Ring;
  cfg.width = 6;
  cfg.depth = 2;
  cfg.seeds = {1};
  cfg.subset = 200;
  cfg.train.max_epochs = 15;
  cfg.data_path = PLATEAU_TEST_DATA;
  return cfg;
}

std::string config_error(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    return e.what();
  }
  ADD_FAILURE() << "expected a config error";
  return {};
}

// Synthetic record with fixed per-seed accuracies; no training involved.
ExperimentRecord fake_record(Encoding enc, Entanglement ent, int width, int depth, std::vector<double> accuracies,
                             int best_epoch = 10) {
  ExperimentRecord rec;
  rec.config.encoding = enc;
  rec.config.entanglement = ent;
  rec.config.width = width;
  rec.config.depth = depth;
  rec.config.seeds.clear();
  std::uint64_t seed = 1;
  for (double a : accuracies) {
    SeedRun run;
    run.seed = seed;
    rec.config.seeds.push_back(seed++);
    run.metrics.accuracy = a;
    run.metrics.macro_precision = a;
    run.metrics.macro_recall = a;
    run.metrics.macro_f1 = a;
    run.best_epoch = best_epoch;
    run.history.epochs.push_back({1, 1.0, a, 1.0, a, 0.01});
    rec.runs.push_back(run);
  }
  return rec;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o, e;
  const int code = cli(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST(ExperimentConfig, ValidationNamesTheRule) {
  ExperimentConfig cfg = smoke_config();
  EXPECT_NO_THROW(cfg.validate());

  cfg.width = 5;
  EXPECT_NE(config_error(cfg).find("n >= 6"), std::string::npos);

  cfg = smoke_config();
  cfg.encoding = Encoding::Angle;
  cfg.width = 7;
  EXPECT_NE(config_error(cfg).find("n >= 8"), std::string::npos);
  cfg.width = 8;
  EXPECT_NO_THROW(cfg.validate());

  cfg = smoke_config();
  cfg.depth = 0;
  config_error(cfg);
  cfg = smoke_config();
  cfg.seeds = {};
  config_error(cfg);
  cfg = smoke_config();
  cfg.seeds = {3, 3};
  config_error(cfg);
  cfg = smoke_config();
  cfg.train.lr_factor = 2;
  config_error(cfg);
}

TEST(SweepGrid, DefaultGrid) {
  ExperimentConfig base;
  const auto grid = SweepGrid{}.expand(base);
  // amplitude: 5 widths x 2 families minus the skipped unentangled n = 14; angle: 4 x 2.
  EXPECT_EQ(grid.size(), (5 * 2 - 1 + 4 * 2) * 5u);
  std::set<std::string> keys;
  for (const auto& c : grid) {
    keys.insert(c.cell_key());
    EXPECT_NO_THROW(c.validate());
  }
  EXPECT_EQ(keys.size(), grid.size());
  EXPECT_TRUE(keys.count("amplitude:ring:14:10"));
  EXPECT_FALSE(keys.count("amplitude:none:14:2"));
  EXPECT_TRUE(keys.count("angle:none:8:2"));
  EXPECT_FALSE(keys.count("angle:ring:6:2"));
}

TEST(Config, ParsesSectionsAndComments) {
  std::istringstream in(
      "# top comment\n"
      "encoding = angle\n"
      "width = 8   # trailing\n"
      "[train]\n"
      "max_epochs = 7\n"
      "initial_lr = 0.5\n"
      "[sweep]\n"
      "depths = 2, 4\n"
      "encodings = angle\n"
      "jobs = 2\n");
  const ConfigFile file = parse_config(in);
  ExperimentConfig cfg;
  apply_config(file, cfg);
  EXPECT_EQ(cfg.encoding, Encoding::Angle);
  EXPECT_EQ(cfg.width, 8);
  EXPECT_EQ(cfg.train.max_epochs, 7);
  EXPECT_EQ(cfg.train.initial_lr, 0.5);
  SweepGrid grid;
  apply_config(file, grid);
  EXPECT_EQ(grid.depths, (std::vector<int>{2, 4}));
  EXPECT_EQ(grid.expand(cfg).size(), 4u * 2 * 2);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto apply_text = [](const std::string& text) {
    std::istringstream in(text);
    ExperimentConfig cfg;
    apply_config(parse_config(in), cfg);
  };
  EXPECT_THROW(apply_text("colour = red\n"), Error);
  EXPECT_THROW(apply_text("[train]\nmomentum = 0.9\n"), Error);
  EXPECT_THROW(apply_text("[extras]\nx = 1\n"), Error);
  EXPECT_THROW(apply_text("width = six\n"), Error);
  EXPECT_THROW(apply_text("width\n"), Error);
  EXPECT_THROW(apply_text("[train\n"), Error);
  EXPECT_THROW(parse_int_list(""), Error);
  EXPECT_EQ(parse_seed_list("1, 2,3"), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_THROW(load_config("/nonexistent/plateau.cfg"), Error);
}

TEST(Experiment, SmokeRunBeatsChanceAndIsDeterministic) {
  const ExperimentConfig cfg = smoke_config();
  const ExperimentRecord a = run_experiment(cfg);
  ASSERT_EQ(a.runs.size(), 1u);
  EXPECT_GT(a.runs[0].metrics.accuracy, 0.10);
  EXPECT_EQ(a.mean_accuracy, a.runs[0].metrics.accuracy);
  EXPECT_EQ(a.std_accuracy, 0.0);
  EXPECT_EQ(a.runs[0].history.epochs.size(), a.runs[0].history.epoch_seconds.size());

  const ExperimentRecord b = run_experiment(cfg);
  EXPECT_EQ(to_json(a.runs[0].history).dump(), to_json(b.runs[0].history).dump());
  nlohmann::json ja = to_json(a), jb = to_json(b);
  for (auto* j : {&ja, &jb}) {
    (*j).erase("wall_seconds");
    for (auto& r : (*j)["runs"]) {
      r.erase("seconds");
      r.erase("epoch_seconds");
    }
  }
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Experiment, RecordReplaysFromItsEmbeddedConfig) {
  const fs::path dir = fresh_dir("replay");
  ExperimentConfig cfg = smoke_config();
  cfg.train.max_epochs = 3;
  append_record(dir, run_experiment(cfg));
  const auto stored = load_records(dir);
  ASSERT_EQ(stored.size(), 1u);
  const ExperimentRecord replay = run_experiment(stored[0].config);
  EXPECT_EQ(to_json(replay.runs[0].history).dump(), to_json(stored[0].runs[0].history).dump());
}

TEST(Experiment, AnglePipelineFitsOnTrainingRowsOnly) {
  ExperimentConfig cfg = smoke_config();
  cfg.encoding = Encoding::Angle;
  cfg.width = 8;
  const Dataset ds = load_csv(cfg.data_path).head(200);
  const PreparedSplit prepared = prepare_split(ds, cfg, 1);
  ASSERT_TRUE(prepared.pca && prepared.scaler);
  const SplitDataset raw = split(ds, cfg.train_fraction, prepared.split.seed);
  const PcaModel expected = pca_fit(raw.train.features, 8);
  EXPECT_LT((prepared.pca->mean - expected.mean).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(prepared.split.train.dims(), 8);
  EXPECT_EQ(prepared.split.test.dims(), 8);
  EXPECT_GE(prepared.split.train.features.minCoeff(), 0.0);
  EXPECT_LE(prepared.split.train.features.maxCoeff(), std::numbers::pi);
  EXPECT_GE(prepared.split.test.features.minCoeff(), 0.0);
  EXPECT_LE(prepared.split.test.features.maxCoeff(), std::numbers::pi);

  cfg.train.max_epochs = 2;
  EXPECT_NO_THROW(run_experiment(cfg));
}

TEST(Records, JsonRoundTrip) {
  ExperimentConfig cfg = smoke_config();
  cfg.train.max_epochs = 2;
  const ExperimentRecord rec = run_experiment(cfg);
  const nlohmann::json j = to_json(rec);
  EXPECT_EQ(to_json(record_from_json(j)).dump(), j.dump());
  EXPECT_EQ(j.at("config").at("width"), 6);
  EXPECT_EQ(j.at("runs").size(), 1u);
}

TEST(Records, AppendAndLoad) {
  const fs::path dir = fresh_dir("append");
  EXPECT_THROW(load_records(dir), Error);
  append_record(dir, fake_record(Encoding::Amplitude, Entanglement::Ring, 6, 2, {0.5}));
  append_record(dir, fake_record(Encoding::Angle, Entanglement::None, 8, 4, {0.6, 0.7}));
  const auto records = load_records(dir);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[1].config.cell_key(), "angle:none:8:4");
  EXPECT_EQ(records[1].runs.size(), 2u);
  EXPECT_FALSE(fs::exists(dir / (std::string(kRecordsFile) + ".tmp")));

  std::ofstream(dir / kRecordsFile, std::ios::app) << "{not json\n";
  EXPECT_THROW(load_records(dir), Error);
}

TEST(Sweep, ResumesAndRecordsFailures) {
  const fs::path dir = fresh_dir("sweep");
  ExperimentConfig base = smoke_config();
  base.subset = 100;
  base.train.max_epochs = 2;
  SweepGrid grid;
  grid.encodings = {Encoding::Amplitude};
  grid.amplitude_widths = {6};
  grid.depths = {1, 2};
  auto configs = grid.expand(base);
  ASSERT_EQ(configs.size(), 4u);

  std::vector<ExperimentConfig> first(configs.begin(), configs.begin() + 2);
  const SweepOutcome a = run_sweep(first, dir);
  EXPECT_EQ(a.executed, 2);
  EXPECT_EQ(a.skipped, 0);

  const SweepOutcome b = run_sweep(configs, dir, 2);
  EXPECT_EQ(b.executed, 2);
  EXPECT_EQ(b.skipped, 2);
  EXPECT_EQ(b.records.size(), 4u);
  EXPECT_EQ(load_records(dir).size(), 4u);
  for (std::size_t i = 0; i < configs.size(); ++i) EXPECT_EQ(b.records[i].config.cell_key(), configs[i].cell_key());

  const SweepOutcome c = run_sweep(configs, dir);
  EXPECT_EQ(c.executed, 0);
  EXPECT_EQ(c.skipped, 4);

  // Summary: one row per distinct cell plus the header.
  const std::string summary = read_file(dir / kSummaryFile);
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 5);

  ExperimentConfig broken = base;
  broken.data_path = "/nonexistent/missing.csv";
  std::vector<ExperimentConfig> with_failure{broken, configs[0]};
  const SweepOutcome d = run_sweep(with_failure, dir);
  EXPECT_EQ(d.errors.size(), 1u);
  EXPECT_EQ(d.skipped, 1);
  EXPECT_TRUE(fs::exists(dir / kErrorsFile));
}

TEST(Report, SummaryAndDeltaTables) {
  std::vector<ExperimentRecord> records{
      fake_record(Encoding::Amplitude, Entanglement::Ring, 6, 2, {0.8, 0.6}),
      fake_record(Encoding::Amplitude, Entanglement::None, 6, 2, {0.5}),
  };
  const auto cells = summarize(records);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_NEAR(cells[0].mean_accuracy, 0.5, 1e-15);  // "none" sorts before "ring"
  EXPECT_NEAR(cells[1].mean_accuracy, 0.7, 1e-15);
  EXPECT_NEAR(cells[1].std_accuracy, std::sqrt(0.02), 1e-15);
  EXPECT_EQ(cells[1].parameters, 6 * 2 + 10 * 6 + 10);

  const fs::path dir = fresh_dir("report");
  const auto written = write_report(records, dir);
  EXPECT_EQ(written.size(), 5u);
  const std::string delta = read_file(dir / "entanglement_delta.csv");
  EXPECT_NE(delta.find("amplitude,6,2,0.7,0.5,0.2"), std::string::npos) << delta;
  EXPECT_EQ(std::count(delta.begin(), delta.end(), '\n'), 2);

  const std::vector<ExperimentRecord> none;
  EXPECT_THROW(write_report(none, dir), Error);
}

TEST(Report, SingleRecordGivesSingleCells) {
  const std::vector<ExperimentRecord> records{fake_record(Encoding::Angle, Entanglement::Ring, 8, 4, {0.4})};
  const fs::path dir = fresh_dir("single");
  write_report(records, dir);
  const std::string width = read_file(dir / "accuracy_vs_width.csv");
  EXPECT_EQ(std::count(width.begin(), width.end(), '\n'), 2);
  const std::string delta = read_file(dir / "entanglement_delta.csv");
  EXPECT_EQ(std::count(delta.begin(), delta.end(), '\n'), 1);
}

TEST(Report, OrderIndependent) {
  std::vector<ExperimentRecord> records;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> acc(0.3, 0.9);
  for (int n : {6, 8}) {
    for (int m : {2, 4}) {
      for (Entanglement e : {Entanglement::Ring, Entanglement::None}) {
        records.push_back(fake_record(Encoding::Amplitude, e, n, m, {acc(gen), acc(gen)}, 5 + n + m));
      }
    }
  }
  // Two records for the same cell, split across the file.
  records.push_back(fake_record(Encoding::Amplitude, Entanglement::Ring, 6, 2, {0.9}));
  records.push_back(fake_record(Encoding::Amplitude, Entanglement::None, 8, 4, {0.9}, 3));

  const fs::path a = fresh_dir("order_a");
  const fs::path b = fresh_dir("order_b");
  write_report(records, a);
  std::shuffle(records.begin(), records.end(), gen);
  write_report(records, b);
  for (const char* name :
       {"summary.csv", "accuracy_vs_width.csv", "accuracy_vs_depth.csv", "entanglement_delta.csv",
        "recommendations.csv"}) {
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  }
}

TEST(Report, RecommendationTieBreaks) {
  std::vector<ExperimentRecord> records{
      fake_record(Encoding::Amplitude, Entanglement::Ring, 8, 2, {0.7}, 20),
      fake_record(Encoding::Amplitude, Entanglement::Ring, 6, 4, {0.7}, 20),  // fewer parameters
      fake_record(Encoding::Amplitude, Entanglement::None, 6, 4, {0.7}, 9),   // same size, earlier epoch
      fake_record(Encoding::Angle, Entanglement::Ring, 8, 2, {0.6}, 1),
  };
  const auto cells = summarize(records);
  const auto recs = recommend(cells);
  std::map<std::string, std::vector<Recommendation>> by_scenario;
  for (const auto& r : recs) by_scenario[r.scenario].push_back(r);
  EXPECT_EQ(by_scenario.size(), 16u);
  ASSERT_EQ(by_scenario["none"].size(), 1u);
  const CellSummary& best = by_scenario["none"][0].best;
  EXPECT_EQ(best.width, 6);
  EXPECT_EQ(best.entanglement, Entanglement::None);

  ASSERT_EQ(by_scenario["encoding"].size(), 2u);
  for (const auto& r : by_scenario["encoding"]) {
    if (r.constraints == "encoding=angle") EXPECT_EQ(r.best.mean_accuracy, 0.6);
  }
  EXPECT_EQ(by_scenario["encoding+entanglement+width+depth"].size(), cells.size());
}

TEST(Cli, UsageAndExitCodes) {
  std::string out, err;
  EXPECT_EQ(run_cli({"train", "--bogus"}, &out, &err), 1);
  EXPECT_NE(err.find("Usage"), std::string::npos) << err;
  EXPECT_EQ(run_cli({}, &out, &err), 1);

  const fs::path empty = fresh_dir("cli_empty");
  fs::create_directories(empty);
  EXPECT_EQ(run_cli({"report", "--out", empty.string()}, &out, &err), 2);
  EXPECT_NE(err.find("error"), std::string::npos);

  EXPECT_EQ(run_cli({"train", "--width", "5", "--data", PLATEAU_TEST_DATA, "--out", empty.string()}, &out, &err), 1);
  EXPECT_NE(err.find("n >= 6"), std::string::npos) << err;

  EXPECT_EQ(run_cli({"train", "--data", "/nonexistent/digits.csv", "--out", empty.string()}, &out, &err), 2);
  EXPECT_EQ(run_cli({"train", "--encoding", "basis"}, &out, &err), 1);
  EXPECT_EQ(run_cli({"train", "--config", "/nonexistent/x.cfg"}, &out, &err), 2);
}

TEST(Cli, BpScanPrintsCsv) {
  std::string out;
  const fs::path dir = fresh_dir("cli_scan");
  ASSERT_EQ(run_cli({"bp-scan", "--widths", "2,3", "--depth", "2", "--samples", "20", "--seed", "7", "--out",
                     dir.string()},
                    &out),
            0);
  EXPECT_EQ(out.rfind("width,depth,entanglement,samples,variance", 0), 0u);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 3);
  EXPECT_EQ(read_file(dir / "bp_scan.csv"), out);
}

TEST(Cli, TrainThenReport) {
  const fs::path dir = fresh_dir("cli_train");
  std::string out, err;
  ASSERT_EQ(run_cli({"train", "--encoding", "amplitude", "--width", "6", "--depth", "2", "--seed", "1", "--subset",
                     "100", "--max-epochs", "2", "--data", PLATEAU_TEST_DATA, "--out", dir.string()},
                    &out, &err),
            0)
      << err;
  const auto record = nlohmann::json::parse(out);
  EXPECT_EQ(record.at("cell"), "amplitude:ring:6:2");
  EXPECT_EQ(load_records(dir).size(), 1u);
  EXPECT_NE(err.find("epoch\t1\t"), std::string::npos);

  ASSERT_EQ(run_cli({"report", "--out", dir.string()}, &out, &err), 0) << err;
  EXPECT_TRUE(fs::exists(dir / "report" / "recommendations.csv"));
}

TEST(Cli, DataPathFromEnvironment) {
  const fs::path dir = fresh_dir("cli_env");
  ::setenv(kDataEnvVar, "/nonexistent/from_env.csv", 1);
  std::string err;
  EXPECT_EQ(run_cli({"train", "--out", dir.string()}, nullptr, &err), 2);
  EXPECT_NE(err.find("from_env.csv"), std::string::npos) << err;
  ::unsetenv(kDataEnvVar);
}
