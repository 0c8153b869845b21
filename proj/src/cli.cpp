#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "plateau/harness.hpp"

namespace plateau {
namespace fs = std::filesystem;

namespace {

#ifndef PLATEAU_LAB_DEFAULT_DATA
#define PLATEAU_LAB_DEFAULT_DATA "data/digits.csv"
#endif

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> data;
  std::optional<std::string> out;
  std::optional<std::string> encoding;
  std::optional<std::string> entanglement;
  std::optional<int> width;
  std::optional<int> depth;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> seeds;
  std::optional<Eigen::Index> subset;
  std::optional<int> max_epochs;
  std::optional<int> jobs;
  std::optional<std::string> widths;
  std::optional<int> samples;
};

ConfigFile read_config_file(const Flags& f) { return f.config ? load_config(*f.config) : ConfigFile{}; }

ExperimentConfig resolve_experiment(const Flags& f, const ConfigFile& file) {
  ExperimentConfig cfg;
  apply_config(file, cfg);
  if (f.data) {
    cfg.data_path = *f.data;
  } else if (cfg.data_path.empty()) {
    const char* env = std::getenv(kDataEnvVar);
    cfg.data_path = env && *env ? env : PLATEAU_LAB_DEFAULT_DATA;
  }
  if (f.out) cfg.output_dir = *f.out;
  if (f.encoding) cfg.encoding = parse_encoding(*f.encoding);
  if (f.entanglement) cfg.entanglement = parse_entanglement(*f.entanglement);
  if (f.width) cfg.width = *f.width;
  if (f.depth) cfg.depth = *f.depth;
  if (f.seeds) cfg.seeds = parse_seed_list(*f.seeds);
  if (f.seed) cfg.seeds = {*f.seed};
  if (f.subset) cfg.subset = *f.subset;
  if (f.max_epochs) cfg.train.max_epochs = *f.max_epochs;
  return cfg;
}

int run_train(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = resolve_experiment(f, read_config_file(f));
  cfg.validate();
  const ExperimentRecord rec = run_experiment(cfg, &err);
  append_record(cfg.output_dir, rec);
  out << to_json(rec).dump() << '\n';
  err << "# " << cfg.cell_key() << " mean test accuracy " << rec.mean_accuracy << " (record appended to "
      << (fs::path(cfg.output_dir) / kRecordsFile).string() << ")\n";
  return 0;
}

int run_sweep_command(const Flags& f, std::ostream& out, std::ostream& err) {
  const ConfigFile file = read_config_file(f);
  const ExperimentConfig base = resolve_experiment(f, file);
  SweepGrid grid;
  apply_config(file, grid);
  int jobs = 1;
  if (auto it = file.find("sweep"); it != file.end()) {
    if (auto j = it->second.find("jobs"); j != it->second.end()) jobs = parse_int_list(j->second).front();
  }
  if (f.jobs) jobs = *f.jobs;
  if (jobs < 1) throw Error(ErrorKind::Config, "--jobs must be >= 1");

  const auto configs = grid.expand(base);
  if (configs.empty()) throw Error(ErrorKind::Config, "sweep grid is empty");
  for (const auto& c : configs) c.validate();
  const SweepOutcome outcome = run_sweep(configs, base.output_dir, jobs, &err);
  write_summary_csv(out, summarize(outcome.records));
  err << "# sweep: " << outcome.executed << " executed, " << outcome.skipped << " already present, "
      << outcome.errors.size() << " failed\n";
  return outcome.errors.empty() ? 0 : 1;
}

int run_bp_scan(const Flags& f, std::ostream& out, std::ostream& err) {
  const ConfigFile file = read_config_file(f);
  std::vector<int> widths{4, 6, 8, 10};
  int depth = 10;
  int samples = 500;
  std::uint64_t seed = 7;
  Entanglement ent = Entanglement::Ring;
  if (auto it = file.find("bp-scan"); it != file.end()) {
    for (const auto& [key, value] : it->second) {
      if (key == "widths") widths = parse_int_list(value);
      else if (key == "depth") depth = parse_int_list(value).front();
      else if (key == "samples") samples = parse_int_list(value).front();
      else if (key == "seed") seed = parse_seed_list(value).front();
      else if (key == "entanglement") ent = parse_entanglement(value);
      else throw Error(ErrorKind::Config, "unknown key '" + key + "' in [bp-scan]");
    }
  }
  if (f.widths) widths = parse_int_list(*f.widths);
  if (f.depth) depth = *f.depth;
  if (f.samples) samples = *f.samples;
  if (f.seed) seed = *f.seed;
  if (f.entanglement) ent = parse_entanglement(*f.entanglement);

  const VarianceScanResult result = bp_variance_scan(widths, depth, ent, samples, seed);
  write_variance_csv(out, result);
  if (f.out) {
    std::error_code ec;
    fs::create_directories(*f.out, ec);
    const fs::path path = fs::path(*f.out) / "bp_scan.csv";
    std::ofstream file_out(path, std::ios::binary | std::ios::trunc);
    if (!file_out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_variance_csv(file_out, result);
    err << "# wrote " << path.string() << '\n';
  }
  return 0;
}

int run_report(const Flags& f, std::ostream& out, std::ostream&) {
  const ConfigFile file = read_config_file(f);
  ExperimentConfig cfg;
  apply_config(file, cfg);
  const fs::path dir = f.out ? fs::path(*f.out) : fs::path(cfg.output_dir);
  const auto records = load_records(dir);
  for (const auto& path : write_report(records, dir / "report")) out << path.string() << '\n';
  return 0;
}

int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::Io || e.kind() == ErrorKind::Parse ? 2 : 1;
}

}  // namespace

int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid quantum-classical classifier lab: training, sweeps, barren-plateau scans, reports",
               "plateau-lab"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "Sectioned key=value config file");
    sub->add_option("--out", f.out, "Output / records directory");
  };
  auto add_experiment = [&f](CLI::App* sub) {
    sub->add_option("--data", f.data, "Digits CSV (falls back to $PLATEAU_LAB_DATA)");
    sub->add_option("--seeds", f.seeds, "Comma-separated seeds");
    sub->add_option("--subset", f.subset, "Keep only the first M rows of the dataset");
    sub->add_option("--max-epochs", f.max_epochs, "Override the epoch limit");
  };

  CLI::App* train = app.add_subcommand("train", "Train one configuration and append its record");
  add_common(train);
  add_experiment(train);
  train->add_option("--seed", f.seed, "Single seed");
  train->add_option("--encoding", f.encoding, "amplitude | angle");
  train->add_option("--entanglement", f.entanglement, "ring | none");
  train->add_option("--width", f.width, "Qubit count n");
  train->add_option("--depth", f.depth, "Layer repetitions m");

  CLI::App* sweep = app.add_subcommand("sweep", "Run (or resume) the width x depth x encoding x entanglement grid");
  add_common(sweep);
  add_experiment(sweep);
  sweep->add_option("--seed", f.seed, "Single seed per cell");
  sweep->add_option("--jobs", f.jobs, "Cells run concurrently");

  CLI::App* scan = app.add_subcommand("bp-scan", "Gradient-variance scan over circuit widths");
  add_common(scan);
  scan->add_option("--widths", f.widths, "Comma-separated widths");
  scan->add_option("--depth", f.depth, "Layer repetitions m");
  scan->add_option("--samples", f.samples, "Random parameter draws per width");
  scan->add_option("--seed", f.seed, "Base seed");
  scan->add_option("--entanglement", f.entanglement, "ring | none");

  CLI::App* report = app.add_subcommand("report", "Regenerate comparison tables from stored records");
  add_common(report);

  std::vector<const char*> argv{"plateau-lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*train) return run_train(f, out, err);
    if (*sweep) return run_sweep_command(f, out, err);
    if (*scan) return run_bp_scan(f, out, err);
    return run_report(f, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace plateau
