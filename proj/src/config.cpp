#include <charconv>
#include <fstream>
#include <sstream>

#include "plateau/harness.hpp"

namespace plateau {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::Config, "invalid value '" + text + "' for " + key);
  }
  return value;
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw Error(ErrorKind::Config, "unknown key '" + key + "' in [" + section + "]");
}

}  // namespace

ConfigFile parse_config(std::istream& in) {
  ConfigFile file;
  std::string section = "experiment";
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      file[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": empty key");
    file[section][key] = trim(line.substr(eq + 1));
  }
  return file;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  return parse_config(in);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<int>("integer list", item));
  if (out.empty()) throw Error(ErrorKind::Config, "empty list '" + text + "'");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<std::uint64_t>("seed list", item));
  if (out.empty()) throw Error(ErrorKind::Config, "empty seed list '" + text + "'");
  return out;
}

void apply_config(const ConfigFile& file, ExperimentConfig& cfg) {
  for (const auto& [section, entries] : file) {
    if (section == "experiment") {
      for (const auto& [key, value] : entries) {
        if (key == "encoding") cfg.encoding = parse_encoding(value);
        else if (key == "entanglement") cfg.entanglement = parse_entanglement(value);
        else if (key == "width") cfg.width = parse_number<int>(key, value);
        else if (key == "depth") cfg.depth = parse_number<int>(key, value);
        else if (key == "seeds" || key == "seed") cfg.seeds = parse_seed_list(value);
        else if (key == "data") cfg.data_path = value;
        else if (key == "out") cfg.output_dir = value;
        else if (key == "subset") cfg.subset = parse_number<Eigen::Index>(key, value);
        else if (key == "train_fraction") cfg.train_fraction = parse_number<double>(key, value);
        else unknown_key(section, key);
      }
    } else if (section == "train") {
      TrainConfig& t = cfg.train;
      for (const auto& [key, value] : entries) {
        if (key == "max_epochs") t.max_epochs = parse_number<int>(key, value);
        else if (key == "batch_size") t.batch_size = parse_number<int>(key, value);
        else if (key == "initial_lr") t.initial_lr = parse_number<double>(key, value);
        else if (key == "lr_factor") t.lr_factor = parse_number<double>(key, value);
        else if (key == "lr_patience") t.lr_patience = parse_number<int>(key, value);
        else if (key == "stop_patience") t.stop_patience = parse_number<int>(key, value);
        else if (key == "adam_beta1") t.adam_beta1 = parse_number<double>(key, value);
        else if (key == "adam_beta2") t.adam_beta2 = parse_number<double>(key, value);
        else if (key == "adam_eps") t.adam_eps = parse_number<double>(key, value);
        else if (key == "min_improvement") t.min_improvement = parse_number<double>(key, value);
        else unknown_key(section, key);
      }
    } else if (section != "sweep" && section != "bp-scan") {
      throw Error(ErrorKind::Config, "unknown config section [" + section + "]");
    }
  }
}

void apply_config(const ConfigFile& file, SweepGrid& grid) {
  const auto it = file.find("sweep");
  if (it == file.end()) return;
  for (const auto& [key, value] : it->second) {
    if (key == "amplitude_widths") grid.amplitude_widths = parse_int_list(value);
    else if (key == "angle_widths") grid.angle_widths = parse_int_list(value);
    else if (key == "depths") grid.depths = parse_int_list(value);
    else if (key == "encodings") {
      grid.encodings.clear();
      for (const auto& v : split_list(value)) grid.encodings.push_back(parse_encoding(v));
    } else if (key == "entanglements") {
      grid.entanglements.clear();
      for (const auto& v : split_list(value)) grid.entanglements.push_back(parse_entanglement(v));
    } else if (key == "skip") {
      grid.skip = split_list(value);
    } else if (key != "jobs") {
      unknown_key("sweep", key);
    }
  }
}

}  // namespace plateau
