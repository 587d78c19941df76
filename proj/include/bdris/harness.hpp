#pragma once

// Monte Carlo experiment harness: sweep definitions, deterministic trial
// dispatch across a worker pool, CSV emission, and the key-value config-file
// parser feeding the CLI.
//
// Determinism contract: every trial derives its own seed from
// (base seed, trial index) before dispatch, results land in pre-assigned
// slots, and aggregation runs in index order — so the CSV bytes do not
// depend on thread count or scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/solver.hpp"

namespace bdris {

enum class SweepAxis { PowerDbm, NumGroups, NumCells };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::PowerDbm: return "power_dbm";
    case SweepAxis::NumGroups: return "groups";
    case SweepAxis::NumCells: return "cells";
  }
  return "?";
}

inline SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "power_dbm") return SweepAxis::PowerDbm;
  if (name == "groups") return SweepAxis::NumGroups;
  if (name == "cells") return SweepAxis::NumCells;
  throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

struct ExperimentSpec {
  SystemConfig base;
  SweepAxis axis = SweepAxis::PowerDbm;
  std::vector<double> values;            // nonempty
  std::vector<Architecture> architectures{Architecture::CwSc, Architecture::CwGcHorizontal,
                                          Architecture::CwDgc, Architecture::CwFc};
  int trials = 100;
  int threads = 0;                       // 0 = hardware concurrency
  std::string output_path;
  SolveOptions solve;

  void validate() const {
    base.validate();
    if (values.empty()) throw std::invalid_argument("ExperimentSpec: empty sweep list");
    if (architectures.empty())
      throw std::invalid_argument("ExperimentSpec: no architectures");
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
  }
};

/// One aggregated CSV row: an (architecture, sweep value) pair.
struct ExperimentRow {
  std::string architecture;
  std::string sweep_param;
  double sweep_value = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_sum_rate = 0.0;
  double std_sum_rate = 0.0;
  double mean_outer_iterations = 0.0;
  double mean_activated_links = 0.0;
  double mean_approx_gap = 0.0;
  std::uint64_t seed = 0;
};

/// Largest divisor of m not exceeding sqrt(m); grid shape used when the
/// sweep changes the cell count (6x6 for 36, 4x4 for 16, 4x6 for 24).
inline int grid_rows_for(int num_cells) {
  int best = 1;
  for (int r = 1; r * r <= num_cells; ++r)
    if (num_cells % r == 0) best = r;
  return best;
}

/// Instantiate the scenario config for one sweep value.
inline SystemConfig config_for(const ExperimentSpec& spec, double value) {
  SystemConfig cfg = spec.base;
  switch (spec.axis) {
    case SweepAxis::PowerDbm:
      cfg.transmit_power_mw = dbm_to_mw(value);
      break;
    case SweepAxis::NumGroups:
      cfg.num_groups = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::NumCells: {
      cfg.num_cells = static_cast<int>(std::lround(value));
      cfg.grid_rows = grid_rows_for(cfg.num_cells);
      cfg.grid_cols = cfg.num_cells / cfg.grid_rows;
      break;
    }
  }
  return cfg;
}

namespace detail {

struct TrialOutcome {
  bool failed = true;
  double sum_rate = 0.0;
  double outer_iterations = 0.0;
  double activated_links = 0.0;
  double approx_gap = 0.0;
};

inline void run_indexed(int num_tasks, int threads, const std::function<void(int)>& task) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  int pool = threads > 0 ? threads : std::max(hw, 1);
  pool = std::min(pool, num_tasks);
  if (pool <= 1) {
    for (int i = 0; i < num_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(pool);
  for (int t = 0; t < pool; ++t)
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < num_tasks; i = next.fetch_add(1)) task(i);
    });
  for (auto& w : workers) w.join();
}

}  // namespace detail

/// Run the full sweep. Each (architecture, value, trial) cell is an
/// independent solve; per-trial solver failures are counted in the row and
/// never abort the sweep.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  struct Task {
    int row;
    SystemConfig cfg;
    Architecture arch;
    std::uint64_t trial;
  };
  std::vector<Task> tasks;
  std::vector<ExperimentRow> rows;
  for (const Architecture arch : spec.architectures) {
    for (const double value : spec.values) {
      ExperimentRow row;
      row.architecture = to_string(arch);
      row.sweep_param = to_string(spec.axis);
      row.sweep_value = value;
      row.trials = spec.trials;
      row.seed = spec.base.seed;
      const int row_index = static_cast<int>(rows.size());
      rows.push_back(row);

      SystemConfig cfg = config_for(spec, value);
      for (int t = 0; t < spec.trials; ++t) {
        SystemConfig cfg_t = cfg;
        cfg_t.seed = derive_seed(spec.base.seed, {kStreamTrial, static_cast<std::uint64_t>(t)});
        tasks.push_back({row_index, cfg_t, arch, static_cast<std::uint64_t>(t)});
      }
    }
  }

  std::vector<detail::TrialOutcome> outcomes(tasks.size());
  detail::run_indexed(static_cast<int>(tasks.size()), spec.threads, [&](int i) {
    const Task& task = tasks[i];
    try {
      task.cfg.validate();
      const ChannelSet channels = generate_channels(task.cfg, task.trial);
      const SolveResult result =
          solve_scenario(task.cfg, channels, task.arch, spec.solve);
      outcomes[i] = {false, result.sum_rate_bits,
                     static_cast<double>(result.outer_iterations),
                     static_cast<double>(result.activated_links),
                     result.approximation_gap};
    } catch (const std::exception&) {
      outcomes[i].failed = true;
    }
  });

  // Aggregate in task order (deterministic regardless of thread count).
  std::vector<std::vector<double>> rates(rows.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    ExperimentRow& row = rows[tasks[i].row];
    const detail::TrialOutcome& o = outcomes[i];
    if (o.failed) {
      ++row.failures;
      continue;
    }
    rates[tasks[i].row].push_back(o.sum_rate);
    row.mean_outer_iterations += o.outer_iterations;
    row.mean_activated_links += o.activated_links;
    row.mean_approx_gap += o.approx_gap;
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ExperimentRow& row = rows[r];
    const auto& xs = rates[r];
    const double n = static_cast<double>(xs.size());
    if (xs.empty()) continue;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    row.mean_sum_rate = mean;
    row.std_sum_rate = xs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    row.mean_outer_iterations /= n;
    row.mean_activated_links /= n;
    row.mean_approx_gap /= n;
  }
  return rows;
}

inline const char* csv_header() {
  return "architecture,sweep_param,sweep_value,trials,failures,mean_sum_rate,"
         "std_sum_rate,mean_outer_iterations,mean_activated_links,"
         "mean_approx_gap,seed";
}

inline std::string csv_string(const std::vector<ExperimentRow>& rows) {
  std::ostringstream os;
  os << csv_header() << "\n";
  char buf[512];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%.15g,%d,%d,%.15g,%.15g,%.15g,%.15g,%.15g,%llu\n",
                  row.architecture.c_str(), row.sweep_param.c_str(), row.sweep_value,
                  row.trials, row.failures, row.mean_sum_rate, row.std_sum_rate,
                  row.mean_outer_iterations, row.mean_activated_links,
                  row.mean_approx_gap,
                  static_cast<unsigned long long>(row.seed));
    os << buf;
  }
  return os.str();
}

inline void write_csv(const std::string& path, const std::vector<ExperimentRow>& rows) {
  std::ofstream os(path, std::ios::binary);  // binary: identical bytes everywhere
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << csv_string(rows);
}

// ---------------------------------------------------------------------------
// Config file: flat key-value sections, '#' comments.
//
//   [system]
//   bs_antennas = 6
//   ...
//   [experiment]
//   sweep = power_dbm
//   values = 28, 30, 32
//   ...
// ---------------------------------------------------------------------------

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

using ConfigSection = std::map<std::string, ConfigEntry>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class ParsedConfig {
 public:
  static ParsedConfig parse(std::istream& is) {
    ParsedConfig cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      const auto comment = line.find('#');
      if (comment != std::string::npos) line.erase(comment);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        cfg.sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      if (section.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": key outside any [section]");
      auto [it, inserted] = cfg.sections_[section].emplace(key, ConfigEntry{value, line_no, false});
      if (!inserted)
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) {
    auto& entry = entry_for(section, key);
    entry.used = true;
    return entry.value;
  }

  double get_double(const std::string& section, const std::string& key) {
    auto& entry = entry_for(section, key);
    entry.used = true;
    try {
      std::size_t pos = 0;
      const double v = std::stod(entry.value, &pos);
      if (pos != entry.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(entry.line) + ": field '" + key +
                        "' is not a number: '" + entry.value + "'");
    }
  }

  long long get_int(const std::string& section, const std::string& key) {
    auto& entry = entry_for(section, key);
    entry.used = true;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(entry.value, &pos);
      if (pos != entry.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(entry.line) + ": field '" + key +
                        "' is not an integer: '" + entry.value + "'");
    }
  }

  std::vector<double> get_double_list(const std::string& section, const std::string& key) {
    auto& entry = entry_for(section, key);
    entry.used = true;
    std::vector<double> out;
    for (const auto& item : split_list(entry.value)) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(entry.line) + ": field '" + key +
                          "' holds a non-numeric item: '" + item + "'");
      }
    }
    if (out.empty())
      throw ConfigError("line " + std::to_string(entry.line) + ": field '" + key +
                        "' is an empty list");
    return out;
  }

  std::vector<std::string> get_string_list(const std::string& section, const std::string& key) {
    auto& entry = entry_for(section, key);
    entry.used = true;
    return split_list(entry.value);
  }

  void reject_unused() const {
    for (const auto& [section, entries] : sections_)
      for (const auto& [key, entry] : entries)
        if (!entry.used)
          throw ConfigError("line " + std::to_string(entry.line) + ": unknown field '" +
                            key + "' in section [" + section + "]");
  }

 private:
  ConfigEntry& entry_for(const std::string& section, const std::string& key) {
    const auto s = sections_.find(section);
    if (s == sections_.end()) throw ConfigError("missing section [" + section + "]");
    const auto e = s->second.find(key);
    if (e == s->second.end())
      throw ConfigError("section [" + section + "]: missing field '" + key + "'");
    return e->second;
  }

  std::map<std::string, ConfigSection> sections_;
};

}  // namespace detail

/// Parse [system] into a SystemConfig (every field optional, defaults from
/// SystemConfig). dBm/dB fields are converted to linear units here.
inline SystemConfig parse_system_section(detail::ParsedConfig& cfg) {
  SystemConfig out;
  const std::string s = "system";
  auto i = [&](const char* key, int& field) {
    if (cfg.has(s, key)) field = static_cast<int>(cfg.get_int(s, key));
  };
  auto d = [&](const char* key, double& field) {
    if (cfg.has(s, key)) field = cfg.get_double(s, key);
  };
  i("bs_antennas", out.num_bs_antennas);
  i("users", out.num_users);
  i("reflective_users", out.num_reflective);
  i("cells", out.num_cells);
  i("groups", out.num_groups);
  i("grid_rows", out.grid_rows);
  i("grid_cols", out.grid_cols);
  if (cfg.has(s, "power_dbm")) out.transmit_power_mw = dbm_to_mw(cfg.get_double(s, "power_dbm"));
  if (cfg.has(s, "noise_dbm")) out.noise_power_mw = dbm_to_mw(cfg.get_double(s, "noise_dbm"));
  if (cfg.has(s, "ref_gain_db")) out.ref_gain = db_to_linear(cfg.get_double(s, "ref_gain_db"));
  d("ref_distance_m", out.ref_distance);
  d("dist_bs_ris_m", out.dist_bs_ris);
  d("dist_ris_user_m", out.dist_ris_user);
  d("pathloss_exp_bs_ris", out.pathloss_exp_bi);
  d("pathloss_exp_ris_user", out.pathloss_exp_iu);
  d("rician_factor", out.rician_factor);
  if (cfg.has(s, "seed")) out.seed = static_cast<std::uint64_t>(cfg.get_int(s, "seed"));
  return out;
}

/// Parse a full experiment spec ([system] + [experiment]) from a stream.
inline ExperimentSpec parse_experiment_spec(std::istream& is) {
  auto cfg = detail::ParsedConfig::parse(is);
  ExperimentSpec spec;
  spec.base = parse_system_section(cfg);

  const std::string e = "experiment";
  if (cfg.has(e, "trials")) spec.trials = static_cast<int>(cfg.get_int(e, "trials"));
  if (cfg.has(e, "threads")) spec.threads = static_cast<int>(cfg.get_int(e, "threads"));
  if (cfg.has(e, "sweep")) spec.axis = parse_sweep_axis(cfg.get_string(e, "sweep"));
  if (cfg.has(e, "values")) spec.values = cfg.get_double_list(e, "values");
  if (cfg.has(e, "out")) spec.output_path = cfg.get_string(e, "out");
  if (cfg.has(e, "architectures")) {
    spec.architectures.clear();
    for (const auto& name : cfg.get_string_list(e, "architectures"))
      spec.architectures.push_back(parse_architecture(name));
  }
  cfg.reject_unused();
  if (spec.values.empty()) {
    // Default sweep: the configured power only.
    spec.axis = SweepAxis::PowerDbm;
    spec.values = {mw_to_dbm(spec.base.transmit_power_mw)};
  }
  spec.validate();
  return spec;
}

inline ExperimentSpec parse_experiment_spec_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  return parse_experiment_spec(is);
}

}  // namespace bdris
