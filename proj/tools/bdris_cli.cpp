// Command-line front end: single-scenario runs, Monte Carlo sweeps,
// architecture comparisons, and the invariant self-test suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdris/bdris.hpp"
#include "bdris/self_test.hpp"

namespace {

using nlohmann::json;

json matrix_to_json(const bdris::CMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

json result_to_json(const bdris::SolveResult& result, const std::string& arch,
                    bool dump_matrices) {
  json j;
  j["architecture"] = arch;
  j["sum_rate_bits"] = result.sum_rate_bits;
  j["outer_iterations"] = result.outer_iterations;
  j["converged"] = result.converged;
  j["activated_links"] = result.activated_links;
  j["approximation_gap"] = result.approximation_gap;
  j["rcg_iterations"] = result.rcg_iterations;
  j["grouping"] = result.grouping.to_one_based();
  if (dump_matrices) {
    j["phi_t"] = matrix_to_json(result.bdris.phi_t);
    j["phi_r"] = matrix_to_json(result.bdris.phi_r);
    j["precoder"] = matrix_to_json(result.precoder);
  }
  return j;
}

bdris::ExperimentSpec load_spec(const std::string& config_path) {
  if (config_path.empty()) return bdris::ExperimentSpec{};
  return bdris::parse_experiment_spec_file(config_path);
}

void print_result(const bdris::SolveResult& result, const std::string& arch) {
  std::printf("architecture        %s\n", arch.c_str());
  std::printf("sum rate            %.6f bits/s/Hz\n", result.sum_rate_bits);
  std::printf("outer iterations    %d%s\n", result.outer_iterations,
              result.converged ? "" : " (not converged)");
  std::printf("activated links     %lld\n", result.activated_links);
  std::printf("approximation gap   %.3e\n", result.approximation_gap);
  std::printf("grouping            %s\n", result.grouping.to_string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CW-DGC BD-RIS sum-rate simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string arch_list = "cw-dgc";
  std::string out_path;
  std::string json_path;
  std::string matrix_prefix;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  int trial_index = 0;
  int threads = 0;
  bool quiet = false;
  bool dump_matrices = false;

  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* run = app.add_subcommand("run", "solve a single scenario and print the result");
  run->add_option("--config", config_path, "scenario config file");
  run->add_option("--arch", arch_list, "architecture to run");
  run->add_option("--trial", trial_index, "trial index for the channel draw");
  run->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) { seed_set = true; });
  run->add_option("--json", json_path, "write the result as JSON to this path");
  run->add_flag("--dump-matrices", dump_matrices, "include matrices in the JSON dump");
  run->add_option("--matrix-out", matrix_prefix,
                  "write phi_t/phi_r/precoder CSV snapshots with this path prefix");

  auto* sweep = app.add_subcommand("sweep", "run the Monte Carlo sweep from a config file");
  sweep->add_option("--config", config_path, "experiment config file")->required();
  sweep->add_option("--out", out_path, "override the CSV output path");
  sweep->add_option("--trials", trials, "override the trial count");
  sweep->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) { seed_set = true; });
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* compare = app.add_subcommand("compare", "compare architectures on one scenario");
  compare->add_option("--config", config_path, "scenario config file");
  compare->add_option("--arch", arch_list, "comma-separated architecture list")->required();
  compare->add_option("--trials", trials, "trials per architecture");
  compare->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) { seed_set = true; });
  compare->add_option("--out", out_path, "also write rows as CSV");
  compare->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* validate = app.add_subcommand("validate", "run the invariant self-test suite");
  validate->add_option("--seed", seed, "self-test seed")->each([&](const std::string&) { seed_set = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) {
      bdris::ExperimentSpec spec = load_spec(config_path);
      bdris::SystemConfig cfg = spec.base;
      if (seed_set) cfg.seed = seed;
      const bdris::Architecture arch = bdris::parse_architecture(arch_list);
      const auto channels = bdris::generate_channels(cfg, trial_index);
      const auto result = bdris::solve_scenario(cfg, channels, arch, spec.solve);
      if (!quiet) print_result(result, bdris::to_string(arch));
      if (!json_path.empty()) {
        std::ofstream os(json_path);
        if (!os) throw std::runtime_error("cannot open " + json_path);
        os << result_to_json(result, bdris::to_string(arch), dump_matrices).dump(2) << "\n";
      }
      if (!matrix_prefix.empty()) {
        bdris::write_matrix_csv(matrix_prefix + "phi_t.csv", result.bdris.phi_t);
        bdris::write_matrix_csv(matrix_prefix + "phi_r.csv", result.bdris.phi_r);
        bdris::write_matrix_csv(matrix_prefix + "precoder.csv", result.precoder);
      }
      return 0;
    }

    if (app.got_subcommand(sweep)) {
      bdris::ExperimentSpec spec = load_spec(config_path);
      if (seed_set) spec.base.seed = seed;
      if (trials > 0) spec.trials = trials;
      if (threads > 0) spec.threads = threads;
      if (!out_path.empty()) spec.output_path = out_path;
      if (spec.output_path.empty())
        throw std::runtime_error("sweep: no output path (config 'out' or --out)");
      const auto rows = bdris::run_experiment(spec);
      bdris::write_csv(spec.output_path, rows);
      if (!quiet)
        std::printf("wrote %zu rows to %s\n", rows.size(), spec.output_path.c_str());
      return 0;
    }

    if (app.got_subcommand(compare)) {
      bdris::ExperimentSpec spec = load_spec(config_path);
      if (seed_set) spec.base.seed = seed;
      if (trials > 0) spec.trials = trials;
      if (threads > 0) spec.threads = threads;
      spec.architectures.clear();
      std::istringstream is(arch_list);
      std::string name;
      while (std::getline(is, name, ','))
        spec.architectures.push_back(bdris::parse_architecture(name));
      spec.axis = bdris::SweepAxis::PowerDbm;
      spec.values = {bdris::mw_to_dbm(spec.base.transmit_power_mw)};
      const auto rows = bdris::run_experiment(spec);
      if (!quiet) {
        std::printf("%-20s %12s %12s %8s %8s\n", "architecture", "mean_rate", "std_rate",
                    "links", "fail");
        for (const auto& row : rows)
          std::printf("%-20s %12.6f %12.6f %8.1f %8d\n", row.architecture.c_str(),
                      row.mean_sum_rate, row.std_sum_rate, row.mean_activated_links,
                      row.failures);
      }
      if (!out_path.empty()) bdris::write_csv(out_path, rows);
      return 0;
    }

    if (app.got_subcommand(validate)) {
      const int failures = bdris::run_self_tests(seed_set ? seed : 20240901ULL, !quiet);
      return failures == 0 ? 0 : 2;
    }
  } catch (const bdris::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
