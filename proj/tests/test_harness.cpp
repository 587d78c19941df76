#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "bdris/harness.hpp"

using namespace bdris;
using Catch::Approx;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.base.num_cells = 4;
  spec.base.grid_rows = 2;
  spec.base.grid_cols = 2;
  spec.base.num_groups = 2;
  spec.base.num_bs_antennas = 2;
  spec.base.num_users = 2;
  spec.base.num_reflective = 1;
  spec.base.seed = 42;
  spec.axis = SweepAxis::PowerDbm;
  spec.values = {30.0};
  spec.architectures = {Architecture::CwSc, Architecture::CwDgc};
  spec.trials = 3;
  spec.threads = 1;
  return spec;
}

}  // namespace

TEST_CASE("run_experiment output is deterministic and thread-invariant") {
  ExperimentSpec spec = small_spec();
  const auto once = run_experiment(spec);
  const auto twice = run_experiment(spec);
  CHECK(csv_string(once) == csv_string(twice));

  spec.threads = 2;
  const auto parallel = run_experiment(spec);
  CHECK(csv_string(once) == csv_string(parallel));

  REQUIRE(once.size() == 2);  // |architectures| x |values|
  for (const auto& row : once) {
    CHECK(row.failures == 0);
    CHECK(row.mean_sum_rate >= 0.0);
    CHECK(row.std_sum_rate >= 0.0);
    CHECK(row.trials == 3);
  }
}

TEST_CASE("mean sum-rate grows with transmit power") {
  ExperimentSpec spec = small_spec();
  spec.base.num_cells = 8;
  spec.base.grid_rows = 2;
  spec.base.grid_cols = 4;
  spec.base.num_bs_antennas = 3;
  spec.base.num_users = 3;
  spec.values = {28.0, 38.0};
  spec.architectures = {Architecture::CwSc, Architecture::CwFc};
  spec.trials = 6;
  spec.threads = 2;
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 4);
  for (const auto arch : {std::string("cw-sc"), std::string("cw-fc")}) {
    double low = -1.0, high = -1.0;
    for (const auto& row : rows) {
      if (row.architecture != arch) continue;
      (row.sweep_value == 28.0 ? low : high) = row.mean_sum_rate;
    }
    CHECK(high > low);
  }
}

TEST_CASE("fully-connected beats single-connected on average") {
  ExperimentSpec spec = small_spec();
  spec.base.num_cells = 16;
  spec.base.grid_rows = 4;
  spec.base.grid_cols = 4;
  spec.base.num_groups = 4;
  spec.base.num_bs_antennas = 4;
  spec.base.num_users = 4;
  spec.base.num_reflective = 2;
  spec.values = {38.0};
  spec.architectures = {Architecture::CwSc, Architecture::CwFc};
  spec.trials = 8;
  spec.threads = 2;
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 2);
  double sc = 0.0, fc = 0.0;
  for (const auto& row : rows)
    (row.architecture == "cw-sc" ? sc : fc) = row.mean_sum_rate;
  CHECK(fc > sc);
}

TEST_CASE("per-trial failures are counted without aborting the sweep") {
  ExperimentSpec spec = small_spec();
  spec.axis = SweepAxis::NumGroups;
  spec.values = {2.0, 64.0};  // 64 groups > 4 cells: every trial fails
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    if (row.sweep_value == 64.0) {
      CHECK(row.failures == spec.trials);
      CHECK(row.mean_sum_rate == 0.0);
    } else {
      CHECK(row.failures == 0);
    }
  }
}

TEST_CASE("csv schema") {
  const std::string header = csv_header();
  CHECK(header ==
        "architecture,sweep_param,sweep_value,trials,failures,mean_sum_rate,"
        "std_sum_rate,mean_outer_iterations,mean_activated_links,"
        "mean_approx_gap,seed");
  ExperimentRow row;
  row.architecture = "cw-dgc";
  row.sweep_param = "power_dbm";
  row.sweep_value = 38.0;
  row.trials = 2;
  row.mean_sum_rate = 1.0 / 3.0;
  row.seed = 7;
  const std::string text = csv_string({row});
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("cw-dgc,power_dbm,38,2,0,"));
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("0.333333333333333"));  // >= 12 digits
}

TEST_CASE("config_for applies the sweep axis") {
  ExperimentSpec spec = small_spec();

  spec.axis = SweepAxis::PowerDbm;
  CHECK(config_for(spec, 38.0).transmit_power_mw == Approx(6309.57344480193).epsilon(1e-12));

  spec.axis = SweepAxis::NumGroups;
  CHECK(config_for(spec, 4.0).num_groups == 4);

  spec.axis = SweepAxis::NumCells;
  const SystemConfig c36 = config_for(spec, 36.0);
  CHECK(c36.num_cells == 36);
  CHECK(c36.grid_rows == 6);
  CHECK(c36.grid_cols == 6);
  const SystemConfig c24 = config_for(spec, 24.0);
  CHECK(c24.grid_rows == 4);
  CHECK(c24.grid_cols == 6);
}

TEST_CASE("config file parsing") {
  SECTION("full experiment spec") {
    std::istringstream is(R"(# desk experiment
[system]
bs_antennas = 4
users = 4
reflective_users = 2
cells = 16
groups = 4
grid_rows = 4
grid_cols = 4
power_dbm = 38
noise_dbm = -80
seed = 9

[experiment]
trials = 5
sweep = power_dbm
values = 28, 33, 38
architectures = cw-sc, cw-dgc
out = results.csv
threads = 2
)");
    const ExperimentSpec spec = parse_experiment_spec(is);
    CHECK(spec.base.num_bs_antennas == 4);
    CHECK(spec.base.num_cells == 16);
    CHECK(spec.base.transmit_power_mw == Approx(6309.57344480193));
    CHECK(spec.base.noise_power_mw == Approx(1e-8));
    CHECK(spec.base.seed == 9);
    CHECK(spec.trials == 5);
    CHECK(spec.values == std::vector<double>{28.0, 33.0, 38.0});
    CHECK(spec.architectures ==
          std::vector<Architecture>{Architecture::CwSc, Architecture::CwDgc});
    CHECK(spec.output_path == "results.csv");
    CHECK(spec.threads == 2);
  }

  SECTION("defaults apply when sections are omitted") {
    std::istringstream is("[system]\nseed = 3\n");
    const ExperimentSpec spec = parse_experiment_spec(is);
    CHECK(spec.base.seed == 3);
    CHECK(spec.base.num_cells == 36);
    CHECK(spec.values.size() == 1);  // single point at the configured power
  }

  SECTION("diagnostics carry line numbers") {
    std::istringstream bad("[system]\nbs_antennas = 4\ncells == 8\n");
    CHECK_THROWS_WITH(parse_experiment_spec(bad),
                      Catch::Matchers::ContainsSubstring("line 3"));

    std::istringstream nonnum("[system]\nbs_antennas = many\n");
    CHECK_THROWS_WITH(parse_experiment_spec(nonnum),
                      Catch::Matchers::ContainsSubstring("line 2"));

    std::istringstream unknown("[system]\nantennas = 4\n");
    CHECK_THROWS_WITH(parse_experiment_spec(unknown),
                      Catch::Matchers::ContainsSubstring("unknown field"));

    std::istringstream dup("[system]\nseed = 1\nseed = 2\n");
    CHECK_THROWS_WITH(parse_experiment_spec(dup),
                      Catch::Matchers::ContainsSubstring("duplicate"));

    std::istringstream stray("users = 4\n");
    CHECK_THROWS_WITH(parse_experiment_spec(stray),
                      Catch::Matchers::ContainsSubstring("section"));

    std::istringstream badarch("[experiment]\narchitectures = cw-xyz\n");
    CHECK_THROWS_AS(parse_experiment_spec(badarch), std::invalid_argument);
  }
}

TEST_CASE("grid_rows_for picks the divisor nearest the square root") {
  CHECK(grid_rows_for(36) == 6);
  CHECK(grid_rows_for(16) == 4);
  CHECK(grid_rows_for(24) == 4);
  CHECK(grid_rows_for(7) == 1);
  CHECK(grid_rows_for(64) == 8);
  CHECK(grid_rows_for(100) == 10);
}

TEST_CASE("architecture names round-trip") {
  for (const auto arch :
       {Architecture::CwSc, Architecture::CwGcHorizontal, Architecture::CwGcVertical,
        Architecture::CwGcInterlaced, Architecture::CwFc, Architecture::CwDgc})
    CHECK(parse_architecture(to_string(arch)) == arch);
  CHECK(parse_architecture("cw-gc") == Architecture::CwGcHorizontal);
  CHECK_THROWS_AS(parse_architecture("bogus"), std::invalid_argument);
}
