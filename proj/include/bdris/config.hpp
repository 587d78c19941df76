#pragma once

// Scenario parameters. All powers and gains are stored in linear milliwatts /
// linear ratios; dB and dBm appear only at the CLI and config-file boundary.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bdris {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// MU-MISO downlink scenario with an M-cell hybrid-mode BD-RIS.
/// Defaults reproduce the desk-scale evaluation setup: 6-antenna BS, 6 users
/// split 3/3 across the surface, 6x6 cell grid, P = 38 dBm, noise -80 dBm,
/// -30 dB reference attenuation at 1 m.
struct SystemConfig {
  int num_bs_antennas = 6;   // N
  int num_users = 6;         // K
  int num_reflective = 3;    // K_r; users 1..K_r sit on the reflective side
  int num_cells = 36;        // M
  int num_groups = 12;       // G
  int grid_rows = 6;
  int grid_cols = 6;

  double transmit_power_mw = 6309.57344480193;  // 38 dBm
  double noise_power_mw = 1e-8;                 // -80 dBm, same for every user
  double ref_gain = 1e-3;                       // zeta_0 = -30 dB
  double ref_distance = 1.0;                    // d_0 [m]
  double dist_bs_ris = 100.0;                   // d_BI [m]
  double dist_ris_user = 10.0;                  // d_IU [m]
  double pathloss_exp_bi = 2.2;                 // BS-RIS exponent
  double pathloss_exp_iu = 2.2;                 // RIS-user exponent
  double rician_factor = 2.0;                   // kappa, linear

  std::uint64_t seed = 1;

  int num_transmissive() const { return num_users - num_reflective; }

  /// Per-user noise vector (the model uses one sigma_k^2 for all users).
  Eigen::VectorXd noise_vector() const {
    return Eigen::VectorXd::Constant(num_users, noise_power_mw);
  }

  void validate() const {
    auto require = [](bool ok, const std::string& what) {
      if (!ok) throw std::invalid_argument("SystemConfig: " + what);
    };
    require(num_bs_antennas >= 1, "num_bs_antennas must be positive");
    require(num_users >= 1, "num_users must be positive");
    require(num_reflective >= 0 && num_reflective <= num_users,
            "num_reflective must lie in [0, num_users]");
    require(num_cells >= 1, "num_cells must be positive");
    require(num_groups >= 1 && num_groups <= num_cells,
            "num_groups must lie in [1, num_cells]");
    require(grid_rows >= 1 && grid_cols >= 1, "grid dimensions must be positive");
    require(grid_rows * grid_cols == num_cells,
            "grid_rows * grid_cols must equal num_cells");
    require(transmit_power_mw > 0, "transmit_power_mw must be positive");
    require(noise_power_mw > 0, "noise_power_mw must be positive");
    require(ref_gain > 0, "ref_gain must be positive");
    require(ref_distance > 0, "ref_distance must be positive");
    require(dist_bs_ris > 0, "dist_bs_ris must be positive");
    require(dist_ris_user > 0, "dist_ris_user must be positive");
    require(pathloss_exp_bi > 0, "pathloss_exp_bi must be positive");
    require(pathloss_exp_iu > 0, "pathloss_exp_iu must be positive");
    require(rician_factor >= 0, "rician_factor must be nonnegative");
  }
};

}  // namespace bdris
