#pragma once

// Channel realizations: Rician BS-RIS link, Rayleigh RIS-user links,
// distance-dependent pathloss. Everything is a pure function of
// (config, trial_index); regeneration is bit-identical.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "bdris/config.hpp"
#include "bdris/rng.hpp"

namespace bdris {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class UserSide { Reflective, Transmissive };

/// One channel realization: M x N BS-RIS matrix, K RIS-user M-vectors, and
/// the side of the surface each user sits on.
struct ChannelSet {
  CMat bs_ris;                      // G, M x N
  std::vector<CVec> ris_user;       // h_k, each M
  std::vector<UserSide> user_side;  // indices 0..K_r-1 reflective, rest transmissive
};

/// Distance-dependent large-scale gain zeta0 * (d/d0)^(-eps), linear.
inline double pathloss(double distance, double exponent, double ref_gain,
                       double ref_distance) {
  if (distance <= 0.0) throw std::invalid_argument("pathloss: distance must be positive");
  if (ref_distance <= 0.0) throw std::invalid_argument("pathloss: ref_distance must be positive");
  if (ref_gain <= 0.0) throw std::invalid_argument("pathloss: ref_gain must be positive");
  return ref_gain * std::pow(distance / ref_distance, -exponent);
}

namespace detail {

// Half-wavelength ULA steering vector, unit-modulus entries.
inline CVec steering(int len, double angle) {
  constexpr double pi = 3.141592653589793238462643383279;
  CVec a(len);
  const double s = std::sin(angle);
  for (int m = 0; m < len; ++m)
    a(m) = std::polar(1.0, pi * static_cast<double>(m) * s);
  return a;
}

}  // namespace detail

/// Rician fading draw with per-entry second moment `gain`:
///   sqrt(gain) * ( sqrt(kappa/(1+kappa)) H_los + sqrt(1/(1+kappa)) H_nlos ).
/// H_los is a rank-one ULA outer product a_r(theta) a_t(psi)^H with angles
/// drawn uniformly from [0, 2pi); H_nlos entries are i.i.d. CN(0,1), drawn
/// row-major.
inline CMat draw_rician(int rows, int cols, double kappa, double gain, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("draw_rician: empty shape");
  if (kappa < 0.0) throw std::invalid_argument("draw_rician: kappa must be nonnegative");
  if (gain <= 0.0) throw std::invalid_argument("draw_rician: gain must be positive");

  constexpr double two_pi = 6.283185307179586476925286766559;
  const double theta = two_pi * rng.uniform01();
  const double psi = two_pi * rng.uniform01();
  const CMat los = detail::steering(rows, theta) * detail::steering(cols, psi).adjoint();

  CMat nlos(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) nlos(r, c) = rng.complex_gaussian();

  const double w_los = std::sqrt(kappa / (1.0 + kappa));
  const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));
  return std::sqrt(gain) * (w_los * los + w_nlos * nlos);
}

/// Rayleigh draw: i.i.d. CN(0, gain) entries.
inline CVec draw_rayleigh(int len, double gain, Rng& rng) {
  if (len < 1) throw std::invalid_argument("draw_rayleigh: empty shape");
  if (gain <= 0.0) throw std::invalid_argument("draw_rayleigh: gain must be positive");
  const double scale = std::sqrt(gain);
  CVec v(len);
  for (int i = 0; i < len; ++i) v(i) = scale * rng.complex_gaussian();
  return v;
}

/// One reproducible realization for a trial. The stream is seeded from
/// (config.seed, trial_index); draw order is fixed (BS-RIS matrix first, then
/// user vectors in user order).
inline ChannelSet generate_channels(const SystemConfig& config,
                                    std::uint64_t trial_index) {
  config.validate();
  Rng rng(derive_seed(config.seed, {kStreamChannel, trial_index}));

  const double gain_bi = pathloss(config.dist_bs_ris, config.pathloss_exp_bi,
                                  config.ref_gain, config.ref_distance);
  const double gain_iu = pathloss(config.dist_ris_user, config.pathloss_exp_iu,
                                  config.ref_gain, config.ref_distance);

  ChannelSet out;
  out.bs_ris = draw_rician(config.num_cells, config.num_bs_antennas,
                           config.rician_factor, gain_bi, rng);
  out.ris_user.reserve(config.num_users);
  out.user_side.reserve(config.num_users);
  for (int k = 0; k < config.num_users; ++k) {
    out.ris_user.push_back(draw_rayleigh(config.num_cells, gain_iu, rng));
    out.user_side.push_back(k < config.num_reflective ? UserSide::Reflective
                                                      : UserSide::Transmissive);
  }
  return out;
}

}  // namespace bdris
