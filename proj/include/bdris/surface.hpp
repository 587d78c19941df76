#pragma once

// BD-RIS scattering sub-matrices (Phi_t, Phi_r) under a dynamic grouping.
// The pair is permuted block-diagonal: entries coupling cells of different
// groups are structurally zero, and per group g the stacked block
// [Phi_t,Dg; Phi_r,Dg] has orthonormal columns (the hybrid-mode energy
// constraint). Storage is dense M x M; structural zeros are written exactly.

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bdris/channel.hpp"
#include "bdris/grouping.hpp"
#include "bdris/rng.hpp"

namespace bdris {

struct BdRisPair {
  CMat phi_t;         // M x M
  CMat phi_r;         // M x M
  Grouping grouping;  // zero pattern owner

  int num_cells() const { return static_cast<int>(phi_t.rows()); }
};

/// Diagonal initialization: every diagonal entry of Phi_t and Phi_r has
/// modulus 1/sqrt(2) and an independent uniform phase, so each cell splits
/// its energy evenly and Eq. (4) holds for any grouping. Draw order: the
/// transmissive phase then the reflective phase, cell by cell.
inline BdRisPair init_diagonal(int num_cells, Grouping grouping, Rng& rng) {
  if (num_cells != grouping.num_cells())
    throw std::invalid_argument("init_diagonal: grouping size mismatch");
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double mag = 1.0 / std::sqrt(2.0);
  CMat phi_t = CMat::Zero(num_cells, num_cells);
  CMat phi_r = CMat::Zero(num_cells, num_cells);
  for (int m = 0; m < num_cells; ++m) {
    phi_t(m, m) = std::polar(mag, two_pi * rng.uniform01());
    phi_r(m, m) = std::polar(mag, two_pi * rng.uniform01());
  }
  return BdRisPair{std::move(phi_t), std::move(phi_r), std::move(grouping)};
}

/// Structure check outcome: largest magnitude found outside the block
/// pattern (must be exactly zero), per-group unitary-sum residuals
/// ||Phi_t,Dg^H Phi_t,Dg + Phi_r,Dg^H Phi_r,Dg - I||_F, and the global
/// residual ||Phi_r^H Phi_r + Phi_t^H Phi_t - I_M||_F.
struct StructureReport {
  double max_off_pattern_t = 0.0;
  double max_off_pattern_r = 0.0;
  std::vector<double> group_residuals;
  double global_residual = 0.0;

  double worst_group_residual() const {
    double w = 0.0;
    for (double r : group_residuals) w = std::max(w, r);
    return w;
  }
  bool ok(double unitary_tol) const {
    return max_off_pattern_t == 0.0 && max_off_pattern_r == 0.0 &&
           worst_group_residual() <= unitary_tol;
  }
};

inline std::pair<CMat, CMat> extract_block(const BdRisPair& pair, int g) {
  const auto& idx = pair.grouping.cells(g);
  return {pair.phi_t(idx, idx), pair.phi_r(idx, idx)};
}

/// Stacked 2n x n block [Phi_t,Dg; Phi_r,Dg], the per-group optimization
/// variable.
inline CMat extract_stacked_block(const BdRisPair& pair, int g) {
  const auto& idx = pair.grouping.cells(g);
  const int n = static_cast<int>(idx.size());
  CMat stacked(2 * n, n);
  stacked.topRows(n) = pair.phi_t(idx, idx);
  stacked.bottomRows(n) = pair.phi_r(idx, idx);
  return stacked;
}

inline StructureReport validate_structure(const BdRisPair& pair) {
  const int M = pair.num_cells();
  StructureReport report;

  for (int r = 0; r < M; ++r) {
    const int gr = pair.grouping.group_of(r);
    for (int c = 0; c < M; ++c) {
      if (pair.grouping.group_of(c) == gr) continue;
      report.max_off_pattern_t = std::max(report.max_off_pattern_t, std::abs(pair.phi_t(r, c)));
      report.max_off_pattern_r = std::max(report.max_off_pattern_r, std::abs(pair.phi_r(r, c)));
    }
  }

  for (int g = 0; g < pair.grouping.num_groups(); ++g) {
    const auto [bt, br] = extract_block(pair, g);
    const int n = static_cast<int>(bt.rows());
    const CMat residual =
        bt.adjoint() * bt + br.adjoint() * br - CMat::Identity(n, n);
    report.group_residuals.push_back(residual.norm());
  }

  const CMat global = pair.phi_r.adjoint() * pair.phi_r +
                      pair.phi_t.adjoint() * pair.phi_t - CMat::Identity(M, M);
  report.global_residual = global.norm();
  return report;
}

/// Rebuild the full pair from per-group (Phi_t,Dg, Phi_r,Dg) blocks; every
/// entry outside the block pattern is exactly zero.
inline BdRisPair restore(const std::vector<std::pair<CMat, CMat>>& blocks,
                         Grouping grouping) {
  if (static_cast<int>(blocks.size()) != grouping.num_groups())
    throw std::invalid_argument("restore: block count must match group count");
  const int M = grouping.num_cells();
  CMat phi_t = CMat::Zero(M, M);
  CMat phi_r = CMat::Zero(M, M);
  for (int g = 0; g < grouping.num_groups(); ++g) {
    const auto& idx = grouping.cells(g);
    const int n = static_cast<int>(idx.size());
    const auto& [bt, br] = blocks[g];
    if (bt.rows() != n || bt.cols() != n || br.rows() != n || br.cols() != n)
      throw std::invalid_argument("restore: block dimension mismatch for group " +
                                  std::to_string(g + 1));
    phi_t(idx, idx) = bt;
    phi_r(idx, idx) = br;
  }
  return BdRisPair{std::move(phi_t), std::move(phi_r), std::move(grouping)};
}

/// Split a stacked 2n x n block into its transmissive (top) and reflective
/// (bottom) halves.
inline std::pair<CMat, CMat> split_stacked(const CMat& stacked) {
  const int n = static_cast<int>(stacked.cols());
  if (stacked.rows() != 2 * n)
    throw std::invalid_argument("split_stacked: expected a 2n x n block");
  return {stacked.topRows(n), stacked.bottomRows(n)};
}

inline BdRisPair restore_stacked(const std::vector<CMat>& stacked_blocks,
                                 Grouping grouping) {
  std::vector<std::pair<CMat, CMat>> blocks;
  blocks.reserve(stacked_blocks.size());
  for (const auto& s : stacked_blocks) blocks.push_back(split_stacked(s));
  return restore(blocks, std::move(grouping));
}

/// Effective BS-to-user channel h~_k = (h_k^H Phi_i G)^H; Phi_r serves
/// reflective users, Phi_t transmissive ones.
inline CVec effective_channel(const BdRisPair& pair, const CVec& h_k,
                              const CMat& bs_ris, UserSide side) {
  if (h_k.size() != pair.num_cells() || bs_ris.rows() != pair.num_cells())
    throw std::invalid_argument("effective_channel: dimension mismatch");
  const CMat& phi = (side == UserSide::Reflective) ? pair.phi_r : pair.phi_t;
  return bs_ris.adjoint() * (phi.adjoint() * h_k);
}

/// Switched-on impedance connections for a grouping: sum_g n_g (2 n_g + 1).
inline long long activated_links(const Grouping& grouping) {
  long long total = 0;
  for (int g = 0; g < grouping.num_groups(); ++g) {
    const long long n = grouping.size_of(g);
    total += n * (2 * n + 1);
  }
  return total;
}

/// Full impedance-switch network cost for an M-cell surface:
/// M(2M+1) impedance components and 2M(M-1) switches.
struct HardwareCost {
  long long impedance_count;
  long long switch_count;
};

inline HardwareCost hardware_cost(long long num_cells) {
  if (num_cells < 1) throw std::invalid_argument("hardware_cost: M must be positive");
  return {num_cells * (2 * num_cells + 1), 2 * num_cells * (num_cells - 1)};
}

}  // namespace bdris
