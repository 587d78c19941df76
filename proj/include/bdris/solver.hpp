#pragma once

// Sum-rate maximization pipeline for the dynamically group-connected BD-RIS
// aided MU-MISO downlink:
//
//   * fractional-programming surrogate with auxiliary variables (iota, tau)
//     and closed-form block updates for iota, tau and the precoder W;
//   * decomposition of the Phi-dependent objective into matrices
//     X_t/r, Y, Z_t/r;
//   * greedy per-cell regrouping sweep (one pass of Steps 1-4);
//   * per-group Stiefel solves and block restoration (Algorithm 1);
//   * the outer alternating loop over architectures (CW-SC / CW-GC / CW-FC /
//     CW-DGC).
//
// The surrogate equals sum_k log2(1+iota_k) plus the quadratic-transform
// terms scaled by 1/ln2. That makes it exactly tight: at the closed-form
// auxiliaries it reproduces the true sum-rate in bits/s/Hz. The
// approximation that drops cross-group coupling is used only inside the
// grouping sweep and the block solves; every reported rate and the outer
// convergence test use the exact SINR expression.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/grouping.hpp"
#include "bdris/manifold.hpp"
#include "bdris/rng.hpp"
#include "bdris/surface.hpp"

namespace bdris {

inline constexpr double kLn2 = 0.69314718055994530941723212145818;

enum class Architecture {
  CwSc,
  CwGcHorizontal,
  CwGcVertical,
  CwGcInterlaced,
  CwFc,
  CwDgc,
};

inline const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::CwSc: return "cw-sc";
    case Architecture::CwGcHorizontal: return "cw-gc-horizontal";
    case Architecture::CwGcVertical: return "cw-gc-vertical";
    case Architecture::CwGcInterlaced: return "cw-gc-interlaced";
    case Architecture::CwFc: return "cw-fc";
    case Architecture::CwDgc: return "cw-dgc";
  }
  return "?";
}

inline Architecture parse_architecture(const std::string& name) {
  if (name == "cw-sc") return Architecture::CwSc;
  if (name == "cw-gc-horizontal" || name == "cw-gc") return Architecture::CwGcHorizontal;
  if (name == "cw-gc-vertical") return Architecture::CwGcVertical;
  if (name == "cw-gc-interlaced") return Architecture::CwGcInterlaced;
  if (name == "cw-fc") return Architecture::CwFc;
  if (name == "cw-dgc") return Architecture::CwDgc;
  throw std::invalid_argument("unknown architecture '" + name + "'");
}

/// Fractional-programming state: auxiliaries iota (>= 0) and tau, plus the
/// precoder. tilde_tau is derived, never stored: sqrt(1+iota_k) tau_k.
struct FpState {
  Eigen::VectorXd iota;      // K
  Eigen::VectorXcd tau;      // K
  CMat precoder;             // N x K

  Eigen::VectorXcd tilde_tau() const {
    return (1.0 + iota.array()).sqrt() * tau.array();
  }
};

/// Matrices of the Phi-objective decomposition: Y = sum_p g_p g_p^H with
/// g_p = G w_p; Z_i = sum_{k in K_i} |tau_k|^2 h_k h_k^H;
/// X_i = sum_{k in K_i} g_k h_k^H conj(tilde_tau_k).
struct DecompositionMatrices {
  CMat x_t, x_r;             // M x M
  CMat y;                    // M x M Hermitian PSD
  CMat z_t, z_r;             // M x M Hermitian PSD
  std::vector<CVec> g_vecs;  // K vectors of length M
};

inline std::vector<CVec> effective_channels(const ChannelSet& channels,
                                            const BdRisPair& pair) {
  std::vector<CVec> h_eff;
  h_eff.reserve(channels.ris_user.size());
  for (std::size_t k = 0; k < channels.ris_user.size(); ++k)
    h_eff.push_back(effective_channel(pair, channels.ris_user[k],
                                      channels.bs_ris, channels.user_side[k]));
  return h_eff;
}

namespace detail {

inline void check_state(const ChannelSet& channels, const CMat& precoder) {
  const auto K = static_cast<Eigen::Index>(channels.ris_user.size());
  if (precoder.cols() != K || precoder.rows() != channels.bs_ris.cols())
    throw std::invalid_argument("solver: precoder shape does not match channels");
}

// Per-user |h~_k^H w_p|^2 row and the desired-signal term.
inline void link_powers(const std::vector<CVec>& h_eff, const CMat& precoder,
                        int k, double& signal, double& total) {
  const CVec row = precoder.adjoint() * h_eff[k];  // entries conj(h^H w_p)
  total = row.squaredNorm();
  signal = std::norm(row(k));
}

}  // namespace detail

/// Exact sum-rate (bits/s/Hz): sum_k log2(1 + SINR_k).
inline double sum_rate(const ChannelSet& channels, const BdRisPair& pair,
                       const CMat& precoder, const Eigen::VectorXd& noise_powers) {
  detail::check_state(channels, precoder);
  const auto h_eff = effective_channels(channels, pair);
  double rate = 0.0;
  for (std::size_t k = 0; k < h_eff.size(); ++k) {
    double signal = 0.0, total = 0.0;
    detail::link_powers(h_eff, precoder, static_cast<int>(k), signal, total);
    const double interference = std::max(total - signal, 0.0);
    rate += std::log2(1.0 + signal / (interference + noise_powers(k)));
  }
  return rate;
}

/// FP surrogate in bits/s/Hz (exact, no cross-group approximation):
/// sum_k [ log2(1+iota_k) + ( -iota_k + 2 Re{conj(tt_k) h~_k^H w_k}
///         - sum_p |tau_k|^2 |h~_k^H w_p|^2 - |tau_k|^2 sigma_k^2 ) / ln 2 ].
inline double surrogate_objective(const ChannelSet& channels, const BdRisPair& pair,
                                  const FpState& state,
                                  const Eigen::VectorXd& noise_powers) {
  detail::check_state(channels, state.precoder);
  const auto h_eff = effective_channels(channels, pair);
  const Eigen::VectorXcd tt = state.tilde_tau();
  double value = 0.0;
  for (std::size_t k = 0; k < h_eff.size(); ++k) {
    const CVec row = state.precoder.adjoint() * h_eff[k];
    const std::complex<double> desired = std::conj(row(static_cast<int>(k)));
    const double tau_sq = std::norm(state.tau(k));
    value += std::log2(1.0 + state.iota(k));
    value += (-state.iota(k) + 2.0 * std::real(std::conj(tt(k)) * desired) -
              tau_sq * row.squaredNorm() - tau_sq * noise_powers(k)) /
             kLn2;
  }
  return value;
}

/// Closed-form iota update: iota_k = SINR_k. Together with the tau update
/// this is the joint maximizer of the surrogate over (iota, tau), at which
/// the surrogate equals the exact sum-rate.
inline Eigen::VectorXd update_iota(const ChannelSet& channels, const BdRisPair& pair,
                                   const FpState& state,
                                   const Eigen::VectorXd& noise_powers) {
  detail::check_state(channels, state.precoder);
  const auto h_eff = effective_channels(channels, pair);
  Eigen::VectorXd iota(h_eff.size());
  for (std::size_t k = 0; k < h_eff.size(); ++k) {
    double signal = 0.0, total = 0.0;
    detail::link_powers(h_eff, state.precoder, static_cast<int>(k), signal, total);
    iota(k) = signal / (std::max(total - signal, 0.0) + noise_powers(k));
  }
  return iota;
}

/// Closed-form tau update (quadratic transform):
/// tau_k = sqrt(1+iota_k) h~_k^H w_k / (sum_p |h~_k^H w_p|^2 + sigma_k^2).
inline Eigen::VectorXcd update_tau(const ChannelSet& channels, const BdRisPair& pair,
                                   const FpState& state,
                                   const Eigen::VectorXd& noise_powers) {
  detail::check_state(channels, state.precoder);
  const auto h_eff = effective_channels(channels, pair);
  Eigen::VectorXcd tau(h_eff.size());
  for (std::size_t k = 0; k < h_eff.size(); ++k) {
    const CVec row = state.precoder.adjoint() * h_eff[k];
    const std::complex<double> desired = std::conj(row(static_cast<int>(k)));
    tau(k) = std::sqrt(1.0 + state.iota(k)) * desired /
             (row.squaredNorm() + noise_powers(k));
  }
  return tau;
}

/// Closed-form precoder update under the total power constraint:
/// w_k = tt_k (A + mu I)^{-1} h~_k with A = sum_p |tau_p|^2 h~_p h~_p^H and
/// mu >= 0 the smallest multiplier with ||W||_F^2 <= P. mu = 0 uses the
/// pseudo-inverse solution when feasible; otherwise mu comes from bisection
/// on the eigenvalue form (||W(mu)||_F^2 is strictly decreasing), stopping at
/// | ||W||_F^2 - P | <= 1e-8 P.
inline CMat update_precoder(const ChannelSet& channels, const BdRisPair& pair,
                            const FpState& state, double power_budget) {
  detail::check_state(channels, state.precoder);
  if (power_budget <= 0.0)
    throw std::invalid_argument("update_precoder: power budget must be positive");
  const auto h_eff = effective_channels(channels, pair);
  const int N = static_cast<int>(channels.bs_ris.cols());
  const int K = static_cast<int>(h_eff.size());
  const Eigen::VectorXcd tt = state.tilde_tau();

  CMat a = CMat::Zero(N, N);
  for (int p = 0; p < K; ++p)
    a.noalias() += std::norm(state.tau(p)) * h_eff[p] * h_eff[p].adjoint();
  a = 0.5 * (a + a.adjoint());  // bound Hermitian round-off drift

  Eigen::SelfAdjointEigenSolver<CMat> eig(a);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const CMat& u = eig.eigenvectors();
  const double lambda_max = lambda.maxCoeff();

  // Spectral coefficients: |u_i^H h~_k|^2 |tt_k|^2.
  Eigen::MatrixXd coeff(N, K);
  CMat proj(N, K);  // u^H h~_k, reused to rebuild W
  for (int k = 0; k < K; ++k) {
    proj.col(k) = u.adjoint() * h_eff[k];
    coeff.col(k) = std::norm(tt(k)) * proj.col(k).cwiseAbs2();
  }

  const auto norm_sq = [&](double mu) {
    double s = 0.0;
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < N; ++i) {
        const double d = lambda(i) + mu;
        s += coeff(i, k) / (d * d);
      }
    return s;
  };
  const auto build = [&](double mu, bool drop_null) {
    CMat w(N, K);
    for (int k = 0; k < K; ++k) {
      CVec scaled(N);
      for (int i = 0; i < N; ++i) {
        const double d = lambda(i) + mu;
        const bool null_mode = drop_null && lambda(i) <= 1e-12 * std::max(lambda_max, 1e-300);
        scaled(i) = null_mode ? std::complex<double>(0.0) : proj(i, k) / d;
      }
      w.col(k) = tt(k) * (u * scaled);
    }
    return w;
  };

  // Feasibility of the pseudo-inverse solution (mu = 0, null modes dropped;
  // their coefficients vanish whenever tt_k != 0, see the range argument in
  // the tests).
  {
    double s = 0.0;
    bool infinite = false;
    for (int i = 0; i < N && !infinite; ++i) {
      if (lambda(i) <= 1e-12 * std::max(lambda_max, 1e-300)) {
        for (int k = 0; k < K; ++k)
          if (coeff(i, k) > 1e-28 * std::max(1.0, coeff.maxCoeff())) infinite = true;
        continue;
      }
      for (int k = 0; k < K; ++k) s += coeff(i, k) / (lambda(i) * lambda(i));
    }
    if (!infinite && s <= power_budget) return build(0.0, true);
  }

  // Bracket then bisect.
  double hi = std::max(lambda_max, 1e-9);
  int doublings = 0;
  while (norm_sq(hi) > power_budget) {
    hi *= 2.0;
    if (++doublings > 200)
      throw std::runtime_error(
          "update_precoder: failed to bracket the power multiplier after 200 "
          "doublings (||W(hi)||^2 = " + std::to_string(norm_sq(hi)) + ")");
  }
  double lo = 0.0;
  double mu = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = norm_sq(mid);
    if (s <= power_budget) {
      mu = mid;  // keep the feasible side so ||W||^2 <= P always holds
      if (power_budget - s <= 1e-8 * power_budget) break;
    }
    (s > power_budget ? lo : hi) = mid;
  }
  return build(mu, false);
}

/// Decomposition of the Phi-dependent surrogate terms (computed once per
/// Algorithm-1 invocation).
inline DecompositionMatrices compute_decomposition(const ChannelSet& channels,
                                                   const FpState& state) {
  detail::check_state(channels, state.precoder);
  const int M = static_cast<int>(channels.bs_ris.rows());
  const int K = static_cast<int>(channels.ris_user.size());
  const Eigen::VectorXcd tt = state.tilde_tau();

  DecompositionMatrices d;
  d.x_t = CMat::Zero(M, M);
  d.x_r = CMat::Zero(M, M);
  d.y = CMat::Zero(M, M);
  d.z_t = CMat::Zero(M, M);
  d.z_r = CMat::Zero(M, M);
  d.g_vecs.reserve(K);

  for (int k = 0; k < K; ++k) {
    d.g_vecs.push_back(channels.bs_ris * state.precoder.col(k));
    d.y.noalias() += d.g_vecs[k] * d.g_vecs[k].adjoint();
    const bool reflective = channels.user_side[k] == UserSide::Reflective;
    CMat& z = reflective ? d.z_r : d.z_t;
    CMat& x = reflective ? d.x_r : d.x_t;
    z.noalias() += std::norm(state.tau(k)) *
                   (channels.ris_user[k] * channels.ris_user[k].adjoint());
    x.noalias() += std::conj(tt(k)) * (d.g_vecs[k] * channels.ris_user[k].adjoint());
  }
  d.y = 0.5 * (d.y + d.y.adjoint());
  d.z_t = 0.5 * (d.z_t + d.z_t.adjoint());
  d.z_r = 0.5 * (d.z_r + d.z_r.adjoint());
  return d;
}

namespace detail {

inline double re_trace_quad(const CMat& phi, const CMat& y, const CMat& z) {
  // Re Tr(phi y phi^H z) = Re <z phi, phi y>
  return ((z * phi).conjugate().cwiseProduct(phi * y)).sum().real();
}

inline double re_trace_lin(const CMat& phi, const CMat& x) {
  return (x * phi).trace().real();
}

}  // namespace detail

/// Group objective f on an arbitrary cell index set (ascending), evaluated
/// on re-indexed entries of the full Phi matrices.
inline double group_objective_cells(const DecompositionMatrices& d,
                                    const CMat& phi_t, const CMat& phi_r,
                                    const std::vector<int>& cells) {
  const CMat pt = phi_t(cells, cells);
  const CMat pr = phi_r(cells, cells);
  const CMat y = d.y(cells, cells);
  return detail::re_trace_quad(pt, y, d.z_t(cells, cells)) +
         detail::re_trace_quad(pr, y, d.z_r(cells, cells)) -
         2.0 * detail::re_trace_lin(pt, d.x_t(cells, cells)) -
         2.0 * detail::re_trace_lin(pr, d.x_r(cells, cells));
}

/// f_g for group g of the pair's grouping (within-group sub-matrices only;
/// cross-group coupling is dropped).
inline double group_objective(const DecompositionMatrices& d, const BdRisPair& pair,
                              const Grouping& grouping, int g) {
  return group_objective_cells(d, pair.phi_t, pair.phi_r, grouping.cells(g));
}

/// sum_g f_g, the approximate minimization objective driving the grouping
/// sweep and the block solves.
inline double grouping_objective(const DecompositionMatrices& d, const BdRisPair& pair,
                                 const Grouping& grouping) {
  double total = 0.0;
  for (int g = 0; g < grouping.num_groups(); ++g)
    total += group_objective(d, pair, grouping, g);
  return total;
}

/// Exact full-matrix objective
/// sum_i [ Tr(Phi_i Y Phi_i^H Z_i) - 2 Re Tr(Phi_i X_i) ].
inline double decomposition_objective(const DecompositionMatrices& d,
                                      const BdRisPair& pair) {
  return detail::re_trace_quad(pair.phi_t, d.y, d.z_t) +
         detail::re_trace_quad(pair.phi_r, d.y, d.z_r) -
         2.0 * detail::re_trace_lin(pair.phi_t, d.x_t) -
         2.0 * detail::re_trace_lin(pair.phi_r, d.x_r);
}

namespace detail {

// Cross-group quadratic coupling dropped by the grouping approximation:
// sum_i sum_g sum_{p != g} Re Tr(Phi_i,Dg Y_{Dg,Dp} Phi_i,Dp^H Z_i,{Dp,Dg}).
inline double cross_group_terms(const DecompositionMatrices& d, const BdRisPair& pair,
                                const Grouping& grouping) {
  double total = 0.0;
  for (int g = 0; g < grouping.num_groups(); ++g) {
    const auto& dg = grouping.cells(g);
    for (int p = 0; p < grouping.num_groups(); ++p) {
      if (p == g) continue;
      const auto& dp = grouping.cells(p);
      const CMat y_gp = d.y(dg, dp);
      for (const bool reflective : {false, true}) {
        const CMat& phi = reflective ? pair.phi_r : pair.phi_t;
        const CMat& z = reflective ? d.z_r : d.z_t;
        total += (phi(dg, dg) * y_gp * phi(dp, dp).adjoint() * z(dp, dg))
                     .trace()
                     .real();
      }
    }
  }
  return total;
}

}  // namespace detail

/// Relative size of the dropped cross-group coupling:
/// |exact - sum_g f_g| / max(|exact|, 1e-30). Diagnostic only; exactly zero
/// for G = 1 or block-diagonal Y.
inline double approximation_gap(const BdRisPair& pair, const DecompositionMatrices& d,
                                const Grouping& grouping) {
  const double approx = grouping_objective(d, pair, grouping);
  const double cross = detail::cross_group_terms(d, pair, grouping);
  const double exact = approx + cross;
  return std::abs(cross) / std::max(std::abs(exact), 1e-30);
}

/// Objective of Step 2 for candidate "cell m to group g" (g == current group
/// of m reproduces sum_p f_p). Entries of the fixed Phi matrices are
/// re-indexed under the candidate subsets.
inline double candidate_objective(const DecompositionMatrices& d, const BdRisPair& pair,
                                  const Grouping& grouping, int m, int g) {
  const int g_tag = grouping.group_of(m);
  double total = 0.0;
  for (int p = 0; p < grouping.num_groups(); ++p) {
    if (g == g_tag || (p != g && p != g_tag)) {
      total += group_objective(d, pair, grouping, p);
      continue;
    }
    std::vector<int> cells = grouping.cells(p);
    if (p == g_tag) cells.erase(std::find(cells.begin(), cells.end(), m));
    if (p == g) cells.insert(std::upper_bound(cells.begin(), cells.end(), m), m);
    total += group_objective_cells(d, pair.phi_t, pair.phi_r, cells);
  }
  return total;
}

/// One greedy sweep over cells m = 1..M (Steps 1-4): skip singleton owners,
/// score every destination on the fixed Phi entries, move to the argmin when
/// it beats staying. Ties keep the cell, then prefer the lowest group index.
/// The sweep never increases sum_g f_g.
inline Grouping grouping_pass(const BdRisPair& pair, const DecompositionMatrices& d,
                              Grouping grouping, int* moves_out = nullptr) {
  const int M = grouping.num_cells();
  const int G = grouping.num_groups();
  std::vector<double> f(G);
  double total = 0.0;
  for (int g = 0; g < G; ++g) {
    f[g] = group_objective(d, pair, grouping, g);
    total += f[g];
  }

  int moves = 0;
  for (int m = 0; m < M; ++m) {
    const int g_tag = grouping.group_of(m);
    if (grouping.size_of(g_tag) <= 1) continue;

    std::vector<int> without = grouping.cells(g_tag);
    without.erase(std::find(without.begin(), without.end(), m));
    const double f_without = group_objective_cells(d, pair.phi_t, pair.phi_r, without);

    int best_g = g_tag;
    double best_total = total;
    double best_f_with = 0.0;
    for (int g = 0; g < G; ++g) {
      if (g == g_tag) continue;
      std::vector<int> with = grouping.cells(g);
      with.insert(std::upper_bound(with.begin(), with.end(), m), m);
      const double f_with = group_objective_cells(d, pair.phi_t, pair.phi_r, with);
      const double cand = total - f[g_tag] - f[g] + f_without + f_with;
      if (cand < best_total) {
        best_total = cand;
        best_g = g;
        best_f_with = f_with;
      }
    }

    if (best_g != g_tag) {
      grouping = grouping.moved(m, g_tag, best_g);
      f[g_tag] = f_without;
      f[best_g] = best_f_with;
      total = best_total;
      ++moves;
    }
  }
  if (moves_out) *moves_out = moves;
  return grouping;
}

struct BlockSolveOutcome {
  std::vector<CMat> stacked_blocks;   // per group, 2n x n orthonormal
  std::vector<int> rcg_iterations;    // I_cg per group
  bool line_search_flag = false;
};

/// Assemble and solve the per-group Stiefel problems, warm-started from the
/// current Phi entries (re-orthonormalized by the polar factor whenever the
/// grouping reshaped a block).
inline BlockSolveOutcome optimize_blocks(const DecompositionMatrices& d,
                                         const Grouping& grouping,
                                         const BdRisPair& warm,
                                         const manifold::RcgOptions& rcg_opts = {}) {
  BlockSolveOutcome out;
  out.stacked_blocks.reserve(grouping.num_groups());
  out.rcg_iterations.reserve(grouping.num_groups());
  for (int g = 0; g < grouping.num_groups(); ++g) {
    const auto& idx = grouping.cells(g);
    const int n = static_cast<int>(idx.size());

    manifold::QuadraticTraceProblem problem;
    problem.X.resize(n, 2 * n);
    problem.X.leftCols(n) = d.x_t(idx, idx);
    problem.X.rightCols(n) = d.x_r(idx, idx);
    problem.Y = d.y(idx, idx);
    problem.Z = CMat::Zero(2 * n, 2 * n);
    problem.Z.topLeftCorner(n, n) = d.z_t(idx, idx);
    problem.Z.bottomRightCorner(n, n) = d.z_r(idx, idx);

    CMat start(2 * n, n);
    start.topRows(n) = warm.phi_t(idx, idx);
    start.bottomRows(n) = warm.phi_r(idx, idx);
    start = manifold::polar_orthonormalize(start);

    auto [point, diag] = manifold::solve_rcg(problem, {std::move(start)}, rcg_opts);
    out.stacked_blocks.push_back(std::move(point.phi));
    out.rcg_iterations.push_back(diag.iterations);
    out.line_search_flag |= diag.line_search_failed;
  }
  return out;
}

struct Algorithm1Options {
  double tol = 1e-6;                 // relative change of sum_g f_g
  int max_iterations = 50;
  bool clear_before_restore = true;  // line 14: zero Phi before restoring
  manifold::RcgOptions rcg;
};

struct Algorithm1Outcome {
  Grouping grouping;
  BdRisPair pair;
  std::vector<double> objective_trajectory;  // sum_g f_g after each cycle
  std::vector<int> rcg_iterations;           // per group, last block pass
  int iterations = 0;
  int total_moves = 0;
  bool reverted_cycle = false;
};

/// Alternating grouping/blocks loop at fixed (iota, tau, W). The
/// decomposition is computed once up front. With dynamic_grouping = false
/// (fixed architectures) a single block pass runs; the same happens when no
/// grouping move is structurally possible (G = 1 or all singletons), which
/// makes CW-DGC coincide with CW-FC / CW-SC operation for operation. A cycle
/// that fails to decrease sum_g f_g is reverted and ends the loop, so the
/// recorded trajectory is non-increasing.
inline Algorithm1Outcome algorithm1(const ChannelSet& channels, const FpState& state,
                                    const Grouping& grouping0, const BdRisPair& pair0,
                                    bool dynamic_grouping,
                                    const Algorithm1Options& opts = {}) {
  const DecompositionMatrices d = compute_decomposition(channels, state);

  Algorithm1Outcome out{grouping0, pair0, {}, {}, 0, 0, false};
  double prev = grouping_objective(d, out.pair, out.grouping);
  out.objective_trajectory.push_back(prev);

  for (int it = 0; it < opts.max_iterations; ++it) {
    Grouping grouping = out.grouping;
    int moves = 0;
    if (dynamic_grouping) grouping = grouping_pass(out.pair, d, grouping, &moves);

    BlockSolveOutcome blocks = optimize_blocks(d, grouping, out.pair, opts.rcg);
    BdRisPair pair = [&] {
      if (opts.clear_before_restore) return restore_stacked(blocks.stacked_blocks, grouping);
      BdRisPair kept = out.pair;  // stale entries persist outside the blocks
      kept.grouping = grouping;
      for (int g = 0; g < grouping.num_groups(); ++g) {
        const auto& idx = grouping.cells(g);
        const auto [bt, br] = split_stacked(blocks.stacked_blocks[g]);
        kept.phi_t(idx, idx) = bt;
        kept.phi_r(idx, idx) = br;
      }
      return kept;
    }();

    const double cur = grouping_objective(d, pair, grouping);
    if (cur > prev + 1e-12 * std::abs(prev) + 1e-15) {
      out.reverted_cycle = true;  // keep the previous (better) state
      break;
    }

    out.grouping = std::move(grouping);
    out.pair = std::move(pair);
    out.rcg_iterations = std::move(blocks.rcg_iterations);
    out.total_moves += moves;
    ++out.iterations;
    out.objective_trajectory.push_back(cur);

    const double change = std::abs(prev - cur);
    prev = cur;
    if (!dynamic_grouping || !out.grouping.can_regroup()) break;
    if (change <= opts.tol * std::max(std::abs(prev), 1e-30)) break;
  }
  return out;
}

struct SolveOptions {
  double outer_tol = 1e-4;  // relative sum-rate change
  int max_outer = 100;
  Algorithm1Options inner;
};

struct SolveResult {
  double sum_rate_bits = 0.0;
  Grouping grouping;
  BdRisPair bdris;
  CMat precoder;
  int outer_iterations = 0;
  std::vector<int> rcg_iterations;  // per group, final block pass
  double approximation_gap = 0.0;
  long long activated_links = 0;
  bool converged = false;
};

/// Zero-forcing precoder on the given effective channels, scaled to the full
/// power budget (minimum-norm pseudo-inverse, so rank deficiency degrades
/// gracefully).
inline CMat zero_forcing_precoder(const std::vector<CVec>& h_eff, double power_budget) {
  const int K = static_cast<int>(h_eff.size());
  const int N = static_cast<int>(h_eff.front().size());
  CMat h(N, K);
  for (int k = 0; k < K; ++k) h.col(k) = h_eff[k];
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(h.adjoint());
  CMat w = cod.pseudoInverse();
  const double norm = w.norm();
  if (norm < 1e-300) return CMat::Zero(N, K);
  return w * (std::sqrt(power_budget) / norm);
}

/// Initial grouping per architecture. The CW-GC layouts drop to balanced
/// chunk sizes when G does not divide M, matching the sizes CW-DGC starts
/// from, so baselines stay comparable across any G.
inline Grouping initial_grouping(const SystemConfig& config, Architecture arch) {
  switch (arch) {
    case Architecture::CwSc: return Grouping::singletons(config.num_cells);
    case Architecture::CwFc: return Grouping::single_group(config.num_cells);
    case Architecture::CwGcHorizontal:
      return Grouping::balanced_strategy(config.grid_rows, config.grid_cols,
                                         config.num_groups, FixedStrategy::Horizontal);
    case Architecture::CwGcVertical:
      return Grouping::balanced_strategy(config.grid_rows, config.grid_cols,
                                         config.num_groups, FixedStrategy::Vertical);
    case Architecture::CwGcInterlaced:
      return Grouping::balanced_strategy(config.grid_rows, config.grid_cols,
                                         config.num_groups, FixedStrategy::Interlaced);
    case Architecture::CwDgc:
      return Grouping::uniform_adjacent(config.num_cells, config.num_groups);
  }
  throw std::invalid_argument("initial_grouping: unknown architecture");
}

/// Full scenario solve: initialize (grouping, diagonal Phi, zero-forcing W),
/// then alternate iota -> tau -> W -> {Phi_t, Phi_r} until the relative
/// sum-rate change drops below outer_tol. CW-DGC runs Algorithm 1 for the
/// Phi block; the fixed architectures run a single block pass. The
/// best-sum-rate iterate is returned; non-convergence is flagged.
inline SolveResult solve_scenario(const SystemConfig& config, const ChannelSet& channels,
                                  Architecture arch, const SolveOptions& opts = {}) {
  config.validate();
  if (static_cast<int>(channels.ris_user.size()) != config.num_users ||
      channels.bs_ris.rows() != config.num_cells ||
      channels.bs_ris.cols() != config.num_bs_antennas)
    throw std::invalid_argument("solve_scenario: channels do not match config");

  const Eigen::VectorXd noise = config.noise_vector();
  const double power = config.transmit_power_mw;
  const bool dynamic = arch == Architecture::CwDgc;

  Grouping grouping = initial_grouping(config, arch);
  Rng phi_rng(derive_seed(config.seed, {kStreamPhiInit}));
  BdRisPair pair = init_diagonal(config.num_cells, grouping, phi_rng);

  FpState state;
  state.iota = Eigen::VectorXd::Zero(config.num_users);
  state.tau = Eigen::VectorXcd::Zero(config.num_users);
  state.precoder = zero_forcing_precoder(effective_channels(channels, pair), power);

  SolveResult best{-1.0, grouping, pair, state.precoder, 0, {}, 0.0, 0, false};
  double prev_rate = sum_rate(channels, pair, state.precoder, noise);

  int outer = 0;
  bool converged = false;
  std::vector<int> last_rcg;
  for (outer = 1; outer <= opts.max_outer; ++outer) {
    state.iota = update_iota(channels, pair, state, noise);
    state.tau = update_tau(channels, pair, state, noise);
    state.precoder = update_precoder(channels, pair, state, power);

    Algorithm1Outcome inner =
        algorithm1(channels, state, grouping, pair, dynamic, opts.inner);
    grouping = std::move(inner.grouping);
    pair = std::move(inner.pair);
    last_rcg = std::move(inner.rcg_iterations);

    const double rate = sum_rate(channels, pair, state.precoder, noise);
    if (rate > best.sum_rate_bits) {
      best.sum_rate_bits = rate;
      best.grouping = grouping;
      best.bdris = pair;
      best.precoder = state.precoder;
      best.rcg_iterations = last_rcg;
    }
    if (std::abs(rate - prev_rate) <= opts.outer_tol * std::max(prev_rate, 1e-30)) {
      converged = true;
      prev_rate = rate;
      break;
    }
    prev_rate = rate;
  }

  best.outer_iterations = std::min(outer, opts.max_outer);
  best.converged = converged;
  best.activated_links = activated_links(best.grouping);
  const DecompositionMatrices d = compute_decomposition(channels, state);
  best.approximation_gap = approximation_gap(best.bdris, d, best.grouping);
  return best;
}

}  // namespace bdris
