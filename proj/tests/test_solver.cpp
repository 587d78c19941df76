#include <catch2/catch_amalgamated.hpp>

#include "bdris/solver.hpp"
#include "oracles.hpp"

using namespace bdris;
using Catch::Approx;

namespace {

// Reference scenario used by most sections.
struct Fixture {
  ChannelSet ch;
  Grouping grouping;
  BdRisPair pair;
  FpState state;
  Eigen::VectorXd noise;

  explicit Fixture(Rng& rng, int M = 6, int N = 3, int K = 4, int K_r = 2, int G = 3)
      : ch(oracles::random_channels(M, N, K, K_r, rng)),
        grouping(Grouping::uniform_adjacent(M, G)),
        pair(init_diagonal(M, grouping, rng)),
        state(oracles::random_state(N, K, rng)),
        noise(Eigen::VectorXd::Constant(K, 0.42)) {}
};

}  // namespace

TEST_CASE("sum_rate") {
  Rng rng(211);
  Fixture f(rng);

  SECTION("zero precoder earns zero rate") {
    const CMat w0 = CMat::Zero(3, 4);
    CHECK(sum_rate(f.ch, f.pair, w0, f.noise) == 0.0);
  }

  SECTION("unit SINR gives exactly one bit") {
    // single user, scalar everything, |h~^H w|^2 == sigma^2
    ChannelSet ch;
    ch.bs_ris = CMat::Identity(1, 1);
    ch.ris_user = {CVec::Ones(1)};
    ch.user_side = {UserSide::Reflective};
    const double s = 1.0 / std::sqrt(2.0);
    const BdRisPair pair{s * CMat::Identity(1, 1), s * CMat::Identity(1, 1),
                         Grouping::single_group(1)};
    CMat w(1, 1);
    w(0, 0) = std::sqrt(2.0);  // |conj(s) w| = 1
    CHECK(sum_rate(ch, pair, w, Eigen::VectorXd::Ones(1)) == Approx(1.0).margin(1e-12));
  }

  SECTION("matches the scalar-loop oracle") {
    for (int trial = 0; trial < 10; ++trial) {
      Fixture g(rng);
      const double expect = oracles::naive_sum_rate(g.ch, g.pair, g.state.precoder, g.noise);
      CHECK(sum_rate(g.ch, g.pair, g.state.precoder, g.noise) ==
            Approx(expect).margin(1e-12));
    }
  }
}

TEST_CASE("surrogate_objective") {
  Rng rng(223);
  Fixture f(rng);

  SECTION("vanishes at zero auxiliaries") {
    FpState zero = f.state;
    zero.iota.setZero();
    zero.tau.setZero();
    CHECK(surrogate_objective(f.ch, f.pair, zero, f.noise) == 0.0);
  }

  SECTION("equals the sum-rate at the closed-form auxiliaries") {
    for (int trial = 0; trial < 10; ++trial) {
      Fixture g(rng);
      FpState opt = g.state;
      opt.iota = update_iota(g.ch, g.pair, opt, g.noise);
      opt.tau = update_tau(g.ch, g.pair, opt, g.noise);
      const double rate = sum_rate(g.ch, g.pair, opt.precoder, g.noise);
      CHECK(surrogate_objective(g.ch, g.pair, opt, g.noise) ==
            Approx(rate).epsilon(1e-10));
    }
  }

  SECTION("never exceeds the sum-rate (lower bound after optimal auxiliaries)") {
    for (int trial = 0; trial < 30; ++trial) {
      Fixture g(rng);
      const double rate = sum_rate(g.ch, g.pair, g.state.precoder, g.noise);
      CHECK(surrogate_objective(g.ch, g.pair, g.state, g.noise) <= rate + 1e-9);
    }
  }
}

TEST_CASE("update_iota") {
  Rng rng(227);

  SECTION("zero precoder gives zero auxiliaries") {
    Fixture f(rng);
    f.state.precoder.setZero();
    CHECK(update_iota(f.ch, f.pair, f.state, f.noise).norm() == 0.0);
  }

  SECTION("single user without interference recovers |h~^H w|^2 / sigma^2") {
    auto ch = oracles::random_channels(4, 2, 1, 1, rng);
    const Grouping one = Grouping::single_group(4);
    const BdRisPair pair = init_diagonal(4, one, rng);
    FpState st = oracles::random_state(2, 1, rng);
    const Eigen::VectorXd noise = Eigen::VectorXd::Constant(1, 0.9);
    const CVec ht = effective_channel(pair, ch.ris_user[0], ch.bs_ris, ch.user_side[0]);
    const double expect = std::norm((ht.adjoint() * st.precoder.col(0))(0)) / 0.9;
    CHECK(update_iota(ch, pair, st, noise)(0) == Approx(expect).epsilon(1e-12));
  }

  SECTION("stationary at the FP-consistent state: perturbing iota never helps") {
    for (int trial = 0; trial < 20; ++trial) {
      Fixture f(rng);
      f.state.iota = update_iota(f.ch, f.pair, f.state, f.noise);
      f.state.tau = update_tau(f.ch, f.pair, f.state, f.noise);
      const double base = surrogate_objective(f.ch, f.pair, f.state, f.noise);
      for (int k = 0; k < f.state.iota.size(); ++k) {
        for (const double delta : {1e-4, -1e-4}) {
          FpState bumped = f.state;
          bumped.iota(k) = std::max(0.0, bumped.iota(k) + delta);
          CHECK(surrogate_objective(f.ch, f.pair, bumped, f.noise) <= base + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("update_tau") {
  Rng rng(229);

  SECTION("zero precoder gives zero tau") {
    Fixture f(rng);
    f.state.precoder.setZero();
    CHECK(update_tau(f.ch, f.pair, f.state, f.noise).norm() == 0.0);
  }

  SECTION("scalar case matches the hand-evaluated ratio") {
    ChannelSet ch;
    ch.bs_ris = CMat::Identity(1, 1) * std::complex<double>(0.8, -0.4);
    ch.ris_user = {CVec::Ones(1) * std::complex<double>(0.2, 0.5)};
    ch.user_side = {UserSide::Transmissive};
    const double s = 1.0 / std::sqrt(2.0);
    const BdRisPair pair{s * CMat::Identity(1, 1), s * CMat::Identity(1, 1),
                         Grouping::single_group(1)};
    FpState st;
    st.iota = Eigen::VectorXd::Constant(1, 3.0);
    st.tau = Eigen::VectorXcd::Zero(1);
    st.precoder = CMat::Identity(1, 1) * std::complex<double>(1.1, 0.3);
    const Eigen::VectorXd noise = Eigen::VectorXd::Constant(1, 0.25);
    const std::complex<double> heff =
        std::conj(std::conj(std::complex<double>(0.2, 0.5)) * (s) *
                  std::complex<double>(0.8, -0.4));
    const std::complex<double> c = std::conj(heff) * std::complex<double>(1.1, 0.3);
    const std::complex<double> expect = std::sqrt(4.0) * c / (std::norm(c) + 0.25);
    CHECK(std::abs(update_tau(ch, pair, st, noise)(0) - expect) < 1e-12);
  }

  SECTION("maximizer of the surrogate: complex perturbations never help") {
    for (int trial = 0; trial < 20; ++trial) {
      Fixture f(rng);
      f.state.tau = update_tau(f.ch, f.pair, f.state, f.noise);
      const double base = surrogate_objective(f.ch, f.pair, f.state, f.noise);
      for (int k = 0; k < f.state.tau.size(); ++k) {
        for (const std::complex<double> delta :
             {std::complex<double>(1e-4, 0), std::complex<double>(-1e-4, 0),
              std::complex<double>(0, 1e-4), std::complex<double>(0, -1e-4)}) {
          FpState bumped = f.state;
          bumped.tau(k) += delta;
          CHECK(surrogate_objective(f.ch, f.pair, bumped, f.noise) <= base + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("update_precoder") {
  Rng rng(233);

  SECTION("zero tau gives the zero precoder") {
    Fixture f(rng);
    f.state.tau.setZero();
    CHECK(update_precoder(f.ch, f.pair, f.state, 5.0).norm() == 0.0);
  }

  SECTION("binds the power budget when the multiplier is active") {
    for (int trial = 0; trial < 10; ++trial) {
      Fixture f(rng);
      f.state.tau *= 10.0;  // strong auxiliaries force a binding constraint
      const double P = 0.3;
      const CMat w = update_precoder(f.ch, f.pair, f.state, P);
      CHECK(w.squaredNorm() <= P * (1.0 + 1e-7));
      CHECK(std::abs(w.squaredNorm() - P) <= 1e-6 * P);
    }
  }

  SECTION("dominates random feasible precoders") {
    Fixture f(rng);
    const double P = 2.0;
    FpState best = f.state;
    best.precoder = update_precoder(f.ch, f.pair, f.state, P);
    const double top = surrogate_objective(f.ch, f.pair, best, f.noise);
    for (int draw = 0; draw < 1000; ++draw) {
      FpState other = f.state;
      other.precoder = oracles::random_matrix(3, 4, rng);
      other.precoder *= std::sqrt(P * rng.uniform01()) / other.precoder.norm();
      CHECK(surrogate_objective(f.ch, f.pair, other, f.noise) <= top + 1e-9);
    }
  }

  SECTION("argument validation") {
    Fixture f(rng);
    CHECK_THROWS_AS(update_precoder(f.ch, f.pair, f.state, 0.0), std::invalid_argument);
  }
}

TEST_CASE("compute_decomposition") {
  Rng rng(239);

  SECTION("zero precoder zeroes Y and X") {
    Fixture f(rng);
    f.state.precoder.setZero();
    const auto d = compute_decomposition(f.ch, f.state);
    CHECK(d.y.norm() == 0.0);
    CHECK(d.x_t.norm() == 0.0);
    CHECK(d.x_r.norm() == 0.0);
    CHECK(d.z_t.norm() > 0.0);  // Z depends on tau and channels only
  }

  SECTION("single reflective user leaves the transmissive side empty") {
    auto ch = oracles::random_channels(4, 2, 1, 1, rng);
    FpState st = oracles::random_state(2, 1, rng);
    const auto d = compute_decomposition(ch, st);
    CHECK(d.z_t.norm() == 0.0);
    CHECK(d.x_t.norm() == 0.0);
    CHECK(d.z_r.norm() > 0.0);
  }

  SECTION("Hermitian structure within 1e-12") {
    Fixture f(rng);
    const auto d = compute_decomposition(f.ch, f.state);
    CHECK((d.y - d.y.adjoint()).norm() < 1e-12);
    CHECK((d.z_t - d.z_t.adjoint()).norm() < 1e-12);
    CHECK((d.z_r - d.z_r.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMat> ey(d.y);
    CHECK(ey.eigenvalues().minCoeff() > -1e-12);
  }

  SECTION("reproduces the per-user double-loop objective (decomposition chain)") {
    for (int trial = 0; trial < 10; ++trial) {
      Fixture f(rng);
      const auto d = compute_decomposition(f.ch, f.state);
      const double direct = oracles::naive_phi_objective(f.ch, f.state, f.pair);
      const double matrix_form = decomposition_objective(d, f.pair);
      CHECK(matrix_form == Approx(direct).margin(1e-10).epsilon(1e-10));

      const Grouping one = Grouping::single_group(f.pair.num_cells());
      const BdRisPair joined{f.pair.phi_t, f.pair.phi_r, one};
      CHECK(grouping_objective(d, joined, one) ==
            Approx(matrix_form).margin(1e-10).epsilon(1e-10));
    }
  }
}

TEST_CASE("group objective and approximation gap") {
  Rng rng(241);

  SECTION("zero blocks give zero objective") {
    Fixture f(rng);
    const auto d = compute_decomposition(f.ch, f.state);
    const BdRisPair zero{CMat::Zero(6, 6), CMat::Zero(6, 6), f.grouping};
    CHECK(grouping_objective(d, zero, f.grouping) == 0.0);
  }

  SECTION("sum of group terms plus cross terms equals the exact value") {
    for (int trial = 0; trial < 10; ++trial) {
      Fixture f(rng);
      const auto d = compute_decomposition(f.ch, f.state);
      const double approx = grouping_objective(d, f.pair, f.grouping);
      const double exact = decomposition_objective(d, f.pair);
      const double gap = approximation_gap(f.pair, d, f.grouping);
      CHECK(gap == Approx(std::abs(exact - approx) / std::max(std::abs(exact), 1e-30))
                       .epsilon(1e-9));
    }
  }

  SECTION("no dropped terms for a single group") {
    Fixture f(rng);
    const auto d = compute_decomposition(f.ch, f.state);
    const Grouping one = Grouping::single_group(6);
    const BdRisPair joined{f.pair.phi_t, f.pair.phi_r, one};
    CHECK(approximation_gap(joined, d, one) == 0.0);
  }

  SECTION("block-diagonal Y and Z zero the gap exactly") {
    Fixture f(rng);
    auto d = compute_decomposition(f.ch, f.state);
    for (int g = 0; g < f.grouping.num_groups(); ++g)
      for (int p = 0; p < f.grouping.num_groups(); ++p) {
        if (g == p) continue;
        const auto& a = f.grouping.cells(g);
        const auto& b = f.grouping.cells(p);
        d.y(a, b) = CMat::Zero(a.size(), b.size());
      }
    CHECK(approximation_gap(f.pair, d, f.grouping) == 0.0);
  }
}

TEST_CASE("candidate_objective and grouping_pass") {
  Rng rng(251);

  SECTION("staying put reproduces the current total") {
    for (int trial = 0; trial < 5; ++trial) {
      Fixture f(rng);
      const auto d = compute_decomposition(f.ch, f.state);
      const double total = grouping_objective(d, f.pair, f.grouping);
      for (int m = 0; m < 6; ++m)
        CHECK(candidate_objective(d, f.pair, f.grouping, m, f.grouping.group_of(m)) ==
              Approx(total).margin(1e-12));
    }
  }

  SECTION("single group never changes") {
    Rng rng2(5);
    auto ch = oracles::random_channels(5, 2, 3, 1, rng2);
    auto st = oracles::random_state(2, 3, rng2);
    const Grouping one = Grouping::single_group(5);
    const BdRisPair pair = init_diagonal(5, one, rng2);
    const auto d = compute_decomposition(ch, st);
    int moves = -1;
    const Grouping out = grouping_pass(pair, d, one, &moves);
    CHECK(moves == 0);
    CHECK(out == one);
  }

  SECTION("sweep output never exceeds the input objective and beats no lower bound") {
    for (int trial = 0; trial < 50; ++trial) {
      Rng sr(1000 + trial);
      auto ch = oracles::random_channels(4, 2, 3, 1, sr);
      auto st = oracles::random_state(2, 3, sr);
      Grouping grouping = Grouping::uniform_adjacent(4, 2);
      BdRisPair pair = init_diagonal(4, grouping, sr);
      const auto d = compute_decomposition(ch, st);

      const double before = grouping_objective(d, pair, grouping);
      const Grouping after = grouping_pass(pair, d, grouping);
      const double value = grouping_objective(d, {pair.phi_t, pair.phi_r, after}, after);
      CHECK(value <= before + 1e-10);

      // exhaustive two-part oracle bounds the greedy result from below
      double exhaustive = std::numeric_limits<double>::infinity();
      for (const auto& parts : oracles::two_part_partitions(4)) {
        double total = 0.0;
        for (const auto& cells : parts)
          total += group_objective_cells(d, pair.phi_t, pair.phi_r, cells);
        exhaustive = std::min(exhaustive, total);
      }
      CHECK(value >= exhaustive - 1e-10);
    }
  }
}

TEST_CASE("optimize_blocks") {
  Rng rng(257);

  SECTION("zero decomposition keeps the warm start") {
    Fixture f(rng);
    DecompositionMatrices d;
    const int M = 6;
    d.x_t = d.x_r = d.y = d.z_t = d.z_r = CMat::Zero(M, M);
    const auto out = optimize_blocks(d, f.grouping, f.pair);
    for (int g = 0; g < f.grouping.num_groups(); ++g) {
      CHECK(out.rcg_iterations[g] == 0);
      CHECK((out.stacked_blocks[g] - extract_stacked_block(f.pair, g)).norm() < 1e-12);
    }
  }

  SECTION("per-group objective never increases from the warm start") {
    for (int trial = 0; trial < 10; ++trial) {
      Fixture f(rng);
      const auto d = compute_decomposition(f.ch, f.state);
      const auto out = optimize_blocks(d, f.grouping, f.pair);
      for (int g = 0; g < f.grouping.num_groups(); ++g) {
        const auto& idx = f.grouping.cells(g);
        const CMat warm = manifold::polar_orthonormalize(extract_stacked_block(f.pair, g));
        const auto [wt, wr] = split_stacked(warm);
        const auto [bt, br] = split_stacked(out.stacked_blocks[g]);
        // assemble f_g for both via the library sub-matrix path
        BdRisPair warm_pair = restore({{wt, wr}}, Grouping::single_group(idx.size()));
        BdRisPair opt_pair = restore({{bt, br}}, Grouping::single_group(idx.size()));
        DecompositionMatrices sub;
        sub.x_t = d.x_t(idx, idx);
        sub.x_r = d.x_r(idx, idx);
        sub.y = d.y(idx, idx);
        sub.z_t = d.z_t(idx, idx);
        sub.z_r = d.z_r(idx, idx);
        const Grouping sub_one = Grouping::single_group(static_cast<int>(idx.size()));
        CHECK(grouping_objective(sub, opt_pair, sub_one) <=
              grouping_objective(sub, warm_pair, sub_one) + 1e-10);
      }
    }
  }

  SECTION("singleton groups match a dense sphere search") {
    Rng sr(77);
    auto ch = oracles::random_channels(3, 2, 2, 1, sr);
    auto st = oracles::random_state(2, 2, sr);
    const auto d = compute_decomposition(ch, st);
    const Grouping singles = Grouping::singletons(3);
    // scale down so the sphere grid (unit-scale) stays comparable
    const BdRisPair pair = init_diagonal(3, singles, sr);
    const auto out = optimize_blocks(d, singles, pair);
    for (int g = 0; g < 3; ++g) {
      manifold::QuadraticTraceProblem p;
      const std::vector<int> idx{g};
      p.X.resize(1, 2);
      p.X(0, 0) = d.x_t(g, g);
      p.X(0, 1) = d.x_r(g, g);
      p.Y = d.y(idx, idx);
      p.Z = CMat::Zero(2, 2);
      p.Z(0, 0) = d.z_t(g, g);
      p.Z(1, 1) = d.z_r(g, g);
      const double solved = manifold::objective(p, out.stacked_blocks[g]);
      const double grid = oracles::sphere_grid_minimum(p, 160);
      const double scale = std::max(1.0, std::abs(grid));
      CHECK(solved <= grid + 1e-9 * scale);
      CHECK(grid - solved <= 2e-3 * scale);
    }
  }
}

TEST_CASE("algorithm1") {
  Rng rng(263);

  SECTION("fixed architectures run exactly one block pass") {
    Fixture f(rng);
    const auto out = algorithm1(f.ch, f.state, f.grouping, f.pair, false);
    CHECK(out.iterations == 1);
    CHECK(out.total_moves == 0);
    CHECK(out.grouping == f.grouping);
  }

  SECTION("single group coincides with a direct full-matrix solve") {
    Rng sr(88);
    auto ch = oracles::random_channels(5, 3, 3, 1, sr);
    auto st = oracles::random_state(3, 3, sr);
    const Grouping one = Grouping::single_group(5);
    const BdRisPair pair = init_diagonal(5, one, sr);

    const auto dynamic_out = algorithm1(ch, st, one, pair, true);
    const auto fixed_out = algorithm1(ch, st, one, pair, false);
    CHECK((dynamic_out.pair.phi_t - fixed_out.pair.phi_t).norm() == 0.0);
    CHECK((dynamic_out.pair.phi_r - fixed_out.pair.phi_r).norm() == 0.0);
  }

  SECTION("objective trajectory is non-increasing") {
    for (int trial = 0; trial < 5; ++trial) {
      Fixture f(rng);
      const auto out = algorithm1(f.ch, f.state, f.grouping, f.pair, true);
      for (std::size_t i = 1; i < out.objective_trajectory.size(); ++i)
        CHECK(out.objective_trajectory[i] <=
              out.objective_trajectory[i - 1] + 1e-10);
      CHECK(validate_structure(out.pair).ok(1e-9));
    }
  }
}

TEST_CASE("zero-forcing initialization nulls inter-user interference") {
  Rng rng(269);
  for (int trial = 0; trial < 10; ++trial) {
    const int N = 4, K = 3;
    std::vector<CVec> h_eff;
    for (int k = 0; k < K; ++k) h_eff.push_back(oracles::random_vector(N, rng));
    const double P = 7.0;
    const CMat w = zero_forcing_precoder(h_eff, P);
    CHECK(w.squaredNorm() == Approx(P).epsilon(1e-12));
    for (int k = 0; k < K; ++k)
      for (int p = 0; p < K; ++p) {
        if (p == k) continue;
        CHECK(std::norm((h_eff[k].adjoint() * w.col(p))(0)) < 1e-16 * P);
      }
  }
}

TEST_CASE("solve_scenario") {
  SystemConfig cfg;
  cfg.num_cells = 8;
  cfg.grid_rows = 2;
  cfg.grid_cols = 4;
  cfg.num_groups = 2;
  cfg.num_bs_antennas = 3;
  cfg.num_users = 3;
  cfg.num_reflective = 2;
  cfg.seed = 5;
  const auto ch = generate_channels(cfg, 1);

  SECTION("feasible output with positive rate") {
    for (const auto arch :
         {Architecture::CwSc, Architecture::CwGcHorizontal, Architecture::CwGcVertical,
          Architecture::CwGcInterlaced, Architecture::CwFc, Architecture::CwDgc}) {
      const auto result = solve_scenario(cfg, ch, arch);
      CHECK(result.sum_rate_bits > 0.0);
      CHECK(validate_structure(result.bdris).ok(1e-9));
      CHECK(result.precoder.squaredNorm() <= cfg.transmit_power_mw + 1e-8);
      CHECK(result.activated_links == activated_links(result.grouping));
    }
  }

  SECTION("architecture coincidences are exact") {
    SystemConfig one = cfg;
    one.num_groups = 1;
    const auto dgc1 = solve_scenario(one, ch, Architecture::CwDgc);
    const auto fc = solve_scenario(one, ch, Architecture::CwFc);
    CHECK(dgc1.sum_rate_bits == Approx(fc.sum_rate_bits).margin(1e-9));

    SystemConfig full = cfg;
    full.num_groups = 8;
    const auto dgcM = solve_scenario(full, ch, Architecture::CwDgc);
    const auto sc = solve_scenario(full, ch, Architecture::CwSc);
    CHECK(dgcM.sum_rate_bits == Approx(sc.sum_rate_bits).margin(1e-9));
  }

  SECTION("mismatched channels rejected") {
    SystemConfig other = cfg;
    other.num_cells = 6;
    other.grid_rows = 2;
    other.grid_cols = 3;
    CHECK_THROWS_AS(solve_scenario(other, ch, Architecture::CwFc), std::invalid_argument);
  }
}

TEST_CASE("single-user solve approaches the matched-filter bound") {
  // K = 1 with a fixed surface: the FP loop must land on the full-power
  // maximum-ratio rate log2(1 + P ||h~||^2 / sigma^2).
  Rng rng(271);
  SystemConfig cfg;
  cfg.num_cells = 6;
  cfg.grid_rows = 2;
  cfg.grid_cols = 3;
  cfg.num_groups = 2;
  cfg.num_bs_antennas = 4;
  cfg.num_users = 1;
  cfg.num_reflective = 1;
  cfg.seed = 11;
  const auto ch = generate_channels(cfg, 0);
  const auto noise = cfg.noise_vector();
  const double P = cfg.transmit_power_mw;

  Rng prng(derive_seed(cfg.seed, {kStreamPhiInit}));
  const BdRisPair pair = init_diagonal(cfg.num_cells, Grouping::uniform_adjacent(6, 2), prng);
  const CVec ht = effective_channel(pair, ch.ris_user[0], ch.bs_ris, ch.user_side[0]);
  const double bound = std::log2(1.0 + P * ht.squaredNorm() / noise(0));

  FpState st;
  st.iota = Eigen::VectorXd::Zero(1);
  st.tau = Eigen::VectorXcd::Zero(1);
  st.precoder = std::sqrt(P) * ht / ht.norm();  // MR start; FP must hold the bound
  for (int it = 0; it < 400; ++it) {
    st.iota = update_iota(ch, pair, st, noise);
    st.tau = update_tau(ch, pair, st, noise);
    st.precoder = update_precoder(ch, pair, st, P);
  }
  CHECK(sum_rate(ch, pair, st.precoder, noise) == Approx(bound).epsilon(1e-6));

  // and from a cold zero-forcing start it converges to the same bound
  FpState cold;
  cold.iota = Eigen::VectorXd::Zero(1);
  cold.tau = Eigen::VectorXcd::Zero(1);
  cold.precoder = zero_forcing_precoder({ht}, P);
  for (int it = 0; it < 400; ++it) {
    cold.iota = update_iota(ch, pair, cold, noise);
    cold.tau = update_tau(ch, pair, cold, noise);
    cold.precoder = update_precoder(ch, pair, cold, P);
  }
  CHECK(sum_rate(ch, pair, cold.precoder, noise) == Approx(bound).epsilon(1e-6));
}
