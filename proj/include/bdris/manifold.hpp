#pragma once

// Riemannian conjugate gradient on the complex Stiefel manifold
// St(2n, n) = { Phi in C^{2n x n} : Phi^H Phi = I_n } for the quadratic
// trace problem
//
//   min f(Phi) = Tr(Phi Y Phi^H Z) - 2 Re Tr(Phi X),
//
// with Y (n x n) and Z (2n x 2n, block-diagonal) Hermitian PSD. This is the
// per-group sub-problem of the BD-RIS design; n is a group size, so
// instances are small and dense.
//
// Conventions:
//  * real inner product <A, B> = Re Tr(A^H B);
//  * Euclidean gradient grad f = 2 (Z Phi Y - X^H), i.e. 2 df/dPhi*, so the
//    directional derivative d/dt f(Phi + t D) equals <grad f, D>;
//  * tangent projection  P_Phi(xi) = xi - Phi herm(Phi^H xi);
//  * polar retraction (nearest orthonormal factor of Phi + xi).
//
// The CG rule is Polak-Ribiere+ with projection as vector transport, reset
// to steepest descent on a negative coefficient, a non-descent direction, or
// every 2n*n accepted steps; the line search is Armijo backtracking.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "bdris/channel.hpp"

namespace bdris::manifold {

/// Problem data for min Tr(Phi Y Phi^H Z) - 2 Re Tr(Phi X) over St(2n, n).
struct QuadraticTraceProblem {
  CMat X;  // n x 2n
  CMat Y;  // n x n, Hermitian PSD
  CMat Z;  // 2n x 2n, Hermitian PSD, block-diagonal (two n x n blocks)

  int n() const { return static_cast<int>(Y.rows()); }

  void check_shapes() const {
    const int nn = n();
    if (X.rows() != nn || X.cols() != 2 * nn || Y.cols() != nn ||
        Z.rows() != 2 * nn || Z.cols() != 2 * nn)
      throw std::invalid_argument("QuadraticTraceProblem: inconsistent shapes");
  }
};

/// A point on St(2n, n); `phi` has orthonormal columns within 1e-9.
struct StiefelPoint {
  CMat phi;
};

struct RcgOptions {
  double grad_tol = 1e-6;
  int max_iters = 500;
  double armijo_coeff = 1e-4;      // sufficient-decrease constant
  double backtrack_ratio = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 50;
};

struct RcgDiagnostics {
  int iterations = 0;          // accepted steps (I_cg)
  double grad_norm = 0.0;      // Riemannian gradient norm at the returned point
  double objective = 0.0;
  bool converged = false;      // grad_norm <= grad_tol
  bool line_search_failed = false;
  std::vector<double> objective_trace;  // f at start and after each accepted step
  double worst_feasibility = 0.0;       // max ||Phi^H Phi - I||_F over iterates
};

inline double real_inner(const CMat& a, const CMat& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

namespace detail {

inline void check_point(const QuadraticTraceProblem& problem, const CMat& phi) {
  if (phi.rows() != 2 * problem.n() || phi.cols() != problem.n())
    throw std::invalid_argument("manifold: point shape does not match problem");
}

}  // namespace detail

/// f(Phi). The trace of the quadratic term is real for Hermitian Y, Z; a
/// material imaginary residue signals non-Hermitian inputs and is rejected.
inline double objective(const QuadraticTraceProblem& problem, const CMat& phi) {
  problem.check_shapes();
  detail::check_point(problem, phi);
  // Tr(Phi Y Phi^H Z) = <Z Phi, Phi Y>
  const std::complex<double> quad =
      ((problem.Z * phi).conjugate().cwiseProduct(phi * problem.Y)).sum();
  const std::complex<double> lin = (problem.X * phi).trace();
  if (std::abs(quad.imag()) > 1e-10 * std::max(1.0, std::abs(quad.real())))
    throw std::domain_error("objective: quadratic trace is not real (Y or Z not Hermitian?)");
  return quad.real() - 2.0 * lin.real();
}

/// 2 (Z Phi Y - X^H); matches central finite differences of `objective`
/// under the Re Tr(.^H .) pairing.
inline CMat euclidean_gradient(const QuadraticTraceProblem& problem, const CMat& phi) {
  problem.check_shapes();
  detail::check_point(problem, phi);
  return 2.0 * (problem.Z * phi * problem.Y - problem.X.adjoint());
}

/// Orthogonal projection onto the tangent space at Phi:
/// xi - Phi * herm(Phi^H xi).
inline CMat project_tangent(const CMat& phi, const CMat& xi) {
  const CMat inner = phi.adjoint() * xi;
  return xi - phi * (0.5 * (inner + inner.adjoint()));
}

/// Nearest matrix with orthonormal columns (polar factor). Uses the
/// eigendecomposition of A^H A when it is safely positive definite and falls
/// back to an SVD otherwise; a numerically rank-deficient input is nudged by
/// 1e-12 along the identity direction first so the factor stays well defined.
inline CMat polar_orthonormalize(const CMat& a) {
  const int n = static_cast<int>(a.cols());
  const CMat gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<CMat> eig(gram);
  const double max_eig = eig.eigenvalues().maxCoeff();
  const double min_eig = eig.eigenvalues().minCoeff();

  if (min_eig > 1e-4 * std::max(1.0, max_eig)) {
    const Eigen::ArrayXd inv_sqrt = eig.eigenvalues().array().sqrt().inverse();
    return a * (eig.eigenvectors() * inv_sqrt.matrix().asDiagonal() *
                eig.eigenvectors().adjoint());
  }

  CMat work = a;
  if (min_eig <= 1e-24 * std::max(1.0, max_eig)) {
    const double nudge = 1e-12 * std::max(1.0, std::sqrt(max_eig));
    work.topRows(n) += nudge * CMat::Identity(n, n);
  }
  Eigen::JacobiSVD<CMat> svd(work, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Polar retraction: the orthonormal factor of Phi + xi.
inline CMat retract(const CMat& phi, const CMat& xi) {
  return polar_orthonormalize(phi + xi);
}

/// Riemannian CG (Polak-Ribiere+, Armijo backtracking). Stops at gradient
/// norm <= grad_tol or max_iters; the objective never increases across
/// accepted steps. On a line-search failure the best iterate so far is
/// returned with the failure flagged.
inline std::pair<StiefelPoint, RcgDiagnostics> solve_rcg(
    const QuadraticTraceProblem& problem, const StiefelPoint& start,
    const RcgOptions& opts = {}) {
  problem.check_shapes();
  detail::check_point(problem, start.phi);
  if (opts.backtrack_ratio <= 0.0 || opts.backtrack_ratio >= 1.0)
    throw std::invalid_argument("solve_rcg: backtrack_ratio must lie in (0,1)");
  if (opts.armijo_coeff <= 0.0 || opts.armijo_coeff > 0.5)
    throw std::invalid_argument("solve_rcg: armijo_coeff must lie in (0, 0.5]");

  const int n = problem.n();
  const int restart_period = std::max(1, 2 * n * n);

  CMat phi = start.phi;
  double f = objective(problem, phi);
  CMat grad = project_tangent(phi, euclidean_gradient(problem, phi));
  double grad_sq = real_inner(grad, grad);
  CMat direction = -grad;

  RcgDiagnostics diag;
  diag.objective = f;
  diag.grad_norm = std::sqrt(grad_sq);
  diag.objective_trace.push_back(f);
  const auto feasibility = [n](const CMat& p) {
    return (p.adjoint() * p - CMat::Identity(n, n)).norm();
  };
  diag.worst_feasibility = feasibility(phi);

  while (diag.grad_norm > opts.grad_tol && diag.iterations < opts.max_iters) {
    double slope = real_inner(grad, direction);
    if (slope >= 0.0) {  // not a descent direction: reset
      direction = -grad;
      slope = -grad_sq;
    }

    // Armijo backtracking from the full step.
    double step = opts.initial_step;
    CMat phi_next;
    double f_next = f;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      phi_next = retract(phi, step * direction);
      f_next = objective(problem, phi_next);
      if (f_next <= f + opts.armijo_coeff * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.backtrack_ratio;
    }
    if (!accepted) {
      diag.line_search_failed = true;
      break;
    }

    const CMat grad_next =
        project_tangent(phi_next, euclidean_gradient(problem, phi_next));
    const double grad_next_sq = real_inner(grad_next, grad_next);

    // PR+ coefficient with projection transport of the old gradient.
    double beta = 0.0;
    if ((diag.iterations + 1) % restart_period != 0 && grad_sq > 0.0) {
      const CMat transported = project_tangent(phi_next, grad);
      beta = std::max(0.0, real_inner(grad_next, grad_next - transported) / grad_sq);
    }
    direction = -grad_next + beta * project_tangent(phi_next, direction);

    phi = std::move(phi_next);
    f = f_next;
    grad = grad_next;
    grad_sq = grad_next_sq;
    ++diag.iterations;
    diag.objective = f;
    diag.grad_norm = std::sqrt(grad_sq);
    diag.objective_trace.push_back(f);
    diag.worst_feasibility = std::max(diag.worst_feasibility, feasibility(phi));
  }

  diag.converged = diag.grad_norm <= opts.grad_tol;
  return {StiefelPoint{std::move(phi)}, diag};
}

}  // namespace bdris::manifold
