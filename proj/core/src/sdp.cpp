#include "sparsekm/sdp.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsekm/errors.hpp"

namespace sparsekm {

namespace {

// Orthogonal projection onto {S symmetric, tr(S) = K, S 1 = 1}. The
// multipliers of the two affine constraints solve a closed-form 2x2-style
// system after symmetrization.
Matrix affine_project(const Matrix& m, int K) {
  const int n = static_cast<int>(m.rows());
  Matrix s = symmetrized(m);
  const Vector r0 = s.rowwise().sum();
  const double t0 = s.trace();
  const double s0 = r0.sum();
  const double nu = (K - 1.0 - t0 + s0 / n) / (n - 1.0);
  const double sigma = 1.0 - s0 / n - nu;
  const Vector mu =
      (2.0 / n) * (Vector::Ones(n) - r0 - Vector::Constant(n, nu + 0.5 * sigma));
  s.diagonal().array() += nu;
  s += 0.5 * (mu * Eigen::RowVectorXd::Ones(n) + Vector::Ones(n) * mu.transpose());
  return s;
}

// Uniform feasible starting point: K/n on the diagonal, the rest spread
// evenly off-diagonal so rows sum to 1.
Matrix uniform_start(int n, int K) {
  const double diag = static_cast<double>(K) / n;
  const double off = (n - K) / (static_cast<double>(n) * (n - 1));
  Matrix z = Matrix::Constant(n, n, off);
  z.diagonal().setConstant(diag);
  return z;
}

bool feasible_as_membership(const Matrix& z, int K) {
  MembershipTols tol;
  tol.symmetry = 1e-7;
  tol.trace = 1e-5;
  tol.row_sum = 1e-5;
  tol.entry = 1e-6;
  tol.min_eig = 1e-5;
  return check_membership(z, K, tol).all();
}

SolveObserver g_observer;  // NOLINT: set before work starts, read-only after

}  // namespace

void set_solve_observer(SolveObserver observer) { g_observer = std::move(observer); }

void SdpProblem::validate() const {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw std::invalid_argument("SdpProblem: A must be square");
  if (K < 2) throw std::invalid_argument("SdpProblem: K must be >= 2");
  if (n < K) throw std::invalid_argument("SdpProblem: need n >= K");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("SdpProblem: A not symmetric within 1e-8");
}

Matrix similarity_known_cov(const Matrix& xt_s, const Matrix& sigma_ss) {
  if (sigma_ss.rows() != xt_s.rows() || sigma_ss.cols() != xt_s.rows())
    throw std::invalid_argument("similarity_known_cov: dimension mismatch");
  if (sigma_ss.rows() > 0) {
    const double scale = std::max(1.0, sigma_ss.cwiseAbs().maxCoeff());
    if ((sigma_ss - sigma_ss.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
      throw std::invalid_argument("similarity_known_cov: Sigma_SS not symmetric");
  }
  const Matrix m = xt_s.transpose() * sigma_ss * xt_s;
  return symmetrized(m);
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts) {
  problem.validate();
  const int n = static_cast<int>(problem.A.rows());
  const int K = problem.K;

  const Matrix a_sym = symmetrized(problem.A);
  const double a_norm = a_sym.norm();
  const Matrix a_bar = (a_norm > 0.0) ? Matrix(a_sym / a_norm) : Matrix::Zero(n, n);

  Matrix z = opts.warm_start ? symmetrized(*opts.warm_start) : uniform_start(n, K);
  Matrix x1 = z, x2 = z, x3 = z;
  Matrix u1 = Matrix::Zero(n, n), u2 = u1, u3 = u1;

  // Penalty on the normalized objective scale; equivalent to ||A||_F / n on
  // the original scale.
  double rho = 1.0 / n;
  PsdProjector psd;

  SdpSolution sol;
  double primal = 0.0, dual = 0.0;
  int feas_recheck_at = 0;

  int iter = 0;
  for (iter = 1; iter <= opts.max_iter; ++iter) {
    x1 = psd.project(symmetrized(z - u1));
    x2 = affine_project(z - u2, K);
    x3 = (z - u3).cwiseMax(0.0);

    const Matrix z_prev = z;
    z = ((x1 + u1) + (x2 + u2) + (x3 + u3)) / 3.0 + a_bar / (3.0 * rho);
    u1 += x1 - z;
    u2 += x2 - z;
    u3 += x3 - z;

    primal = std::sqrt((x1 - z).squaredNorm() + (x2 - z).squaredNorm() + (x3 - z).squaredNorm());
    dual = rho * std::sqrt(3.0) * (z - z_prev).norm();

    if (!z.allFinite()) throw NumericalError("sdp::solve: non-finite iterate");

    if (std::max(primal, dual) <= opts.tol && iter >= feas_recheck_at) {
      // Residuals alone leave slack to the reported-feasibility contract;
      // declare convergence only once the consensus iterate really meets it.
      if (feasible_as_membership(z, K)) {
        sol.converged = true;
        break;
      }
      feas_recheck_at = iter + 25;
    }

    // Residual balancing, checked sparsely so the penalty settles.
    if (iter % 20 == 0) {
      if (primal > 10.0 * dual && rho < 1e6 / n) {
        rho *= 2.0;
        u1 *= 0.5;
        u2 *= 0.5;
        u3 *= 0.5;
      } else if (dual > 10.0 * primal && rho > 1e-6 / n) {
        rho *= 0.5;
        u1 *= 2.0;
        u2 *= 2.0;
        u3 *= 2.0;
      }
    }
  }

  sol.Z = z;
  sol.objective = (a_sym.array() * z.array()).sum();
  sol.primal_residual = primal;
  sol.dual_residual = dual;
  sol.iterations = std::min(iter, opts.max_iter);
  if (g_observer) g_observer(problem, sol);
  return sol;
}

}  // namespace sparsekm
