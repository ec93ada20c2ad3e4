#pragma once

#include <Eigen/Dense>
#include <vector>

namespace longterm {

/// Largest eigenvalue modulus, via full eigendecomposition.
double spectral_radius(const Eigen::MatrixXd& m);

/// Operator 2-norm (largest singular value).
double spectral_norm(const Eigen::MatrixXd& m);

struct SpdConditioning {
    double rcond = 0.0;             // min |eig| / max |eig|
    Eigen::VectorXd null_direction; // eigenvector of the smallest eigenvalue
};

SpdConditioning spd_conditioning(const Eigen::MatrixXd& symmetric);

/// Solves (I - gamma*M)^T w = theta by LU with partial pivoting.
/// Throws DivergenceError via callers; the caller checks rho(gamma*M) first.
Eigen::VectorXd resolvent_transpose_solve(const Eigen::MatrixXd& m, double gamma,
                                          const Eigen::VectorXd& theta);

/// Symmetric positive definite block tridiagonal solve by block Cholesky
/// (sequential Schur complements). diag[t] is the t-th diagonal block,
/// upper[t] the (t, t+1) block; rhs is stacked conformally.
Eigen::VectorXd solve_block_tridiagonal_spd(std::vector<Eigen::MatrixXd> diag,
                                            const std::vector<Eigen::MatrixXd>& upper,
                                            const Eigen::VectorXd& rhs);

}  // namespace longterm
