#include "longterm/linalg.hpp"

#include <Eigen/Eigenvalues>

#include "longterm/types.hpp"

namespace longterm {

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

SpdConditioning spd_conditioning(const Eigen::MatrixXd& symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
    const Eigen::VectorXd abs_eigs = solver.eigenvalues().cwiseAbs();
    SpdConditioning out;
    const double max_eig = abs_eigs.maxCoeff();
    out.rcond = max_eig > 0.0 ? abs_eigs.minCoeff() / max_eig : 0.0;
    Eigen::Index min_index = 0;
    abs_eigs.minCoeff(&min_index);
    out.null_direction = solver.eigenvectors().col(min_index);
    return out;
}

Eigen::VectorXd resolvent_transpose_solve(const Eigen::MatrixXd& m, double gamma,
                                          const Eigen::VectorXd& theta) {
    const Eigen::Index d = m.rows();
    const Eigen::MatrixXd system =
        (Eigen::MatrixXd::Identity(d, d) - gamma * m).transpose();
    return Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(theta);
}

Eigen::VectorXd solve_block_tridiagonal_spd(std::vector<Eigen::MatrixXd> diag,
                                            const std::vector<Eigen::MatrixXd>& upper,
                                            const Eigen::VectorXd& rhs) {
    const std::size_t blocks = diag.size();
    const Eigen::Index d = diag.front().rows();
    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors(blocks);
    Eigen::VectorXd y = rhs;

    // forward sweep: D_t <- D_t - U_{t-1}^T D_{t-1}^{-1} U_{t-1}
    for (std::size_t t = 0; t < blocks; ++t) {
        factors[t].compute(diag[t]);
        if (factors[t].info() != Eigen::Success)
            throw SingularityError("block tridiagonal system is not positive definite");
        if (t + 1 < blocks) {
            const Eigen::MatrixXd solved = factors[t].solve(upper[t]);  // D_t^{-1} U_t
            diag[t + 1].noalias() -= upper[t].transpose() * solved;
            y.segment(static_cast<Eigen::Index>(t + 1) * d, d).noalias() -=
                upper[t].transpose() *
                factors[t].solve(y.segment(static_cast<Eigen::Index>(t) * d, d));
        }
    }
    // back substitution
    Eigen::VectorXd x(rhs.size());
    for (std::size_t rt = 0; rt < blocks; ++rt) {
        const std::size_t t = blocks - 1 - rt;
        Eigen::VectorXd b = y.segment(static_cast<Eigen::Index>(t) * d, d);
        if (t + 1 < blocks)
            b.noalias() -= upper[t] * x.segment(static_cast<Eigen::Index>(t + 1) * d, d);
        x.segment(static_cast<Eigen::Index>(t) * d, d) = factors[t].solve(b);
    }
    return x;
}

}  // namespace longterm
