#pragma once

#include <functional>
#include <vector>

#include "longterm/nonstationary.hpp"
#include "longterm/rng.hpp"
#include "longterm/types.hpp"

namespace longterm::testing {

inline ObservationTrajectory make_trajectory(const std::string& id, int policy,
                                             const Eigen::MatrixXd& observations) {
    ObservationTrajectory tr;
    tr.individual_id = id;
    tr.policy_id = policy;
    tr.observations = observations;
    return tr;
}

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.next_gaussian();
    return m;
}

/// Random square matrix rescaled to the requested spectral radius.
Eigen::MatrixXd random_matrix_with_radius(Rng& rng, Eigen::Index d, double radius);

/// Random dataset with i.i.d. gaussian observations; no dynamics implied.
ExperimentDataset random_dataset(Rng& rng, int d, int T, int k, int n_per_policy);

/// Characteristic polynomial coefficients by the Faddeev-LeVerrier recurrence,
/// roots by Durand-Kerner; returns the largest root modulus. Independent of
/// any eigensolver.
double spectral_radius_charpoly(const Eigen::MatrixXd& m);

/// Minimizes a smooth function by nonlinear conjugate gradients with central
/// finite-difference gradients and parabola-fit line searches (exact for
/// quadratics). Returns the minimizer.
Eigen::VectorXd minimize_fd_cg(const std::function<double(const Eigen::VectorXd&)>& f,
                               Eigen::VectorXd x, int max_iters = 2000, double fd_step = 1e-5,
                               double grad_tol = 1e-11);

/// Central finite-difference gradient.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step = 1e-6);

/// Sum-form reconstruction loss as a function of the stacked z vector.
std::function<double(const Eigen::VectorXd&)> loss_of_z(
    const std::vector<Eigen::MatrixXd>& matrices, const ExperimentDataset& dataset,
    double lambda_z, double lambda_m);

}  // namespace longterm::testing
