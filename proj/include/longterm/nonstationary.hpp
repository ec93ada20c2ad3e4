#pragma once

#include <optional>

#include "longterm/types.hpp"

namespace longterm {

/// Shared exogenous sequence z_0..z_T; column t of z holds z_t.
struct ExogenousSeries {
    Eigen::MatrixXd z;  // d x (T+1)
};

struct NonstationaryConfig {
    double gamma = 0.99;
    // z-regularization weight; nullopt selects 1e-6 * n * T * mean||o||^2
    std::optional<double> lambda_z;
    double lambda_m = 0.0;   // shared ||M_i - I||_F^2 weight
    double tol = 1e-9;       // relative loss-decrease stopping threshold
    int max_iters = 200;
    double ridge = 0.0;      // Gram fallback for the M update
    // first transition index used by the M update; 0 uses all observed
    // transitions, 1 reproduces the update that skips the first step
    int t_start = 0;
};

struct FitDiagnostics {
    std::vector<double> spectral_radius_m;  // per policy, of M_i
    std::vector<double> spectral_norm_m;    // per policy, of M_i
    std::vector<double> gram_rcond;         // per policy, final M-update Gram
    double exogenous_rcond = -1.0;          // -1 when not computed (large system)
    double lambda_z = 0.0;
    double lambda_m = 0.0;
};

struct FitReport {
    TransitionModel model;
    ExogenousSeries exogenous;  // regularization-dependent up to gauge; effects are identified
    std::vector<double> loss_trace;  // one entry per block update, nonincreasing
    int iterations = 0;
    bool converged = false;
    std::vector<double> values;  // v_i, one per policy
    Eigen::VectorXd effects;     // v_i - v_0 for i = 1..k-1
    FitDiagnostics diagnostics;
};

/// The dT x d(T+1) block bidiagonal operator with -M on the block diagonal
/// and I on the superdiagonal: (A z) block t = z_{t+1} - M z_t.
Eigen::MatrixXd build_transition_operator(const Eigen::MatrixXd& m, int T);

/// Regularized reconstruction loss
///   sum_i sum_{j in I_i} sum_{t<T} ||o_{j,t+1} - z_{t+1} - M_i(o_{j,t} - z_t)||^2
///   + lambda_z ||z||^2 + lambda_m sum_i ||M_i - I||_F^2.
double loss(const std::vector<Eigen::MatrixXd>& matrices, const ExogenousSeries& exogenous,
            const ExperimentDataset& dataset, double lambda_z, double lambda_m);

/// Normal system (H, b) of the z subproblem: H = lambda_z I + sum_i n_i G_i,
/// b = sum_i G_i (sum_{j in I_i} o_j), with G_i = A_i' A_i.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> exogenous_normal_system(
    const std::vector<Eigen::MatrixXd>& matrices, const ExperimentDataset& dataset,
    double lambda_z);

/// Exact minimizer of loss over z with all M_i fixed.
ExogenousSeries solve_exogenous(const std::vector<Eigen::MatrixXd>& matrices,
                                const ExperimentDataset& dataset, double lambda_z,
                                double* rcond_out = nullptr);

/// Exact per-policy minimizer of loss over M_i with z fixed. ridge adds to the
/// Gram only; lambda_m shrinks towards the identity.
std::vector<Eigen::MatrixXd> solve_transitions(const ExogenousSeries& exogenous,
                                               const ExperimentDataset& dataset,
                                               double lambda_m, double ridge = 0.0,
                                               int t_start = 0,
                                               std::vector<double>* rcond_out = nullptr);

double default_lambda_z(const ExperimentDataset& dataset);

/// Plug-in value theta' (I - gamma M_i)^{-1} (mean o_0 in group i - z_0).
double value_nonstationary(const TransitionModel& model, const ExogenousSeries& exogenous,
                           const ExperimentDataset& dataset, const RewardModel& theta,
                           int policy);

/// Alternating minimization from z = 0: M update, z update, until the relative
/// loss decrease falls below tol or max_iters is reached; then evaluates
/// per-policy values and effects.
FitReport alternate_minimize(const ExperimentDataset& dataset, const RewardModel& theta,
                             const NonstationaryConfig& config);

}  // namespace longterm
