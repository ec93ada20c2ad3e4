#pragma once

#include "longterm/types.hpp"

namespace longterm {

struct StationaryFit {
    TransitionModel model;
    std::vector<double> gram_rcond;    // per policy
    std::vector<double> residual_rms;  // per policy, per-transition RMS
};

/// Per-policy OLS transition fit over all observed transitions t = 0..T-1.
/// ridge adds ridge*I to the Gram only; ridge=0 is the plain OLS solution.
StationaryFit fit_stationary(const ExperimentDataset& dataset, double ridge = 0.0);

/// theta' (I - gamma M_i)^{-1} o0_mean. Throws DivergenceError when
/// rho(gamma M_i) >= 1.
double value_stationary(const TransitionModel& model, int policy, const RewardModel& theta,
                        const Eigen::VectorXd& o0_mean);

/// Effects v_i - v_0 for i = 1..k-1 under the stationary model.
Eigen::VectorXd estimate_effects_stationary(const ExperimentDataset& dataset,
                                            const RewardModel& theta, double gamma,
                                            double ridge = 0.0);

}  // namespace longterm
