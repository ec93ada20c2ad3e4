#pragma once

#include <cstdint>

#include "longterm/rng.hpp"
#include "longterm/types.hpp"

namespace longterm {

/// Ground-truth parameters of the synthetic environment: row-normalized
/// transition matrices mixed with the identity, a random-walk exogenous
/// sequence with lognormal per-coordinate scaling, and the initial
/// endogenous mean.
struct SyntheticTruth {
    std::vector<Eigen::MatrixXd> matrices;  // k matrices, rows sum to 1
    Eigen::MatrixXd walk;      // d x (Tmax+1) raw random walk z_t
    Eigen::MatrixXd scales;    // d x (Tmax+1) per-coordinate e^{beta_t}
    Eigen::MatrixXd z_scaled;  // scales .* walk
    double alpha = 1.0;        // global exogenous scale
    Eigen::VectorXd s0_mean;
    double noise_std = 1.0;    // endogenous transition noise scale
    std::uint64_t seed = 0;
};

/// k matrices with entries U(0,1), rows normalized to sum 1, then mixed
/// with the identity at weight 0.5; rows still sum to 1, diagonal >= 0.5.
std::vector<Eigen::MatrixXd> generate_transitions(int d, int k, Rng& rng);

/// Random walk z_{t+1} = z_t + eta_t, eta ~ N(0, 1.5 I), z_0 ~ N(0, 1.5 I),
/// with per-coordinate scales alpha_t = e^{beta_t}, beta_t ~ N(0, 0.5 I).
void generate_exogenous(int T_total, int d, Rng& rng, Eigen::MatrixXd& walk,
                        Eigen::MatrixXd& scales);

SyntheticTruth make_truth(int d, int k, int T_max, double alpha,
                          const Eigen::VectorXd& s0_mean, double noise_std,
                          std::uint64_t seed);

/// Coordinate c of the default initial endogenous mean is 1 + c/d; distinct
/// coordinates keep the effects nonzero under row-stochastic dynamics.
Eigen::VectorXd default_s0_mean(int d);

/// Per individual j in policy i: s_0 = mu + N(0, I),
/// s_{t+1} = M_i s_t + noise_std * N(0, I), o_t = s_t + alpha * z~_t
/// (or the raw walk when use_raw_walk). Individual RNG substreams derive
/// from truth.seed, so output is schedule-independent.
ExperimentDataset simulate_dataset(const SyntheticTruth& truth, int n_per_policy, int T,
                                   double alpha, bool use_raw_walk = false);

/// Closed-form Delta_i = theta' [(I - gamma M_i)^{-1} - (I - gamma M_0)^{-1}] mu.
/// Independent of the exogenous series by construction.
Eigen::VectorXd ground_truth_delta(const SyntheticTruth& truth, const RewardModel& theta,
                                   double gamma);

/// Default synthetic reward: all-ones scaled by 1/d.
RewardModel default_reward(int d);

}  // namespace longterm
