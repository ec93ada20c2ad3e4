#pragma once

#include "longterm/types.hpp"

namespace longterm {

struct RewardFit {
    RewardModel model;
    double residual_rms = 0.0;
    double gram_rcond = 0.0;
};

/// OLS fit of r ~ theta' o over every (individual, step) pair.
/// Requires rewards in the dataset and a well-conditioned observation Gram.
RewardFit estimate_reward_coefficients(const ExperimentDataset& dataset);

}  // namespace longterm
