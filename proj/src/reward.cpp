#include "longterm/reward.hpp"

#include <sstream>

#include "longterm/linalg.hpp"

namespace longterm {

RewardFit estimate_reward_coefficients(const ExperimentDataset& dataset) {
    if (!dataset.has_rewards())
        throw ValidationError("dataset carries no reward column; supply theta explicitly");

    const Eigen::Index d = dataset.dim();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd moment = Eigen::VectorXd::Zero(d);
    std::size_t samples = 0;
    for (const auto& tr : dataset.trajectories()) {
        gram.noalias() += tr.observations * tr.observations.transpose();
        moment.noalias() += tr.observations * (*tr.rewards);
        samples += static_cast<std::size_t>(tr.observations.cols());
    }

    const auto conditioning = spd_conditioning(gram);
    if (conditioning.rcond < 1e-12) {
        std::ostringstream msg;
        msg << "observation Gram matrix is numerically singular (rcond=" << conditioning.rcond
            << "); near-null direction [" << conditioning.null_direction.transpose() << "]";
        throw SingularityError(msg.str());
    }

    RewardFit fit;
    fit.gram_rcond = conditioning.rcond;
    fit.model.theta = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(moment);

    double residual_sq = 0.0;
    for (const auto& tr : dataset.trajectories())
        residual_sq +=
            (*tr.rewards - tr.observations.transpose() * fit.model.theta).squaredNorm();
    fit.residual_rms = std::sqrt(residual_sq / static_cast<double>(samples));
    return fit;
}

}  // namespace longterm
