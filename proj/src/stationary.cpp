#include "longterm/stationary.hpp"

#include <sstream>

#include "longterm/linalg.hpp"

namespace longterm {

StationaryFit fit_stationary(const ExperimentDataset& dataset, double ridge) {
    const Eigen::Index d = dataset.dim();
    const int T = dataset.horizon();
    StationaryFit fit;
    fit.model.matrices.reserve(static_cast<std::size_t>(dataset.num_policies()));

    for (int i = 0; i < dataset.num_policies(); ++i) {
        Eigen::MatrixXd gram = ridge * Eigen::MatrixXd::Identity(d, d);
        Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(d, d);
        std::size_t transitions = 0;
        for (std::size_t j : dataset.group(i)) {
            const auto& obs = dataset.trajectory(j).observations;
            const auto past = obs.leftCols(T);
            const auto next = obs.rightCols(T);
            gram.noalias() += past * past.transpose();
            cross.noalias() += next * past.transpose();
            transitions += static_cast<std::size_t>(T);
        }
        const auto conditioning = spd_conditioning(gram);
        if (conditioning.rcond < 1e-12) {
            std::ostringstream msg;
            msg << "policy " << i << ": transition Gram matrix is numerically singular (rcond="
                << conditioning.rcond << "); consider ridge > 0";
            throw SingularityError(msg.str());
        }
        // M gram = cross  =>  gram M^T = cross^T (gram symmetric)
        Eigen::MatrixXd m =
            Eigen::LDLT<Eigen::MatrixXd>(gram).solve(cross.transpose()).transpose();

        double residual_sq = 0.0;
        for (std::size_t j : dataset.group(i)) {
            const auto& obs = dataset.trajectory(j).observations;
            residual_sq += (obs.rightCols(T) - m * obs.leftCols(T)).squaredNorm();
        }
        fit.gram_rcond.push_back(conditioning.rcond);
        fit.residual_rms.push_back(std::sqrt(residual_sq / static_cast<double>(transitions)));
        fit.model.matrices.push_back(std::move(m));
    }
    return fit;
}

double value_stationary(const TransitionModel& model, int policy, const RewardModel& theta,
                        const Eigen::VectorXd& o0_mean) {
    const auto& m = model.matrices.at(static_cast<std::size_t>(policy));
    const double radius = spectral_radius(m);
    if (model.gamma * radius >= 1.0) {
        std::ostringstream msg;
        msg << "policy " << policy << ": discounted value diverges, rho(gamma*M) = "
            << model.gamma * radius
            << " >= 1 (the closed form needs the spectral norm of M below 1/gamma)";
        throw DivergenceError(msg.str(), model);
    }
    return resolvent_transpose_solve(m, model.gamma, theta.theta).dot(o0_mean);
}

Eigen::VectorXd estimate_effects_stationary(const ExperimentDataset& dataset,
                                            const RewardModel& theta, double gamma,
                                            double ridge) {
    StationaryFit fit = fit_stationary(dataset, ridge);
    fit.model.gamma = gamma;
    const int k = dataset.num_policies();
    std::vector<double> values(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        values[static_cast<std::size_t>(i)] =
            value_stationary(fit.model, i, theta, mean_initial_observation(dataset, i));
    Eigen::VectorXd effects(k - 1);
    for (int i = 1; i < k; ++i)
        effects[i - 1] = values[static_cast<std::size_t>(i)] - values[0];
    return effects;
}

}  // namespace longterm
