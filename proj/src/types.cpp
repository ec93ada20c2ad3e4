#include "longterm/types.hpp"

#include <algorithm>
#include <unordered_set>

namespace longterm {

ExperimentDataset ExperimentDataset::build(std::vector<ObservationTrajectory> trajectories) {
    if (trajectories.empty())
        throw ValidationError("dataset is empty");

    const Eigen::Index d = trajectories.front().observations.rows();
    const Eigen::Index steps = trajectories.front().observations.cols();
    if (d < 1)
        throw ValidationError("observation dimension must be >= 1");
    if (steps < 2)
        throw ValidationError("trajectories need at least T+1 = 2 steps");

    const bool with_rewards = trajectories.front().rewards.has_value();
    std::unordered_set<std::string> seen_ids;
    int max_policy = -1;
    for (const auto& tr : trajectories) {
        if (tr.observations.rows() != d)
            throw ValidationError("individual '" + tr.individual_id +
                                  "': observation dimension differs from the rest of the dataset");
        if (tr.observations.cols() != steps)
            throw ValidationError("individual '" + tr.individual_id +
                                  "': trajectory length differs from the rest of the dataset");
        if (!tr.observations.allFinite())
            throw ValidationError("individual '" + tr.individual_id + "': non-finite observation");
        if (tr.policy_id < 0)
            throw ValidationError("individual '" + tr.individual_id + "': negative policy_id");
        if (tr.rewards.has_value() != with_rewards)
            throw ValidationError("individual '" + tr.individual_id +
                                  "': rewards present for some individuals but not all");
        if (with_rewards && tr.rewards->size() != steps)
            throw ValidationError("individual '" + tr.individual_id +
                                  "': rewards length does not equal T+1");
        if (!seen_ids.insert(tr.individual_id).second)
            throw ValidationError("duplicate individual_id '" + tr.individual_id + "'");
        max_policy = std::max(max_policy, tr.policy_id);
    }

    const int k = max_policy + 1;
    if (k < 2)
        throw ValidationError("effect estimation needs a control group and at least one "
                              "treatment group (found a single policy)");

    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < trajectories.size(); ++j)
        groups[static_cast<std::size_t>(trajectories[j].policy_id)].push_back(j);
    for (int i = 0; i < k; ++i)
        if (groups[static_cast<std::size_t>(i)].empty())
            throw ValidationError("policy " + std::to_string(i) + " has no individuals");

    ExperimentDataset out;
    out.d_ = d;
    out.horizon_ = static_cast<int>(steps) - 1;
    out.k_ = k;
    out.has_rewards_ = with_rewards;
    out.trajectories_ = std::move(trajectories);
    out.groups_ = std::move(groups);
    return out;
}

const std::vector<std::size_t>& ExperimentDataset::group(int policy) const {
    if (policy < 0 || policy >= k_)
        throw ConfigError("policy index " + std::to_string(policy) + " out of range [0, " +
                          std::to_string(k_) + ")");
    return groups_[static_cast<std::size_t>(policy)];
}

double ExperimentDataset::mean_squared_observation() const {
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& tr : trajectories_) {
        acc += tr.observations.squaredNorm();
        count += static_cast<std::size_t>(tr.observations.cols());
    }
    return acc / static_cast<double>(count);
}

Eigen::VectorXd mean_initial_observation(const ExperimentDataset& dataset, int policy) {
    const auto& members = dataset.group(policy);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dataset.dim());
    for (std::size_t j : members)
        mean += dataset.trajectory(j).observations.col(0);
    return mean / static_cast<double>(members.size());
}

}  // namespace longterm
