#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace longterm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
struct ValidationError : Error {
    using Error::Error;
};

/// A linear system whose reciprocal condition number fell below tolerance.
struct SingularityError : Error {
    using Error::Error;
};

/// Bad configuration (flags, parameter ranges, method names).
struct ConfigError : Error {
    using Error::Error;
};

struct ObservationTrajectory {
    std::string individual_id;
    int policy_id = 0;
    // d x (T+1); column t holds o_t
    Eigen::MatrixXd observations;
    // length T+1 when present
    std::optional<Eigen::VectorXd> rewards;
};

/// Validated collection of in-experiment trajectories. Immutable after build().
class ExperimentDataset {
  public:
    static ExperimentDataset build(std::vector<ObservationTrajectory> trajectories);

    Eigen::Index dim() const { return d_; }
    int horizon() const { return horizon_; }          // T: steps after step 0
    int num_policies() const { return k_; }
    std::size_t size() const { return trajectories_.size(); }
    bool has_rewards() const { return has_rewards_; }

    const std::vector<ObservationTrajectory>& trajectories() const { return trajectories_; }
    const ObservationTrajectory& trajectory(std::size_t j) const { return trajectories_[j]; }
    const std::vector<std::size_t>& group(int policy) const;
    std::size_t group_size(int policy) const { return group(policy).size(); }

    /// Mean squared observation norm over all (j, t); the data scale used for
    /// default regularization weights.
    double mean_squared_observation() const;

  private:
    ExperimentDataset() = default;
    Eigen::Index d_ = 0;
    int horizon_ = 0;
    int k_ = 0;
    bool has_rewards_ = false;
    std::vector<ObservationTrajectory> trajectories_;
    std::vector<std::vector<std::size_t>> groups_;
};

struct RewardModel {
    Eigen::VectorXd theta;
};

struct TransitionModel {
    std::vector<Eigen::MatrixXd> matrices;  // M_0 .. M_{k-1}, each d x d
    double gamma = 0.99;
};

/// Thrown when rho(gamma * M_i) >= 1 and a discounted value is requested.
struct DivergenceError : Error {
    DivergenceError(const std::string& msg, TransitionModel model)
        : Error(msg), model(std::move(model)) {}
    TransitionModel model;
};

Eigen::VectorXd mean_initial_observation(const ExperimentDataset& dataset, int policy);

}  // namespace longterm
