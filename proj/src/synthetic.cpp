#include "longterm/synthetic.hpp"

#include <cmath>

#include "longterm/linalg.hpp"

namespace longterm {

namespace {

// stream tags for substream derivation from the master seed
constexpr std::uint64_t kTransitionsStream = 1;
constexpr std::uint64_t kExogenousStream = 2;
constexpr std::uint64_t kIndividualStream = 3;

}  // namespace

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = next_uniform();
    while (u1 <= 0.0) u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<Eigen::MatrixXd> generate_transitions(int d, int k, Rng& rng) {
    if (d < 1 || k < 2)
        throw ConfigError("generate_transitions needs d >= 1 and k >= 2");
    std::vector<Eigen::MatrixXd> matrices;
    matrices.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        Eigen::MatrixXd m(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c) m(r, c) = rng.next_uniform();
        for (Eigen::Index r = 0; r < d; ++r) m.row(r) /= m.row(r).sum();
        matrices.push_back(0.5 * Eigen::MatrixXd::Identity(d, d) + 0.5 * m);
    }
    return matrices;
}

void generate_exogenous(int T_total, int d, Rng& rng, Eigen::MatrixXd& walk,
                        Eigen::MatrixXd& scales) {
    if (T_total < 1)
        throw ConfigError("generate_exogenous needs T_total >= 1");
    const double walk_std = std::sqrt(1.5);
    const double log_scale_std = std::sqrt(0.5);
    walk.resize(d, T_total + 1);
    scales.resize(d, T_total + 1);
    for (Eigen::Index c = 0; c < d; ++c) walk(c, 0) = walk_std * rng.next_gaussian();
    for (int t = 1; t <= T_total; ++t)
        for (Eigen::Index c = 0; c < d; ++c)
            walk(c, t) = walk(c, t - 1) + walk_std * rng.next_gaussian();
    for (int t = 0; t <= T_total; ++t)
        for (Eigen::Index c = 0; c < d; ++c)
            scales(c, t) = std::exp(log_scale_std * rng.next_gaussian());
}

Eigen::VectorXd default_s0_mean(int d) {
    Eigen::VectorXd mu(d);
    for (int c = 0; c < d; ++c)
        mu[c] = 1.0 + static_cast<double>(c) / static_cast<double>(d);
    return mu;
}

RewardModel default_reward(int d) {
    return RewardModel{Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d))};
}

SyntheticTruth make_truth(int d, int k, int T_max, double alpha,
                          const Eigen::VectorXd& s0_mean, double noise_std,
                          std::uint64_t seed) {
    if (s0_mean.size() != d)
        throw ConfigError("s0_mean dimension does not match d");
    SyntheticTruth truth;
    Rng transitions_rng(Rng::derive(seed, {kTransitionsStream}));
    truth.matrices = generate_transitions(d, k, transitions_rng);
    Rng exo_rng(Rng::derive(seed, {kExogenousStream}));
    generate_exogenous(T_max, d, exo_rng, truth.walk, truth.scales);
    truth.z_scaled = truth.scales.cwiseProduct(truth.walk);
    truth.alpha = alpha;
    truth.s0_mean = s0_mean;
    truth.noise_std = noise_std;
    truth.seed = seed;
    return truth;
}

ExperimentDataset simulate_dataset(const SyntheticTruth& truth, int n_per_policy, int T,
                                   double alpha, bool use_raw_walk) {
    if (n_per_policy < 1)
        throw ConfigError("n_per_policy must be >= 1");
    if (T < 1 || T + 1 > truth.walk.cols())
        throw ConfigError("T must lie in [1, truth horizon]");
    const Eigen::Index d = truth.s0_mean.size();
    const int k = static_cast<int>(truth.matrices.size());
    const Eigen::MatrixXd& exo = use_raw_walk ? truth.walk : truth.z_scaled;

    std::vector<ObservationTrajectory> trajectories;
    trajectories.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(n_per_policy));
    for (int i = 0; i < k; ++i) {
        const auto& m = truth.matrices[static_cast<std::size_t>(i)];
        for (int j = 0; j < n_per_policy; ++j) {
            Rng rng(Rng::derive(truth.seed, {kIndividualStream, static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(j)}));
            // s_0 = mu + N(0, I): unit initial spread regardless of noise_std,
            // which keeps M identifiable even from noise-free transitions
            Eigen::VectorXd s = truth.s0_mean;
            for (Eigen::Index c = 0; c < d; ++c) s[c] += rng.next_gaussian();

            ObservationTrajectory tr;
            tr.individual_id = "p" + std::to_string(i) + "_i" + std::to_string(j);
            tr.policy_id = i;
            tr.observations.resize(d, T + 1);
            tr.observations.col(0) = s + alpha * exo.col(0);
            for (int t = 1; t <= T; ++t) {
                Eigen::VectorXd next = m * s;
                for (Eigen::Index c = 0; c < d; ++c)
                    next[c] += truth.noise_std * rng.next_gaussian();
                s = next;
                tr.observations.col(t) = s + alpha * exo.col(t);
            }
            trajectories.push_back(std::move(tr));
        }
    }
    return ExperimentDataset::build(std::move(trajectories));
}

Eigen::VectorXd ground_truth_delta(const SyntheticTruth& truth, const RewardModel& theta,
                                   double gamma) {
    const int k = static_cast<int>(truth.matrices.size());
    TransitionModel model{truth.matrices, gamma};
    std::vector<double> values(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const auto& m = truth.matrices[static_cast<std::size_t>(i)];
        if (gamma * spectral_radius(m) >= 1.0)
            throw DivergenceError("synthetic truth: rho(gamma*M) >= 1", model);
        values[static_cast<std::size_t>(i)] =
            resolvent_transpose_solve(m, gamma, theta.theta).dot(truth.s0_mean);
    }
    Eigen::VectorXd delta(k - 1);
    for (int i = 1; i < k; ++i)
        delta[i - 1] = values[static_cast<std::size_t>(i)] - values[0];
    return delta;
}

}  // namespace longterm
