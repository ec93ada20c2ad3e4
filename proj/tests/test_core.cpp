#include <doctest.h>

#include <sstream>

#include "longterm/csv.hpp"
#include "longterm/reward.hpp"
#include "longterm/rng.hpp"
#include "longterm/types.hpp"
#include "test_support.hpp"

using namespace longterm;
using namespace longterm::testing;

namespace {

const char* kSmallCsv =
    "individual_id,policy_id,t,f0,f1\n"
    "a,0,0,1,2\n"
    "a,0,1,3,4\n"
    "a,0,2,5,6\n"
    "b,1,0,7,8\n"
    "b,1,1,9,10\n"
    "b,1,2,11,12\n";

}  // namespace

TEST_CASE("load_dataset parses a well-formed CSV") {
    std::istringstream in(kSmallCsv);
    const auto dataset = load_dataset(in);
    CHECK(dataset.size() == 2);
    CHECK(dataset.horizon() == 2);
    CHECK(dataset.dim() == 2);
    CHECK(dataset.num_policies() == 2);
    CHECK(dataset.trajectory(0).observations(0, 1) == 3.0);
    CHECK(dataset.trajectory(1).observations(1, 2) == 12.0);
    CHECK_FALSE(dataset.has_rewards());
}

TEST_CASE("load_dataset accepts out-of-order rows and a reward column") {
    std::istringstream in(
        "individual_id,policy_id,t,f0,r\n"
        "a,0,1,2,0.2\n"
        "a,0,0,1,0.1\n"
        "b,1,0,3,0.3\n"
        "b,1,1,4,0.4\n");
    const auto dataset = load_dataset(in);
    CHECK(dataset.has_rewards());
    CHECK(dataset.trajectory(0).observations(0, 0) == 1.0);
    CHECK((*dataset.trajectory(0).rewards)[1] == doctest::Approx(0.2));
}

TEST_CASE("load_dataset rejects a gap in the time index") {
    std::istringstream in(
        "individual_id,policy_id,t,f0\n"
        "7,0,0,1\n"
        "7,0,2,2\n"
        "8,1,0,3\n"
        "8,1,1,4\n");
    CHECK_THROWS_WITH_AS(load_dataset(in),
                         doctest::Contains("gap in time index"), ValidationError);
}

TEST_CASE("load_dataset reports duplicates, bad cells and ragged rows by row number") {
    SUBCASE("duplicate (individual, t)") {
        std::istringstream in(
            "individual_id,policy_id,t,f0\n"
            "a,0,0,1\n"
            "a,0,1,1\n"
            "a,0,1,2\n"
            "b,1,0,3\n"
            "b,1,1,3\n");
        CHECK_THROWS_WITH_AS(load_dataset(in), doctest::Contains("row 4"), ValidationError);
    }
    SUBCASE("non-numeric cell") {
        std::istringstream in(
            "individual_id,policy_id,t,f0\n"
            "a,0,0,oops\n");
        CHECK_THROWS_WITH_AS(load_dataset(in), doctest::Contains("row 2"), ValidationError);
    }
    SUBCASE("ragged feature columns") {
        std::istringstream in(
            "individual_id,policy_id,t,f0,f1\n"
            "a,0,0,1\n");
        CHECK_THROWS_WITH_AS(load_dataset(in), doctest::Contains("row 2"), ValidationError);
    }
    SUBCASE("negative policy_id") {
        std::istringstream in(
            "individual_id,policy_id,t,f0\n"
            "a,-1,0,1\n");
        CHECK_THROWS_WITH_AS(load_dataset(in),
                             doctest::Contains("policy_id out of range"), ValidationError);
    }
    SUBCASE("single policy group") {
        std::istringstream in(
            "individual_id,policy_id,t,f0\n"
            "a,0,0,1\n"
            "a,0,1,2\n");
        CHECK_THROWS_AS(load_dataset(in), ValidationError);
    }
}

TEST_CASE("save/load round-trip on random datasets") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_u64() % 4);
        const int T = 1 + static_cast<int>(rng.next_u64() % 5);
        const auto dataset = random_dataset(rng, d, T, 2, 3);

        std::ostringstream first;
        save_dataset(dataset, first);
        std::istringstream back(first.str());
        const auto reloaded = load_dataset(back);
        std::ostringstream second;
        save_dataset(reloaded, second);
        CHECK(first.str() == second.str());

        for (std::size_t j = 0; j < dataset.size(); ++j)
            CHECK(dataset.trajectory(j).observations ==
                  reloaded.trajectory(j).observations);
    }
}

TEST_CASE("dataset validation is idempotent") {
    std::istringstream in(kSmallCsv);
    const auto dataset = load_dataset(in);
    const auto again = ExperimentDataset::build(dataset.trajectories());
    CHECK(again.dim() == dataset.dim());
    CHECK(again.horizon() == dataset.horizon());
    CHECK(again.num_policies() == dataset.num_policies());
    for (std::size_t j = 0; j < dataset.size(); ++j)
        CHECK(again.trajectory(j).observations == dataset.trajectory(j).observations);
}

TEST_CASE("mean_initial_observation") {
    Eigen::MatrixXd o1(2, 2), o2(2, 2), o3(2, 2);
    o1 << 1, 0, 3, 0;
    o2 << 3, 0, 5, 0;
    o3 << -1, 0, 2, 0;
    const auto dataset = ExperimentDataset::build({
        make_trajectory("a", 0, o1),
        make_trajectory("b", 0, o2),
        make_trajectory("c", 1, o3),
    });

    SUBCASE("group mean") {
        const Eigen::VectorXd mean = mean_initial_observation(dataset, 0);
        CHECK(mean[0] == doctest::Approx(2.0));
        CHECK(mean[1] == doctest::Approx(4.0));
    }
    SUBCASE("single individual returns its own o_0") {
        const Eigen::VectorXd mean = mean_initial_observation(dataset, 1);
        CHECK(mean[0] == doctest::Approx(-1.0));
        CHECK(mean[1] == doctest::Approx(2.0));
    }
}

TEST_CASE("mean over concatenated groups is the size-weighted average of group means") {
    Rng rng(23);
    const auto dataset = random_dataset(rng, 3, 2, 2, 0 + 4);
    const Eigen::VectorXd m0 = mean_initial_observation(dataset, 0);
    const Eigen::VectorXd m1 = mean_initial_observation(dataset, 1);
    const double n0 = static_cast<double>(dataset.group_size(0));
    const double n1 = static_cast<double>(dataset.group_size(1));

    Eigen::VectorXd total = Eigen::VectorXd::Zero(3);
    for (const auto& tr : dataset.trajectories()) total += tr.observations.col(0);
    total /= (n0 + n1);
    CHECK((total - (n0 * m0 + n1 * m1) / (n0 + n1)).norm() < 1e-14);
}

TEST_CASE("mean_initial_observation via 1000-draw Monte Carlo") {
    Rng rng(29);
    Eigen::Vector2d mu(2.0, -1.0);
    std::vector<ObservationTrajectory> trajectories;
    for (int j = 0; j < 1000; ++j) {
        Eigen::MatrixXd obs = random_matrix(rng, 2, 2);
        obs.col(0) += mu;
        trajectories.push_back(make_trajectory("i" + std::to_string(j), j % 2, obs));
    }
    const auto dataset = ExperimentDataset::build(std::move(trajectories));
    for (int policy = 0; policy < 2; ++policy) {
        const Eigen::VectorXd mean = mean_initial_observation(dataset, policy);
        CHECK(std::abs(mean[0] - 2.0) < 0.15);
        CHECK(std::abs(mean[1] + 1.0) < 0.15);
    }
}

TEST_CASE("estimate_reward_coefficients") {
    Rng rng(31);

    SUBCASE("reward equal to feature 0 gives a one-hot theta") {
        auto dataset = random_dataset(rng, 3, 3, 2, 5);
        std::vector<ObservationTrajectory> trajectories = dataset.trajectories();
        for (auto& tr : trajectories)
            tr.rewards = tr.observations.row(0).transpose();
        const auto with_rewards = ExperimentDataset::build(std::move(trajectories));
        const auto fit = estimate_reward_coefficients(with_rewards);
        CHECK(std::abs(fit.model.theta[0] - 1.0) < 1e-10);
        CHECK(std::abs(fit.model.theta[1]) < 1e-10);
        CHECK(std::abs(fit.model.theta[2]) < 1e-10);
        CHECK(fit.residual_rms < 1e-10);
    }

    SUBCASE("zero rewards give zero theta") {
        auto dataset = random_dataset(rng, 2, 2, 2, 4);
        std::vector<ObservationTrajectory> trajectories = dataset.trajectories();
        for (auto& tr : trajectories)
            tr.rewards = Eigen::VectorXd::Zero(tr.observations.cols());
        const auto with_rewards = ExperimentDataset::build(std::move(trajectories));
        const auto fit = estimate_reward_coefficients(with_rewards);
        CHECK(fit.model.theta.norm() < 1e-14);
    }

    SUBCASE("generate-and-refit with noise, 1000 samples") {
        const int d = 4;
        Eigen::VectorXd theta_star = random_matrix(rng, d, 1);
        std::vector<ObservationTrajectory> trajectories;
        // 200 individuals x 5 steps = 1000 samples
        for (int j = 0; j < 200; ++j) {
            Eigen::MatrixXd obs = random_matrix(rng, d, 5);
            Eigen::VectorXd rewards = obs.transpose() * theta_star;
            for (Eigen::Index t = 0; t < rewards.size(); ++t)
                rewards[t] += 0.01 * rng.next_gaussian();
            auto tr = make_trajectory("i" + std::to_string(j), j % 2, obs);
            tr.rewards = rewards;
            trajectories.push_back(std::move(tr));
        }
        const auto dataset = ExperimentDataset::build(std::move(trajectories));
        const auto fit = estimate_reward_coefficients(dataset);
        CHECK((fit.model.theta - theta_star).norm() < 0.01);
    }

    SUBCASE("rank-deficient observations raise a singularity error") {
        // feature 1 always equals feature 0
        std::vector<ObservationTrajectory> trajectories;
        for (int j = 0; j < 4; ++j) {
            Eigen::MatrixXd obs(2, 3);
            obs.row(0) = random_matrix(rng, 1, 3);
            obs.row(1) = obs.row(0);
            auto tr = make_trajectory("i" + std::to_string(j), j % 2, obs);
            tr.rewards = Eigen::VectorXd::Zero(3);
            trajectories.push_back(std::move(tr));
        }
        const auto dataset = ExperimentDataset::build(std::move(trajectories));
        CHECK_THROWS_WITH_AS(estimate_reward_coefficients(dataset),
                             doctest::Contains("near-null direction"), SingularityError);
    }

    SUBCASE("invariant to trajectory ordering") {
        auto dataset = random_dataset(rng, 3, 3, 2, 6);
        std::vector<ObservationTrajectory> trajectories = dataset.trajectories();
        for (auto& tr : trajectories)
            tr.rewards = (tr.observations.transpose() * Eigen::Vector3d(1.0, -2.0, 0.5));
        auto forward = trajectories;
        std::reverse(trajectories.begin(), trajectories.end());
        const auto theta_fwd =
            estimate_reward_coefficients(ExperimentDataset::build(std::move(forward)));
        const auto theta_rev =
            estimate_reward_coefficients(ExperimentDataset::build(std::move(trajectories)));
        CHECK((theta_fwd.model.theta - theta_rev.model.theta).norm() < 1e-12);
    }
}
