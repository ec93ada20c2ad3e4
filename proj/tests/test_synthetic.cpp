#include <doctest.h>

#include <cmath>

#include "longterm/csv.hpp"
#include "longterm/linalg.hpp"
#include "longterm/stationary.hpp"
#include "longterm/synthetic.hpp"
#include "test_support.hpp"

using namespace longterm;
using namespace longterm::testing;

TEST_CASE("generate_transitions invariants") {
    Rng rng(7);
    for (int draw = 0; draw < 100; ++draw) {
        const auto matrices = generate_transitions(5, 2, rng);
        for (const auto& m : matrices) {
            for (Eigen::Index r = 0; r < 5; ++r) {
                CHECK(m.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(m(r, r) >= 0.5);
                for (Eigen::Index c = 0; c < 5; ++c) CHECK(m(r, c) >= 0.0);
            }
            // rows sum to 1 with nonnegative entries, so the radius is 1
            CHECK(spectral_radius(m) <= 1.0 + 1e-10);
            if (draw < 5) CHECK(spectral_radius_charpoly(m) <= 1.0 + 1e-8);
        }
    }
    CHECK_THROWS_AS(generate_transitions(0, 2, rng), ConfigError);
    CHECK_THROWS_AS(generate_transitions(3, 1, rng), ConfigError);
}

TEST_CASE("generate_exogenous moments") {
    Rng rng(11);
    const int T = 40, d = 6, draws = 300;
    double increment_var = 0.0, log_scale_var = 0.0;
    std::size_t n_inc = 0, n_scale = 0;
    for (int rep = 0; rep < draws; ++rep) {
        Eigen::MatrixXd walk, scales;
        generate_exogenous(T, d, rng, walk, scales);
        for (int t = 1; t <= T; ++t)
            for (int c = 0; c < d; ++c) {
                const double inc = walk(c, t) - walk(c, t - 1);
                increment_var += inc * inc;
                ++n_inc;
            }
        for (int t = 0; t <= T; ++t)
            for (int c = 0; c < d; ++c) {
                const double beta = std::log(scales(c, t));
                log_scale_var += beta * beta;
                ++n_scale;
            }
    }
    increment_var /= static_cast<double>(n_inc);
    log_scale_var /= static_cast<double>(n_scale);
    CHECK(increment_var == doctest::Approx(1.5).epsilon(0.05));
    CHECK(log_scale_var == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("make_truth is deterministic in the seed and scales the walk") {
    const auto a = make_truth(4, 3, 10, 2.0, default_s0_mean(4), 1.0, 42);
    const auto b = make_truth(4, 3, 10, 2.0, default_s0_mean(4), 1.0, 42);
    CHECK((a.walk - b.walk).norm() == 0.0);
    CHECK((a.scales - b.scales).norm() == 0.0);
    for (int i = 0; i < 3; ++i) CHECK((a.matrices[i] - b.matrices[i]).norm() == 0.0);
    CHECK((a.z_scaled - a.scales.cwiseProduct(a.walk)).norm() == 0.0);

    const auto other = make_truth(4, 3, 10, 2.0, default_s0_mean(4), 1.0, 43);
    CHECK((a.walk - other.walk).norm() > 0.0);

    CHECK_THROWS_AS(make_truth(4, 3, 10, 1.0, default_s0_mean(3), 1.0, 42), ConfigError);
}

TEST_CASE("simulate_dataset") {
    const auto truth = make_truth(3, 2, 6, 1.5, default_s0_mean(3), 1.0, 5);

    SUBCASE("alpha=0, noise_std=0 gives exact endogenous dynamics") {
        auto pure = truth;
        pure.noise_std = 0.0;
        const auto ds = simulate_dataset(pure, 4, 6, 0.0);
        for (const auto& tr : ds.trajectories()) {
            const auto& m = truth.matrices[static_cast<std::size_t>(tr.policy_id)];
            for (int t = 0; t < 6; ++t)
                CHECK((tr.observations.col(t + 1) - m * tr.observations.col(t)).norm() <
                      1e-12);
        }
    }

    SUBCASE("every individual shares the same additive exogenous term") {
        // same truth and seed with alpha on/off: the per-individual endogenous
        // paths coincide, so the difference isolates alpha * z~_t
        const auto with = simulate_dataset(truth, 3, 6, 1.5);
        const auto without = simulate_dataset(truth, 3, 6, 0.0);
        for (std::size_t j = 0; j < with.size(); ++j) {
            const Eigen::MatrixXd diff =
                with.trajectory(j).observations - without.trajectory(j).observations;
            CHECK((diff - 1.5 * truth.z_scaled.leftCols(7)).norm() < 1e-12);
        }
    }

    SUBCASE("raw walk variant uses the unscaled walk") {
        const auto scaled = simulate_dataset(truth, 2, 6, 1.0);
        const auto raw = simulate_dataset(truth, 2, 6, 1.0, true);
        const Eigen::MatrixXd diff =
            scaled.trajectory(0).observations - raw.trajectory(0).observations;
        CHECK((diff - (truth.z_scaled - truth.walk).leftCols(7)).norm() < 1e-12);
    }

    SUBCASE("deterministic, schedule independent, and balanced") {
        const auto a = simulate_dataset(truth, 5, 6, 1.5);
        const auto b = simulate_dataset(truth, 5, 6, 1.5);
        CHECK(a.size() == 10);
        CHECK(a.group_size(0) == 5);
        CHECK(a.group_size(1) == 5);
        for (std::size_t j = 0; j < a.size(); ++j)
            CHECK((a.trajectory(j).observations - b.trajectory(j).observations).norm() ==
                  0.0);
        // a shorter horizon is a prefix of the longer simulation
        const auto shorter = simulate_dataset(truth, 5, 3, 1.5);
        CHECK((shorter.trajectory(0).observations -
               a.trajectory(0).observations.leftCols(4))
                  .norm() == 0.0);
    }

    SUBCASE("rejects bad horizons") {
        CHECK_THROWS_AS(simulate_dataset(truth, 2, 0, 1.0), ConfigError);
        CHECK_THROWS_AS(simulate_dataset(truth, 2, 7, 1.0), ConfigError);
        CHECK_THROWS_AS(simulate_dataset(truth, 0, 6, 1.0), ConfigError);
    }

    SUBCASE("round-trips through CSV") {
        const auto ds = simulate_dataset(truth, 4, 6, 1.5);
        std::stringstream buffer;
        save_dataset(ds, buffer);
        const auto reloaded = load_dataset(buffer);
        for (std::size_t j = 0; j < ds.size(); ++j)
            CHECK((ds.trajectory(j).observations - reloaded.trajectory(j).observations)
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
    }
}

TEST_CASE("stationary refit recovers the transition matrices at alpha=0") {
    const auto truth = make_truth(2, 2, 10, 0.0, default_s0_mean(2), 1.0, 99);
    const auto ds = simulate_dataset(truth, 500, 10, 0.0);
    const auto fit = fit_stationary(ds);
    for (int i = 0; i < 2; ++i)
        CHECK((fit.model.matrices[static_cast<std::size_t>(i)] -
               truth.matrices[static_cast<std::size_t>(i)])
                  .norm() < 0.05);
}

TEST_CASE("ground_truth_delta") {
    SUBCASE("identical policies have zero effect") {
        auto truth = make_truth(4, 2, 5, 1.0, default_s0_mean(4), 1.0, 3);
        truth.matrices[1] = truth.matrices[0];
        CHECK(ground_truth_delta(truth, default_reward(4), 0.9)[0] == 0.0);
    }

    SUBCASE("scalar hand example") {
        // d=1: v_i = theta * mu / (1 - gamma M_i); M = {0.5, 0.8}, gamma = 0.5,
        // mu = 1, theta = 1 -> 1/(1-0.4) - 1/(1-0.25) = 5/3 - 4/3 = 1/3
        SyntheticTruth truth;
        truth.matrices = {Eigen::MatrixXd::Constant(1, 1, 0.5),
                          Eigen::MatrixXd::Constant(1, 1, 0.8)};
        truth.s0_mean = Eigen::VectorXd::Ones(1);
        const RewardModel theta{Eigen::VectorXd::Ones(1)};
        CHECK(ground_truth_delta(truth, theta, 0.5)[0] ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("independent of alpha and the exogenous draw") {
        const auto a = make_truth(4, 3, 8, 0.5, default_s0_mean(4), 1.0, 17);
        auto b = a;
        b.alpha = 8.0;
        b.walk.setRandom();
        const RewardModel theta = default_reward(4);
        CHECK((ground_truth_delta(a, theta, 0.95) - ground_truth_delta(b, theta, 0.95))
                  .norm() == 0.0);
    }

    SUBCASE("matches a Monte Carlo rollout within three standard errors") {
        const int d = 2, n = 20000, steps = 200;
        const double gamma = 0.9;
        const auto truth = make_truth(d, 2, 5, 1.0, default_s0_mean(d), 1.0, 23);
        const RewardModel theta = default_reward(d);
        const double closed = ground_truth_delta(truth, theta, gamma)[0];

        Rng rng(29);
        std::vector<double> means(2), vars(2);
        for (int i = 0; i < 2; ++i) {
            const auto& m = truth.matrices[static_cast<std::size_t>(i)];
            double sum = 0.0, sum_sq = 0.0;
            for (int j = 0; j < n; ++j) {
                Eigen::VectorXd s = truth.s0_mean + random_matrix(rng, d, 1);
                double ret = 0.0, discount = 1.0;
                for (int t = 0; t < steps; ++t) {
                    ret += discount * theta.theta.dot(s);
                    s = m * s + random_matrix(rng, d, 1);
                    discount *= gamma;
                }
                sum += ret;
                sum_sq += ret * ret;
            }
            means[static_cast<std::size_t>(i)] = sum / n;
            vars[static_cast<std::size_t>(i)] =
                (sum_sq - sum * sum / n) / (n - 1.0);
        }
        const double mc = means[1] - means[0];
        const double se = std::sqrt((vars[0] + vars[1]) / n);
        CHECK(std::abs(mc - closed) <= 3.0 * se);
    }
}

TEST_CASE("default_s0_mean and default_reward") {
    const Eigen::VectorXd mu = default_s0_mean(4);
    for (int c = 0; c < 4; ++c) CHECK(mu[c] == doctest::Approx(1.0 + c / 4.0));
    const RewardModel theta = default_reward(5);
    CHECK(theta.theta.sum() == doctest::Approx(1.0));
    CHECK(theta.theta.minCoeff() == theta.theta.maxCoeff());
}
