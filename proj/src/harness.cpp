#include "longterm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <thread>
#include <tuple>

#include "longterm/rng.hpp"
#include "longterm/stationary.hpp"
#include "longterm/synthetic.hpp"

namespace longterm {

namespace {

constexpr double kApeDenominatorGuard = 1e-12;
constexpr std::uint64_t kCellStream = 0xCE11;

double quantile(std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

Method parse_method(const std::string& name) {
    if (name == "naive") return Method::naive;
    if (name == "stationary") return Method::stationary;
    if (name == "nonstationary") return Method::nonstationary;
    throw ConfigError("unknown method '" + name + "' (expected naive, stationary "
                      "or nonstationary)");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::naive: return "naive";
        case Method::stationary: return "stationary";
        default: return "nonstationary";
    }
}

Eigen::VectorXd naive_average_estimate(const ExperimentDataset& dataset,
                                       const RewardModel& theta, double gamma,
                                       bool discount_scaled) {
    const int k = dataset.num_policies();
    std::vector<double> mean_reward(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t j : dataset.group(i)) {
            const auto& obs = dataset.trajectory(j).observations;
            acc += (obs.transpose() * theta.theta).sum();
            count += static_cast<std::size_t>(obs.cols());
        }
        mean_reward[static_cast<std::size_t>(i)] = acc / static_cast<double>(count);
    }
    const double scale = discount_scaled ? 1.0 / (1.0 - gamma) : 1.0;
    Eigen::VectorXd effects(k - 1);
    for (int i = 1; i < k; ++i)
        effects[i - 1] = scale * (mean_reward[static_cast<std::size_t>(i)] - mean_reward[0]);
    return effects;
}

Eigen::VectorXd run_method(const ExperimentDataset& dataset, Method method,
                           const RewardModel& theta, const EstimatorConfig& config) {
    switch (method) {
        case Method::naive:
            return naive_average_estimate(dataset, theta, config.ns.gamma,
                                          config.naive_scaled);
        case Method::stationary:
            return estimate_effects_stationary(dataset, theta, config.ns.gamma,
                                               config.stationary_ridge);
        default:
            return alternate_minimize(dataset, theta, config.ns).effects;
    }
}

std::vector<SweepRow> sweep(const std::string& param, const std::vector<double>& values,
                            int reps, const SweepConfig& base, std::uint64_t master_seed) {
    if (values.empty())
        throw ConfigError("sweep needs a nonempty value grid");
    if (reps < 1)
        throw ConfigError("sweep needs reps >= 1");
    if (param != "n" && param != "T" && param != "d" && param != "alpha")
        throw ConfigError("unknown sweep parameter '" + param +
                          "' (expected n, T, d or alpha)");

    const int treatments = base.k - 1;
    const std::size_t methods = 3;
    const std::size_t cells = values.size() * static_cast<std::size_t>(reps);
    std::vector<SweepRow> rows(cells * methods * static_cast<std::size_t>(treatments));

    auto run_cell = [&](std::size_t cell) {
        const std::size_t value_index = cell / static_cast<std::size_t>(reps);
        const int rep = static_cast<int>(cell % static_cast<std::size_t>(reps));
        const double value = values[value_index];

        SweepConfig cfg = base;
        if (param == "n") cfg.n = static_cast<int>(value);
        else if (param == "T") cfg.T = static_cast<int>(value);
        else if (param == "d") cfg.d = static_cast<int>(value);
        else cfg.alpha = value;
        cfg.estimator.ns.gamma = cfg.gamma;

        const std::uint64_t seed =
            Rng::derive(master_seed, {kCellStream, static_cast<std::uint64_t>(rep)});
        const std::size_t row_base =
            cell * methods * static_cast<std::size_t>(treatments);

        auto fill_error = [&](std::size_t method_index, const std::string& what) {
            for (int p = 1; p < cfg.k; ++p) {
                SweepRow& row = rows[row_base + method_index * treatments +
                                     static_cast<std::size_t>(p - 1)];
                row = {param, value, rep, method_name(static_cast<Method>(method_index)),
                       p, 0.0, 0.0, 0.0, 0.0, 0.0, seed, what};
            }
        };

        Eigen::VectorXd delta_true;
        std::optional<ExperimentDataset> dataset;
        try {
            const auto truth = make_truth(cfg.d, cfg.k, cfg.T, cfg.alpha,
                                          default_s0_mean(cfg.d), cfg.noise_std, seed);
            delta_true = ground_truth_delta(truth, default_reward(cfg.d), cfg.gamma);
            dataset = simulate_dataset(truth, cfg.n, cfg.T, cfg.alpha);
        } catch (const std::exception& e) {
            for (std::size_t method_index = 0; method_index < methods; ++method_index)
                fill_error(method_index, e.what());
            return;
        }
        const RewardModel theta = default_reward(cfg.d);

        for (std::size_t method_index = 0; method_index < methods; ++method_index) {
            const Method method = static_cast<Method>(method_index);
            try {
                const auto start = std::chrono::steady_clock::now();
                const Eigen::VectorXd estimate =
                    run_method(*dataset, method, theta, cfg.estimator);
                const double wall_ms =
                    std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
                for (int p = 1; p < cfg.k; ++p) {
                    SweepRow& row = rows[row_base + method_index * treatments +
                                         static_cast<std::size_t>(p - 1)];
                    row.param = param;
                    row.value = value;
                    row.rep = rep;
                    row.method = method_name(method);
                    row.policy = p;
                    row.delta_hat = estimate[p - 1];
                    row.delta_true = delta_true[p - 1];
                    const double err = row.delta_hat - row.delta_true;
                    row.squared_error = err * err;
                    row.abs_pct_error =
                        std::abs(err) / std::max(std::abs(row.delta_true),
                                                 kApeDenominatorGuard);
                    row.wall_time_ms = wall_ms;
                    row.seed = seed;
                }
            } catch (const std::exception& e) {
                fill_error(method_index, e.what());
            }
        }
    };

    const int workers = std::max(1, base.workers);
    if (workers == 1) {
        for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t cell = next.fetch_add(1);
                    if (cell >= cells) break;
                    run_cell(cell);
                }
            });
        for (auto& t : pool) t.join();
    }
    return rows;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return quantile(values, 0.5);
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& results) {
    if (results.empty())
        throw ConfigError("summarize needs nonempty results");
    std::map<std::tuple<std::string, double, std::string>,
             std::pair<std::vector<double>, std::vector<double>>> buckets;
    for (const auto& row : results) {
        if (!row.error.empty()) continue;
        auto& bucket = buckets[{row.param, row.value, row.method}];
        bucket.first.push_back(row.squared_error);
        bucket.second.push_back(row.abs_pct_error);
    }
    std::vector<SummaryRow> summary;
    summary.reserve(buckets.size());
    for (auto& [key, bucket] : buckets) {
        auto& [sq_errs, apes] = bucket;
        SummaryRow out;
        out.param = std::get<0>(key);
        out.value = std::get<1>(key);
        out.method = std::get<2>(key);
        out.count = static_cast<int>(sq_errs.size());
        const double mse =
            std::accumulate(sq_errs.begin(), sq_errs.end(), 0.0) /
            static_cast<double>(sq_errs.size());
        out.log10_mse = std::log10(mse);
        std::sort(apes.begin(), apes.end());
        out.median_ape = quantile(apes, 0.5);
        out.ape_iqr = quantile(apes, 0.75) - quantile(apes, 0.25);
        summary.push_back(std::move(out));
    }
    return summary;
}

}  // namespace longterm
