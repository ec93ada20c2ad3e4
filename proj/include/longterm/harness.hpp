#pragma once

#include <cstdint>
#include <string>

#include "longterm/nonstationary.hpp"
#include "longterm/types.hpp"

namespace longterm {

enum class Method { naive, stationary, nonstationary };

Method parse_method(const std::string& name);
std::string method_name(Method method);

struct EstimatorConfig {
    NonstationaryConfig ns;          // gamma here applies to all methods
    double stationary_ridge = 0.0;
    bool naive_scaled = true;        // divide the per-step average gap by 1 - gamma
};

/// Mean in-experiment reward gap per treatment, placed on the discounted-return
/// scale by 1/(1-gamma) (unscaled variant via naive_scaled=false).
Eigen::VectorXd naive_average_estimate(const ExperimentDataset& dataset,
                                       const RewardModel& theta, double gamma,
                                       bool discount_scaled = true);

Eigen::VectorXd run_method(const ExperimentDataset& dataset, Method method,
                           const RewardModel& theta, const EstimatorConfig& config);

struct SweepRow {
    std::string param;
    double value = 0.0;
    int rep = 0;
    std::string method;
    int policy = 0;  // treatment index, 1..k-1
    double delta_hat = 0.0;
    double delta_true = 0.0;
    double squared_error = 0.0;
    double abs_pct_error = 0.0;
    double wall_time_ms = 0.0;
    std::uint64_t seed = 0;
    std::string error;  // nonempty when the cell failed
};

struct SweepConfig {
    int n = 500;   // trajectories per policy
    int T = 10;
    int d = 8;
    int k = 2;
    double alpha = 1.0;
    double gamma = 0.99;
    double noise_std = 1.0;
    EstimatorConfig estimator;
    int workers = 1;
};

/// One synthetic truth + dataset per (value, rep) cell, evaluated by all three
/// methods against the closed-form ground truth. Replication seeds derive from
/// master_seed and the rep counter only, so a rep shares random numbers across
/// swept values (common random numbers) and results are schedule-independent.
std::vector<SweepRow> sweep(const std::string& param, const std::vector<double>& values,
                            int reps, const SweepConfig& base, std::uint64_t master_seed);

struct SummaryRow {
    std::string param;
    double value = 0.0;
    std::string method;
    double log10_mse = 0.0;
    double median_ape = 0.0;
    double ape_iqr = 0.0;
    int count = 0;
};

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& results);

double median(std::vector<double> values);

}  // namespace longterm
