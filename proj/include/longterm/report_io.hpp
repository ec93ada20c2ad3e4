#pragma once

#include <iosfwd>
#include <string>

#include "longterm/harness.hpp"
#include "longterm/nonstationary.hpp"
#include "longterm/synthetic.hpp"

namespace longterm {

// FitReport JSON: matrices (row-major arrays), z (array of arrays, one per
// step), loss_trace, values, effects, diagnostics.
std::string fit_report_to_json(const FitReport& report);
void write_fit_report(const FitReport& report, const std::string& path);

// RewardModel file: {"theta": [..d floats..]}
RewardModel load_reward_model(const std::string& path);
void write_reward_model(const RewardModel& model, const std::string& path);

// Truth JSON: matrices, z_scaled, alpha, s0_mean, gamma_free_truth.delta, seed.
void write_truth(const SyntheticTruth& truth, const Eigen::VectorXd& delta, double gamma,
                 const std::string& path);

// Results CSV: param,value,rep,method,policy,delta_hat,delta_true,sq_err,ape,
// wall_ms,seed,error
void write_results_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_results_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> read_results_csv(const std::string& path);

void write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out);
void write_summary_csv(const std::vector<SummaryRow>& summary, const std::string& path);
std::string format_summary_table(const std::vector<SummaryRow>& summary);

/// Minimal line chart: log10 MSE vs swept value, one polyline per method.
std::string summary_svg(const std::vector<SummaryRow>& summary);

}  // namespace longterm
