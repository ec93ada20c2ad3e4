#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "longterm/csv.hpp"
#include "longterm/harness.hpp"
#include "longterm/report_io.hpp"
#include "longterm/reward.hpp"
#include "longterm/stationary.hpp"
#include "longterm/synthetic.hpp"

namespace {

using namespace longterm;

NonstationaryConfig load_ns_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    nlohmann::json j;
    in >> j;
    NonstationaryConfig cfg;
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("lambda_z")) cfg.lambda_z = j["lambda_z"].get<double>();
    if (j.contains("lambda_m")) cfg.lambda_m = j["lambda_m"].get<double>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("max_iters")) cfg.max_iters = j["max_iters"].get<int>();
    if (j.contains("ridge")) cfg.ridge = j["ridge"].get<double>();
    if (j.contains("t_start")) cfg.t_start = j["t_start"].get<int>();
    return cfg;
}

struct GenArgs {
    int d = 4, k = 2, n = 100, T = 10;
    double alpha = 1.0, gamma = 0.99, noise_std = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> s0_mean;
    bool raw_walk = false;
    std::string out_csv = "dataset.csv", out_truth = "truth.json";
};

int cmd_gen_synthetic(const GenArgs& args) {
    Eigen::VectorXd mu;
    if (args.s0_mean.empty()) {
        mu = default_s0_mean(args.d);
    } else if (args.s0_mean.size() == 1) {
        mu = Eigen::VectorXd::Constant(args.d, args.s0_mean[0]);
    } else if (static_cast<int>(args.s0_mean.size()) == args.d) {
        mu = Eigen::Map<const Eigen::VectorXd>(args.s0_mean.data(), args.d);
    } else {
        throw ConfigError("--s0-mean needs 1 or d values");
    }

    const auto truth =
        make_truth(args.d, args.k, args.T, args.alpha, mu, args.noise_std, args.seed);
    const auto dataset = simulate_dataset(truth, args.n, args.T, args.alpha, args.raw_walk);
    const auto delta = ground_truth_delta(truth, default_reward(args.d), args.gamma);

    save_dataset(dataset, args.out_csv);
    write_truth(truth, delta, args.gamma, args.out_truth);
    std::cout << "dataset: " << args.out_csv << "\n" << "truth:   " << args.out_truth << "\n";
    std::cout << "ground-truth delta:";
    for (Eigen::Index i = 0; i < delta.size(); ++i) std::cout << ' ' << delta[i];
    std::cout << "\n";
    return 0;
}

struct EstimateArgs {
    std::string method = "nonstationary";
    std::string data;
    std::string out = "report.json";
    std::string config_path;
    double gamma = 0.99;
    bool gamma_set = false;  // only an explicit --gamma overrides a config file
    int reward_feature = -1;
    std::string reward_file;
    bool fit_reward = false;
    double lambda_z = -1.0;  // negative selects the data-scaled default
    double lambda_m = 0.0, tol = 1e-9, ridge = 0.0;
    int max_iters = 200, t_start = 0;
    bool unscaled_naive = false;
};

RewardModel resolve_reward(const EstimateArgs& args, const ExperimentDataset& dataset) {
    const int modes = (args.reward_feature >= 0 ? 1 : 0) +
                      (!args.reward_file.empty() ? 1 : 0) + (args.fit_reward ? 1 : 0);
    if (modes != 1)
        throw ConfigError("choose exactly one of --reward-feature, --reward-file, "
                          "--fit-reward");
    if (args.reward_feature >= 0) {
        if (args.reward_feature >= dataset.dim())
            throw ConfigError("--reward-feature out of range");
        RewardModel model;
        model.theta = Eigen::VectorXd::Zero(dataset.dim());
        model.theta[args.reward_feature] = 1.0;
        return model;
    }
    if (!args.reward_file.empty()) {
        RewardModel model = load_reward_model(args.reward_file);
        if (model.theta.size() != dataset.dim())
            throw ConfigError("reward coefficient dimension does not match dataset");
        return model;
    }
    return estimate_reward_coefficients(dataset).model;
}

int cmd_estimate(const EstimateArgs& args) {
    const auto dataset = load_dataset(args.data);
    const RewardModel theta = resolve_reward(args, dataset);

    NonstationaryConfig ns;
    if (!args.config_path.empty()) ns = load_ns_config(args.config_path);
    if (args.config_path.empty() || args.gamma_set) ns.gamma = args.gamma;
    if (args.lambda_z >= 0.0) ns.lambda_z = args.lambda_z;
    if (args.config_path.empty()) {
        ns.lambda_m = args.lambda_m;
        ns.tol = args.tol;
        ns.max_iters = args.max_iters;
        ns.ridge = args.ridge;
        ns.t_start = args.t_start;
    }

    const Method method = parse_method(args.method);
    FitReport report;
    if (method == Method::nonstationary) {
        report = alternate_minimize(dataset, theta, ns);
    } else {
        report.model.gamma = ns.gamma;
        report.exogenous.z =
            Eigen::MatrixXd::Zero(dataset.dim(), dataset.horizon() + 1);
        if (method == Method::stationary) {
            auto fit = fit_stationary(dataset, args.ridge);
            report.model.matrices = std::move(fit.model.matrices);
            report.diagnostics.gram_rcond = std::move(fit.gram_rcond);
            for (int i = 0; i < dataset.num_policies(); ++i)
                report.values.push_back(value_stationary(
                    report.model, i, theta, mean_initial_observation(dataset, i)));
            report.effects.resize(dataset.num_policies() - 1);
            for (int i = 1; i < dataset.num_policies(); ++i)
                report.effects[i - 1] =
                    report.values[static_cast<std::size_t>(i)] - report.values[0];
        } else {
            report.effects = naive_average_estimate(dataset, theta, ns.gamma,
                                                    !args.unscaled_naive);
        }
        report.converged = true;
    }

    write_fit_report(report, args.out);
    std::cout << "report: " << args.out << "\n";
    for (Eigen::Index i = 0; i < report.effects.size(); ++i)
        std::cout << "delta_" << i + 1 << " = " << report.effects[i] << "\n";
    if (method == Method::nonstationary)
        std::cout << (report.converged ? "converged" : "not converged") << " after "
                  << report.iterations << " iterations, final loss "
                  << (report.loss_trace.empty() ? 0.0 : report.loss_trace.back()) << "\n";
    return 0;
}

struct SweepArgs {
    std::string param = "n";
    std::vector<double> values;
    int reps = 10;
    std::uint64_t seed = 0;
    std::string out = "results.csv", summary, svg, config_path;
    SweepConfig base;
    double lambda_z = -1.0;
};

int cmd_sweep(const SweepArgs& args) {
    SweepConfig base = args.base;
    if (!args.config_path.empty()) base.estimator.ns = load_ns_config(args.config_path);
    if (args.lambda_z >= 0.0) base.estimator.ns.lambda_z = args.lambda_z;
    base.estimator.ns.gamma = base.gamma;

    const auto rows = sweep(args.param, args.values, args.reps, base, args.seed);
    write_results_csv(rows, args.out);
    const auto summary = summarize(rows);
    std::cout << format_summary_table(summary);
    if (!args.summary.empty()) write_summary_csv(summary, args.summary);
    if (!args.svg.empty()) {
        std::ofstream out(args.svg);
        if (!out)
            throw Error("cannot open '" + args.svg + "' for writing");
        out << summary_svg(summary);
    }
    std::cout << "results: " << args.out << "\n";
    return 0;
}

struct ReportArgs {
    std::string results, summary, svg;
};

int cmd_report(const ReportArgs& args) {
    const auto rows = read_results_csv(args.results);
    const auto summary = summarize(rows);
    std::cout << format_summary_table(summary);
    if (!args.summary.empty()) write_summary_csv(summary, args.summary);
    if (!args.svg.empty()) {
        std::ofstream out(args.svg);
        if (!out)
            throw Error("cannot open '" + args.svg + "' for writing");
        out << summary_svg(summary);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-term treatment effect estimation from short A/B experiments"};
    app.require_subcommand(1);

    auto check_gamma = CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a synthetic experiment");
    gen_cmd->add_option("--d", gen.d, "feature dimension")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--k", gen.k, "number of policy groups")->check(CLI::Range(2, 1 << 20));
    gen_cmd->add_option("--n", gen.n, "individuals per policy")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--T", gen.T, "in-experiment horizon")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--alpha", gen.alpha, "exogenous noise scale");
    gen_cmd->add_option("--gamma", gen.gamma, "discount")->check(check_gamma);
    gen_cmd->add_option("--noise-std", gen.noise_std, "endogenous noise scale")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "RNG seed");
    gen_cmd->add_option("--s0-mean", gen.s0_mean,
                        "initial endogenous mean (scalar or d values)")
        ->delimiter(',');
    gen_cmd->add_flag("--raw-walk", gen.raw_walk,
                      "apply alpha to the raw walk instead of the lognormal-scaled one");
    gen_cmd->add_option("--out-csv", gen.out_csv, "dataset output path");
    gen_cmd->add_option("--out-truth", gen.out_truth, "truth JSON output path");

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate long-term effects from a CSV");
    est_cmd->add_option("--method", est.method, "naive | stationary | nonstationary");
    est_cmd->add_option("--data", est.data, "dataset CSV")->required();
    est_cmd->add_option("--gamma", est.gamma, "discount")
        ->check(check_gamma)
        ->each([&est](const std::string&) { est.gamma_set = true; });
    est_cmd->add_option("--reward-feature", est.reward_feature, "one-hot reward index");
    est_cmd->add_option("--reward-file", est.reward_file, "JSON with theta coefficients");
    est_cmd->add_flag("--fit-reward", est.fit_reward, "OLS-fit theta from the r column");
    est_cmd->add_option("--out", est.out, "report JSON output path");
    est_cmd->add_option("--config", est.config_path, "NonstationaryConfig JSON");
    est_cmd->add_option("--lambda-z", est.lambda_z, "z regularization (default: data-scaled)");
    est_cmd->add_option("--lambda-m", est.lambda_m, "M regularization")
        ->check(CLI::NonNegativeNumber);
    est_cmd->add_option("--ridge", est.ridge, "Gram ridge fallback")
        ->check(CLI::NonNegativeNumber);
    est_cmd->add_option("--tol", est.tol, "relative loss-decrease stopping threshold");
    est_cmd->add_option("--max-iters", est.max_iters, "iteration cap")
        ->check(CLI::PositiveNumber);
    est_cmd->add_option("--t-start", est.t_start, "first transition index in the M update");
    est_cmd->add_flag("--unscaled-naive", est.unscaled_naive,
                      "report the naive per-step gap without the 1/(1-gamma) scaling");

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Synthetic benchmark sweep");
    sweep_cmd->add_option("--param", sw.param, "n | T | d | alpha")->required();
    sweep_cmd->add_option("--values", sw.values, "swept values")->required()->delimiter(',');
    sweep_cmd->add_option("--reps", sw.reps, "replications per value")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", sw.seed, "master seed");
    sweep_cmd->add_option("--out", sw.out, "results CSV path");
    sweep_cmd->add_option("--summary", sw.summary, "summary CSV path");
    sweep_cmd->add_option("--svg", sw.svg, "SVG chart path");
    sweep_cmd->add_option("--workers", sw.base.workers, "worker threads")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--n", sw.base.n, "individuals per policy")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--T", sw.base.T, "horizon")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--d", sw.base.d, "dimension")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--k", sw.base.k, "policy groups")->check(CLI::Range(2, 1 << 20));
    sweep_cmd->add_option("--alpha", sw.base.alpha, "exogenous scale");
    sweep_cmd->add_option("--gamma", sw.base.gamma, "discount")->check(check_gamma);
    sweep_cmd->add_option("--noise-std", sw.base.noise_std, "endogenous noise scale")
        ->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--config", sw.config_path, "NonstationaryConfig JSON");
    sweep_cmd->add_option("--lambda-z", sw.lambda_z, "z regularization");

    ReportArgs rep;
    auto* report_cmd = app.add_subcommand("report", "Summarize a saved results CSV");
    report_cmd->add_option("--results", rep.results, "results CSV")->required();
    report_cmd->add_option("--summary", rep.summary, "summary CSV path");
    report_cmd->add_option("--svg", rep.svg, "SVG chart path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) return cmd_gen_synthetic(gen);
        if (est_cmd->parsed()) return cmd_estimate(est);
        if (sweep_cmd->parsed()) return cmd_sweep(sw);
        return cmd_report(rep);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
