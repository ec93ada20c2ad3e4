#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "longterm/csv.hpp"
#include "longterm/harness.hpp"
#include "longterm/linalg.hpp"
#include "longterm/report_io.hpp"
#include "longterm/reward.hpp"
#include "longterm/stationary.hpp"
#include "longterm/synthetic.hpp"

namespace py = pybind11;
using namespace longterm;

namespace {

RewardModel reward_from_array(const Eigen::VectorXd& theta) { return RewardModel{theta}; }

py::dict report_to_dict(const FitReport& report) {
    py::dict out;
    py::list matrices;
    for (const auto& m : report.model.matrices) matrices.append(m);
    out["matrices"] = matrices;
    out["gamma"] = report.model.gamma;
    out["z"] = report.exogenous.z;
    out["loss_trace"] = report.loss_trace;
    out["iterations"] = report.iterations;
    out["converged"] = report.converged;
    out["values"] = report.values;
    out["effects"] = Eigen::VectorXd(report.effects);
    py::dict diag;
    diag["spectral_radius_m"] = report.diagnostics.spectral_radius_m;
    diag["spectral_norm_m"] = report.diagnostics.spectral_norm_m;
    diag["gram_rcond"] = report.diagnostics.gram_rcond;
    diag["exogenous_rcond"] = report.diagnostics.exogenous_rcond;
    diag["lambda_z"] = report.diagnostics.lambda_z;
    diag["lambda_m"] = report.diagnostics.lambda_m;
    out["diagnostics"] = diag;
    return out;
}

NonstationaryConfig make_config(double gamma, std::optional<double> lambda_z, double lambda_m,
                                double tol, int max_iters, double ridge, int t_start) {
    NonstationaryConfig cfg;
    cfg.gamma = gamma;
    cfg.lambda_z = lambda_z;
    cfg.lambda_m = lambda_m;
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    cfg.ridge = ridge;
    cfg.t_start = t_start;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Long-term treatment effect estimation from short A/B experiments";

    py::register_exception<Error>(m, "LongtermError");

    py::class_<ExperimentDataset>(m, "Dataset")
        .def_property_readonly("d", &ExperimentDataset::dim)
        .def_property_readonly("T", &ExperimentDataset::horizon)
        .def_property_readonly("k", &ExperimentDataset::num_policies)
        .def_property_readonly("n", &ExperimentDataset::size)
        .def_property_readonly("has_rewards", &ExperimentDataset::has_rewards)
        .def("group_size",
             [](const ExperimentDataset& ds, int policy) { return ds.group_size(policy); })
        .def("observations",
             [](const ExperimentDataset& ds, std::size_t j) {
                 return ds.trajectory(j).observations;
             },
             "d x (T+1) observation matrix of individual j")
        .def("policy_id",
             [](const ExperimentDataset& ds, std::size_t j) {
                 return ds.trajectory(j).policy_id;
             })
        .def("save", [](const ExperimentDataset& ds, const std::string& path) {
            save_dataset(ds, path);
        });

    m.def("load_dataset", [](const std::string& path) { return load_dataset(path); });

    m.def(
        "gen_synthetic",
        [](int d, int k, int n, int T, double alpha, std::uint64_t seed, double noise_std) {
            const auto truth =
                make_truth(d, k, T, alpha, default_s0_mean(d), noise_std, seed);
            auto dataset = simulate_dataset(truth, n, T, alpha);
            py::dict truth_dict;
            py::list matrices;
            for (const auto& mat : truth.matrices) matrices.append(mat);
            truth_dict["matrices"] = matrices;
            truth_dict["z_scaled"] = truth.z_scaled;
            truth_dict["alpha"] = truth.alpha;
            truth_dict["s0_mean"] = Eigen::VectorXd(truth.s0_mean);
            truth_dict["seed"] = truth.seed;
            return py::make_tuple(std::move(dataset), truth_dict);
        },
        py::arg("d"), py::arg("k"), py::arg("n"), py::arg("T"), py::arg("alpha") = 1.0,
        py::arg("seed") = 0, py::arg("noise_std") = 1.0);

    m.def(
        "ground_truth_delta",
        [](int d, int k, int T, std::uint64_t seed, double gamma, double noise_std) {
            const auto truth = make_truth(d, k, T, 1.0, default_s0_mean(d), noise_std, seed);
            return Eigen::VectorXd(ground_truth_delta(truth, default_reward(d), gamma));
        },
        py::arg("d"), py::arg("k"), py::arg("T"), py::arg("seed") = 0,
        py::arg("gamma") = 0.99, py::arg("noise_std") = 1.0);

    m.def("default_reward_theta",
          [](int d) { return Eigen::VectorXd(default_reward(d).theta); });

    m.def("spectral_radius", &spectral_radius);

    m.def(
        "fit_stationary",
        [](const ExperimentDataset& dataset, double ridge) {
            const auto fit = fit_stationary(dataset, ridge);
            py::list matrices;
            for (const auto& mat : fit.model.matrices) matrices.append(mat);
            return matrices;
        },
        py::arg("dataset"), py::arg("ridge") = 0.0);

    m.def(
        "estimate_effects",
        [](const ExperimentDataset& dataset, const std::string& method,
           const Eigen::VectorXd& theta, double gamma, std::optional<double> lambda_z,
           double lambda_m, double tol, int max_iters, double ridge) {
            EstimatorConfig cfg;
            cfg.ns = make_config(gamma, lambda_z, lambda_m, tol, max_iters, ridge, 0);
            cfg.stationary_ridge = ridge;
            return Eigen::VectorXd(
                run_method(dataset, parse_method(method), reward_from_array(theta), cfg));
        },
        py::arg("dataset"), py::arg("method"), py::arg("theta"), py::arg("gamma") = 0.99,
        py::arg("lambda_z") = py::none(), py::arg("lambda_m") = 0.0, py::arg("tol") = 1e-9,
        py::arg("max_iters") = 200, py::arg("ridge") = 0.0);

    m.def(
        "alternate_minimize",
        [](const ExperimentDataset& dataset, const Eigen::VectorXd& theta, double gamma,
           std::optional<double> lambda_z, double lambda_m, double tol, int max_iters,
           double ridge, int t_start) {
            const auto report = alternate_minimize(
                dataset, reward_from_array(theta),
                make_config(gamma, lambda_z, lambda_m, tol, max_iters, ridge, t_start));
            return report_to_dict(report);
        },
        py::arg("dataset"), py::arg("theta"), py::arg("gamma") = 0.99,
        py::arg("lambda_z") = py::none(), py::arg("lambda_m") = 0.0, py::arg("tol") = 1e-9,
        py::arg("max_iters") = 200, py::arg("ridge") = 0.0, py::arg("t_start") = 0);

    m.def("estimate_reward_coefficients", [](const ExperimentDataset& dataset) {
        const auto fit = estimate_reward_coefficients(dataset);
        return py::make_tuple(Eigen::VectorXd(fit.model.theta), fit.residual_rms);
    });
}
