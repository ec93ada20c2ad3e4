#include "longterm/nonstationary.hpp"

#include <sstream>

#include "longterm/linalg.hpp"
#include "longterm/stationary.hpp"

namespace longterm {

namespace {

// Largest dense normal system before switching to the block tridiagonal path.
constexpr Eigen::Index kDenseSystemLimit = 2000;

// y = A x with A the block bidiagonal operator of matrix m:
// y_t = x_{t+1} - M x_t, t = 0..T-1.
Eigen::MatrixXd apply_operator(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x) {
    const Eigen::Index T = x.cols() - 1;
    return x.rightCols(T) - m * x.leftCols(T);
}

// x = A' y: x_t = -M' y_t (t < T) + y_{t-1} (t > 0).
Eigen::MatrixXd apply_operator_transpose(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y) {
    const Eigen::Index T = y.cols();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m.rows(), T + 1);
    x.leftCols(T).noalias() = -m.transpose() * y;
    x.rightCols(T) += y;
    return x;
}

}  // namespace

Eigen::MatrixXd build_transition_operator(const Eigen::MatrixXd& m, int T) {
    if (T < 1)
        throw ConfigError("transition operator needs T >= 1");
    const Eigen::Index d = m.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d * T, d * (T + 1));
    for (int t = 0; t < T; ++t) {
        a.block(t * d, t * d, d, d) = -m;
        a.block(t * d, (t + 1) * d, d, d) = Eigen::MatrixXd::Identity(d, d);
    }
    return a;
}

double loss(const std::vector<Eigen::MatrixXd>& matrices, const ExogenousSeries& exogenous,
            const ExperimentDataset& dataset, double lambda_z, double lambda_m) {
    const Eigen::Index d = dataset.dim();
    double acc = lambda_z * exogenous.z.squaredNorm();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < dataset.num_policies(); ++i) {
        const auto& m = matrices[static_cast<std::size_t>(i)];
        acc += lambda_m * (m - identity).squaredNorm();
        for (std::size_t j : dataset.group(i))
            acc += apply_operator(m, dataset.trajectory(j).observations - exogenous.z)
                       .squaredNorm();
    }
    return acc;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> exogenous_normal_system(
    const std::vector<Eigen::MatrixXd>& matrices, const ExperimentDataset& dataset,
    double lambda_z) {
    const Eigen::Index d = dataset.dim();
    const int T = dataset.horizon();
    const Eigen::Index dim = d * (T + 1);

    Eigen::MatrixXd h = lambda_z * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dataset.num_policies(); ++i) {
        const auto& m = matrices[static_cast<std::size_t>(i)];
        const double n_i = static_cast<double>(dataset.group_size(i));
        const Eigen::MatrixXd mtm = m.transpose() * m;
        for (int t = 0; t <= T; ++t) {
            if (t < T) {
                h.block(t * d, t * d, d, d) += n_i * mtm;
                h.block(t * d, (t + 1) * d, d, d) -= n_i * m.transpose();
                h.block((t + 1) * d, t * d, d, d) -= n_i * m;
            }
            if (t > 0)
                h.block(t * d, t * d, d, d) += n_i * Eigen::MatrixXd::Identity(d, d);
        }
        Eigen::MatrixXd group_sum = Eigen::MatrixXd::Zero(d, T + 1);
        for (std::size_t j : dataset.group(i))
            group_sum += dataset.trajectory(j).observations;
        const Eigen::MatrixXd gi_sum =
            apply_operator_transpose(m, apply_operator(m, group_sum));
        b += Eigen::Map<const Eigen::VectorXd>(gi_sum.data(), dim);
    }
    return {std::move(h), std::move(b)};
}

ExogenousSeries solve_exogenous(const std::vector<Eigen::MatrixXd>& matrices,
                                const ExperimentDataset& dataset, double lambda_z,
                                double* rcond_out) {
    const Eigen::Index d = dataset.dim();
    const int T = dataset.horizon();
    const Eigen::Index dim = d * (T + 1);
    auto [h, b] = exogenous_normal_system(matrices, dataset, lambda_z);

    Eigen::VectorXd solution;
    if (dim <= kDenseSystemLimit) {
        const auto conditioning = spd_conditioning(h);
        if (rcond_out) *rcond_out = conditioning.rcond;
        if (conditioning.rcond < 1e-12) {
            std::ostringstream msg;
            msg << "exogenous normal system is numerically singular (rcond="
                << conditioning.rcond
                << "); the operator Gram has a structural null space, use lambda_z > 0";
            throw SingularityError(msg.str());
        }
        solution = Eigen::LDLT<Eigen::MatrixXd>(h).solve(b);
    } else {
        // block tridiagonal Cholesky path; conditioning is not estimated here
        if (rcond_out) *rcond_out = -1.0;
        std::vector<Eigen::MatrixXd> diag(static_cast<std::size_t>(T + 1));
        std::vector<Eigen::MatrixXd> upper(static_cast<std::size_t>(T));
        for (int t = 0; t <= T; ++t)
            diag[static_cast<std::size_t>(t)] = h.block(t * d, t * d, d, d);
        for (int t = 0; t < T; ++t)
            upper[static_cast<std::size_t>(t)] = h.block(t * d, (t + 1) * d, d, d);
        solution = solve_block_tridiagonal_spd(std::move(diag), upper, b);
    }

    ExogenousSeries out;
    out.z = Eigen::Map<const Eigen::MatrixXd>(solution.data(), d, T + 1);
    return out;
}

std::vector<Eigen::MatrixXd> solve_transitions(const ExogenousSeries& exogenous,
                                               const ExperimentDataset& dataset,
                                               double lambda_m, double ridge, int t_start,
                                               std::vector<double>* rcond_out) {
    const Eigen::Index d = dataset.dim();
    const int T = dataset.horizon();
    if (t_start < 0 || t_start >= T)
        throw ConfigError("t_start must lie in [0, T)");
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);

    std::vector<Eigen::MatrixXd> matrices;
    matrices.reserve(static_cast<std::size_t>(dataset.num_policies()));
    if (rcond_out) rcond_out->clear();
    for (int i = 0; i < dataset.num_policies(); ++i) {
        Eigen::MatrixXd gram = (lambda_m + ridge) * identity;
        Eigen::MatrixXd cross = lambda_m * identity;
        const int span = T - t_start;
        for (std::size_t j : dataset.group(i)) {
            const Eigen::MatrixXd centered =
                dataset.trajectory(j).observations - exogenous.z;
            const auto past = centered.middleCols(t_start, span);
            const auto next = centered.middleCols(t_start + 1, span);
            gram.noalias() += past * past.transpose();
            cross.noalias() += next * past.transpose();
        }
        const auto conditioning = spd_conditioning(gram);
        if (rcond_out) rcond_out->push_back(conditioning.rcond);
        if (conditioning.rcond < 1e-12) {
            std::ostringstream msg;
            msg << "policy " << i
                << ": centered transition Gram is numerically singular (rcond="
                << conditioning.rcond << "); use lambda_m > 0 or ridge > 0";
            throw SingularityError(msg.str());
        }
        matrices.push_back(
            Eigen::LDLT<Eigen::MatrixXd>(gram).solve(cross.transpose()).transpose());
    }
    return matrices;
}

double default_lambda_z(const ExperimentDataset& dataset) {
    return 1e-6 * static_cast<double>(dataset.size()) *
           static_cast<double>(dataset.horizon()) * dataset.mean_squared_observation();
}

double value_nonstationary(const TransitionModel& model, const ExogenousSeries& exogenous,
                           const ExperimentDataset& dataset, const RewardModel& theta,
                           int policy) {
    const Eigen::VectorXd centered =
        mean_initial_observation(dataset, policy) - exogenous.z.col(0);
    return value_stationary(model, policy, theta, centered);
}

FitReport alternate_minimize(const ExperimentDataset& dataset, const RewardModel& theta,
                             const NonstationaryConfig& config) {
    if (config.gamma <= 0.0 || config.gamma >= 1.0)
        throw ConfigError("gamma must lie in (0, 1)");
    if (config.tol <= 0.0)
        throw ConfigError("tol must be positive");
    if (config.max_iters < 1)
        throw ConfigError("max_iters must be >= 1");
    if (config.lambda_m < 0.0 || config.ridge < 0.0 ||
        (config.lambda_z && *config.lambda_z < 0.0))
        throw ConfigError("regularization weights must be nonnegative");

    const double lambda_z = config.lambda_z.value_or(default_lambda_z(dataset));
    const double lambda_m = config.lambda_m;

    FitReport report;
    report.diagnostics.lambda_z = lambda_z;
    report.diagnostics.lambda_m = lambda_m;
    report.exogenous.z = Eigen::MatrixXd::Zero(dataset.dim(), dataset.horizon() + 1);
    report.model.gamma = config.gamma;

    double previous = 0.0;
    double reference = 0.0;
    for (int iter = 1; iter <= config.max_iters; ++iter) {
        report.iterations = iter;
        try {
            report.model.matrices =
                solve_transitions(report.exogenous, dataset, lambda_m, config.ridge,
                                  config.t_start, &report.diagnostics.gram_rcond);
            report.loss_trace.push_back(
                loss(report.model.matrices, report.exogenous, dataset, lambda_z, lambda_m));
            report.exogenous = solve_exogenous(report.model.matrices, dataset, lambda_z,
                                               &report.diagnostics.exogenous_rcond);
        } catch (const SingularityError& e) {
            throw SingularityError("iteration " + std::to_string(iter) + ": " +
                                   std::string(e.what()));
        }
        const double current =
            loss(report.model.matrices, report.exogenous, dataset, lambda_z, lambda_m);
        report.loss_trace.push_back(current);
        if (iter == 1) {
            reference = std::max(report.loss_trace.front(), 1e-300);
        } else if ((previous - current) / reference < config.tol) {
            report.converged = true;
            break;
        }
        previous = current;
    }

    report.diagnostics.spectral_radius_m.clear();
    report.diagnostics.spectral_norm_m.clear();
    for (const auto& m : report.model.matrices) {
        report.diagnostics.spectral_radius_m.push_back(spectral_radius(m));
        report.diagnostics.spectral_norm_m.push_back(spectral_norm(m));
    }

    const int k = dataset.num_policies();
    report.values.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        report.values[static_cast<std::size_t>(i)] =
            value_nonstationary(report.model, report.exogenous, dataset, theta, i);
    report.effects.resize(k - 1);
    for (int i = 1; i < k; ++i)
        report.effects[i - 1] = report.values[static_cast<std::size_t>(i)] - report.values[0];
    return report;
}

}  // namespace longterm
