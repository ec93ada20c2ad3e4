#include "longterm/report_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "longterm/csv.hpp"

namespace longterm {

namespace {

using nlohmann::json;

json matrix_row_major(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json columns_as_arrays(const Eigen::MatrixXd& m) {
    json cols = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        json col = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
        cols.push_back(std::move(col));
    }
    return cols;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    out << content;
}

}  // namespace

std::string fit_report_to_json(const FitReport& report) {
    json j;
    j["gamma"] = report.model.gamma;
    j["matrices"] = json::array();
    for (const auto& m : report.model.matrices) j["matrices"].push_back(matrix_row_major(m));
    j["z"] = columns_as_arrays(report.exogenous.z);
    j["loss_trace"] = report.loss_trace;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["values"] = report.values;
    j["effects"] = std::vector<double>(report.effects.begin(), report.effects.end());
    j["diagnostics"] = {
        {"spectral_radius_m", report.diagnostics.spectral_radius_m},
        {"spectral_norm_m", report.diagnostics.spectral_norm_m},
        {"gram_rcond", report.diagnostics.gram_rcond},
        {"exogenous_rcond", report.diagnostics.exogenous_rcond},
        {"lambda_z", report.diagnostics.lambda_z},
        {"lambda_m", report.diagnostics.lambda_m},
    };
    return j.dump(2) + "\n";
}

void write_fit_report(const FitReport& report, const std::string& path) {
    write_text_file(path, fit_report_to_json(report));
}

RewardModel load_reward_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("bad reward model JSON in '" + path + "': " + e.what());
    }
    if (!j.contains("theta") || !j["theta"].is_array())
        throw ValidationError("reward model file must contain a \"theta\" array");
    const auto values = j["theta"].get<std::vector<double>>();
    RewardModel model;
    model.theta = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                    static_cast<Eigen::Index>(values.size()));
    if (!model.theta.allFinite())
        throw ValidationError("reward coefficients must be finite");
    return model;
}

void write_reward_model(const RewardModel& model, const std::string& path) {
    json j;
    j["theta"] = std::vector<double>(model.theta.begin(), model.theta.end());
    write_text_file(path, j.dump(2) + "\n");
}

void write_truth(const SyntheticTruth& truth, const Eigen::VectorXd& delta, double gamma,
                 const std::string& path) {
    json j;
    j["matrices"] = json::array();
    for (const auto& m : truth.matrices) j["matrices"].push_back(matrix_row_major(m));
    j["z_scaled"] = columns_as_arrays(truth.z_scaled);
    j["alpha"] = truth.alpha;
    j["s0_mean"] = std::vector<double>(truth.s0_mean.begin(), truth.s0_mean.end());
    j["gamma_free_truth"] = {{"delta", std::vector<double>(delta.begin(), delta.end())},
                             {"gamma", gamma}};
    j["seed"] = truth.seed;
    write_text_file(path, j.dump(2) + "\n");
}

void write_results_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "param,value,rep,method,policy,delta_hat,delta_true,sq_err,ape,wall_ms,seed,error\n";
    for (const auto& r : rows) {
        out << r.param << ',' << format_double(r.value) << ',' << r.rep << ',' << r.method
            << ',' << r.policy << ',' << format_double(r.delta_hat) << ','
            << format_double(r.delta_true) << ',' << format_double(r.squared_error) << ','
            << format_double(r.abs_pct_error) << ',' << format_double(r.wall_time_ms) << ','
            << r.seed << ',';
        if (r.error.empty()) {
            out << "\n";
        } else {
            // error messages may contain commas; quote per RFC 4180
            out << '"';
            for (char c : r.error) {
                if (c == '"') out << '"';
                out << c;
            }
            out << "\"\n";
        }
    }
}

void write_results_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_results_csv(rows, out);
}

std::vector<SweepRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("empty results file '" + path + "'");
    std::vector<SweepRow> rows;
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        // the error column is last and quoted when nonempty, so split only the
        // first 11 separators and unquote the remainder
        for (std::size_t pos;
             cells.size() < 11 && (pos = line.find(',', start)) != std::string::npos;
             start = pos + 1)
            cells.push_back(line.substr(start, pos - start));
        cells.push_back(line.substr(start));
        if (cells.size() != 12)
            throw ValidationError("results row " + std::to_string(row_number) +
                                  ": expected 12 cells");
        if (cells[11].size() >= 2 && cells[11].front() == '"' && cells[11].back() == '"') {
            std::string unquoted;
            const std::string& raw = cells[11];
            for (std::size_t c = 1; c + 1 < raw.size(); ++c) {
                if (raw[c] == '"' && c + 2 < raw.size() && raw[c + 1] == '"') ++c;
                unquoted += raw[c];
            }
            cells[11] = std::move(unquoted);
        }
        SweepRow r;
        r.param = cells[0];
        r.value = std::stod(cells[1]);
        r.rep = std::stoi(cells[2]);
        r.method = cells[3];
        r.policy = std::stoi(cells[4]);
        r.delta_hat = std::stod(cells[5]);
        r.delta_true = std::stod(cells[6]);
        r.squared_error = std::stod(cells[7]);
        r.abs_pct_error = std::stod(cells[8]);
        r.wall_time_ms = std::stod(cells[9]);
        r.seed = std::stoull(cells[10]);
        r.error = cells[11];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out) {
    out << "param,value,method,log10_mse,median_ape,ape_iqr,count\n";
    for (const auto& s : summary)
        out << s.param << ',' << format_double(s.value) << ',' << s.method << ','
            << format_double(s.log10_mse) << ',' << format_double(s.median_ape) << ','
            << format_double(s.ape_iqr) << ',' << s.count << "\n";
}

void write_summary_csv(const std::vector<SummaryRow>& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_summary_csv(summary, out);
}

std::string format_summary_table(const std::vector<SummaryRow>& summary) {
    std::ostringstream out;
    out << std::left << std::setw(8) << "param" << std::setw(12) << "value" << std::setw(16)
        << "method" << std::right << std::setw(12) << "log10_mse" << std::setw(14)
        << "median_ape" << std::setw(12) << "ape_iqr" << std::setw(8) << "count" << "\n";
    for (const auto& s : summary) {
        out << std::left << std::setw(8) << s.param << std::setw(12) << s.value
            << std::setw(16) << s.method << std::right << std::fixed << std::setprecision(4)
            << std::setw(12) << s.log10_mse << std::setw(14) << s.median_ape << std::setw(12)
            << s.ape_iqr << std::setw(8) << s.count << "\n";
        out.unsetf(std::ios::fixed);
        out << std::setprecision(6);
    }
    return out.str();
}

std::string summary_svg(const std::vector<SummaryRow>& summary) {
    constexpr double width = 640, height = 420;
    constexpr double left = 70, right = 180, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::map<std::string, std::map<double, double>> series;  // method -> value -> log mse
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    std::string param;
    for (const auto& s : summary) {
        series[s.method][s.value] = s.log10_mse;
        x_min = std::min(x_min, s.value);
        x_max = std::max(x_max, s.value);
        y_min = std::min(y_min, s.log10_mse);
        y_max = std::max(y_max, s.log10_mse);
        param = s.param;
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const auto sx = [&](double v) { return left + (v - x_min) / (x_max - x_min) * plot_w; };
    const auto sy = [&](double v) {
        return top + (y_max - v) / (y_max - y_min) * plot_h;
    };

    const std::map<std::string, std::string> colors = {
        {"naive", "#d62728"}, {"stationary", "#1f77b4"}, {"nonstationary", "#2ca02c"}};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << param << "</text>\n";
    svg << "<text x=\"16\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << top + plot_h / 2 << ")\">log10 MSE</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double xv = x_min + (x_max - x_min) * tick / 4.0;
        const double yv = y_min + (y_max - y_min) * tick / 4.0;
        svg << "<text x=\"" << sx(xv) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << std::setprecision(4) << xv
            << "</text>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << std::setprecision(4) << yv
            << "</text>\n";
    }
    double legend_y = top + 10;
    for (const auto& [method, points] : series) {
        const std::string color =
            colors.count(method) ? colors.at(method) : std::string("#333333");
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [value, logmse] : points) svg << sx(value) << ',' << sy(logmse) << ' ';
        svg << "\"/>\n";
        svg << "<line x1=\"" << left + plot_w + 14 << "\" y1=\"" << legend_y << "\" x2=\""
            << left + plot_w + 40 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + plot_w + 46 << "\" y=\"" << legend_y + 4
            << "\" font-size=\"12\">" << method << "</text>\n";
        legend_y += 20;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace longterm
