#include "longterm/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace longterm {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("row " + std::to_string(row) + ": non-numeric cell '" + cell +
                              "' in column " + column);
    return value;
}

long parse_integer(const std::string& cell, std::size_t row, const std::string& column) {
    long value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("row " + std::to_string(row) + ": non-integer cell '" + cell +
                              "' in column " + column);
    return value;
}

struct RawRow {
    std::size_t row_number;
    long t;
    Eigen::VectorXd features;
    double reward;
};

}  // namespace

ExperimentDataset load_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("empty input: missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_line(line);
    if (header.size() < 4 || header[0] != "individual_id" || header[1] != "policy_id" ||
        header[2] != "t")
        throw ValidationError("bad header: expected individual_id,policy_id,t,f0,...[,r]");
    bool with_rewards = header.back() == "r";
    const std::size_t d = header.size() - 3 - (with_rewards ? 1 : 0);
    if (d < 1)
        throw ValidationError("bad header: no feature columns");
    for (std::size_t c = 0; c < d; ++c)
        if (header[3 + c] != "f" + std::to_string(c))
            throw ValidationError("bad header: feature column " + std::to_string(c) +
                                  " must be named f" + std::to_string(c));

    // first-appearance order of individuals is preserved in the output
    std::vector<std::string> order;
    std::map<std::string, long> policies;
    std::map<std::string, std::vector<RawRow>> rows;

    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw ValidationError("row " + std::to_string(row_number) + ": expected " +
                                  std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
        RawRow raw;
        raw.row_number = row_number;
        const std::string& id = cells[0];
        const long policy = parse_integer(cells[1], row_number, "policy_id");
        if (policy < 0)
            throw ValidationError("row " + std::to_string(row_number) +
                                  ": policy_id out of range (negative)");
        raw.t = parse_integer(cells[2], row_number, "t");
        if (raw.t < 0)
            throw ValidationError("row " + std::to_string(row_number) + ": negative time index");
        raw.features.resize(static_cast<Eigen::Index>(d));
        for (std::size_t c = 0; c < d; ++c)
            raw.features[static_cast<Eigen::Index>(c)] =
                parse_number(cells[3 + c], row_number, header[3 + c]);
        raw.reward = with_rewards ? parse_number(cells[3 + d], row_number, "r") : 0.0;

        auto it = policies.find(id);
        if (it == policies.end()) {
            policies.emplace(id, policy);
            order.push_back(id);
        } else if (it->second != policy) {
            throw ValidationError("row " + std::to_string(row_number) + ": individual '" + id +
                                  "' changes policy_id");
        }
        rows[id].push_back(std::move(raw));
    }
    if (order.empty())
        throw ValidationError("no data rows");

    std::vector<ObservationTrajectory> trajectories;
    trajectories.reserve(order.size());
    for (const auto& id : order) {
        auto& individual_rows = rows[id];
        std::sort(individual_rows.begin(), individual_rows.end(),
                  [](const RawRow& a, const RawRow& b) { return a.t < b.t; });
        for (std::size_t r = 0; r < individual_rows.size(); ++r) {
            const long t = individual_rows[r].t;
            if (t == static_cast<long>(r)) continue;
            if (r > 0 && t == individual_rows[r - 1].t)
                throw ValidationError("row " + std::to_string(individual_rows[r].row_number) +
                                      ": duplicate (individual '" + id + "', t=" +
                                      std::to_string(t) + ") row");
            throw ValidationError("individual '" + id + "': gap in time index (expected t=" +
                                  std::to_string(r) + ", found t=" + std::to_string(t) +
                                  " at row " + std::to_string(individual_rows[r].row_number) + ")");
        }
        ObservationTrajectory tr;
        tr.individual_id = id;
        tr.policy_id = static_cast<int>(policies[id]);
        tr.observations.resize(static_cast<Eigen::Index>(d),
                               static_cast<Eigen::Index>(individual_rows.size()));
        if (with_rewards)
            tr.rewards.emplace(static_cast<Eigen::Index>(individual_rows.size()));
        for (std::size_t r = 0; r < individual_rows.size(); ++r) {
            tr.observations.col(static_cast<Eigen::Index>(r)) = individual_rows[r].features;
            if (with_rewards) (*tr.rewards)[static_cast<Eigen::Index>(r)] = individual_rows[r].reward;
        }
        trajectories.push_back(std::move(tr));
    }
    return ExperimentDataset::build(std::move(trajectories));
}

ExperimentDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    return load_dataset(in);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void save_dataset(const ExperimentDataset& dataset, std::ostream& out) {
    out << "individual_id,policy_id,t";
    for (Eigen::Index c = 0; c < dataset.dim(); ++c) out << ",f" << c;
    if (dataset.has_rewards()) out << ",r";
    out << "\n";
    for (const auto& tr : dataset.trajectories()) {
        for (Eigen::Index t = 0; t < tr.observations.cols(); ++t) {
            out << tr.individual_id << ',' << tr.policy_id << ',' << t;
            for (Eigen::Index c = 0; c < dataset.dim(); ++c)
                out << ',' << format_double(tr.observations(c, t));
            if (dataset.has_rewards()) out << ',' << format_double((*tr.rewards)[t]);
            out << "\n";
        }
    }
}

void save_dataset(const ExperimentDataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    save_dataset(dataset, out);
}

}  // namespace longterm
