#pragma once

#include <iosfwd>
#include <string>

#include "longterm/types.hpp"

namespace longterm {

// Dataset CSV schema:
//   individual_id,policy_id,t,f0,...,f{d-1}[,r]
// one row per (individual, step), t contiguous in {0..T} per individual.

ExperimentDataset load_dataset(std::istream& in);
ExperimentDataset load_dataset(const std::string& path);

void save_dataset(const ExperimentDataset& dataset, std::ostream& out);
void save_dataset(const ExperimentDataset& dataset, const std::string& path);

/// Shortest decimal form that round-trips a double (up to 17 significant digits).
std::string format_double(double x);

}  // namespace longterm
