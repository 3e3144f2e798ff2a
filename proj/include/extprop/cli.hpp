#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "extprop/propagators.hpp"

namespace extprop::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Entry point behind the `extprop` executable. Subcommands: count,
// spectrum, rmse, correlate. Never throws; errors go to `err` and map to
// the exit codes above.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Human-readable report of the extended propagator catalog.
std::string count_report(const OperatorCatalog& catalog);
// Same content as JSON.
std::string count_report_json(const OperatorCatalog& catalog);

// Inclusive SNR grid start, start + step, ... <= end. Throws UsageError
// for step <= 0 or end < start.
std::vector<double> snr_range(double start, double end, double step);

}  // namespace extprop::cli
