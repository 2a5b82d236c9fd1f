#pragma once

#include "kerninv/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace kerninv {

inline constexpr const char* kVersion = "0.1.0";

/// Exit-code contract of the CLI.
enum ExitCode : int { kExitPass = 0, kExitUsage = 1, kExitFailure = 2 };

/// `level,N,h,q,rho,constant,raw_value,predicted_exponent` plus the kind's extra columns.
std::string report_csv(const ScalingReport& report);

/// Fit, verdict, rows, the embedded config text and environment; contains no timings.
std::string report_json(const ScalingReport& report);

/// Two columns: log(scale) log(raw_value).
std::string loglog_data(const ScalingReport& report);

/// Writes report.csv, report.json, loglog.dat (and gram_level<k>.csv when kept) into `dir`.
void write_report(const ScalingReport& report, const std::filesystem::path& dir);

/// Full CLI: `kerninv <kind> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>] [--dump-grams]`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kerninv
