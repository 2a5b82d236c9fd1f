#pragma once

#include "kerninv/config.hpp"
#include "kerninv/estimators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kerninv {

/// One refinement level (or, for poincare, one (p, delta) cell).
struct LevelRow {
  int level = 0;
  Eigen::Index n = 0;
  double h = 0.0;
  double q = 0.0;
  double rho = 0.0;
  double scale = 0.0;      ///< abscissa of the fit: q, h or delta depending on the kind
  double constant = 0.0;   ///< raw value with the predicted power of the scale divided out
  double raw_value = 0.0;  ///< the fitted quantity
  std::vector<double> extra;
  std::optional<MatrixXd> gram;  ///< kernel Gram, kept only when requested
};

struct ScalingReport {
  ExperimentConfig config;
  std::string scale_name;
  double predicted_exponent = 0.0;
  double slope_min = 0.0;
  double slope_max = 0.0;
  std::vector<std::string> extra_columns;
  std::vector<LevelRow> rows;
  std::optional<ExponentFit> fit;
  bool complete = true;
  std::string failure;
  bool pass = false;
  std::vector<std::string> log;
};

struct RunOptions {
  unsigned threads = 1;
  bool keep_grams = false;
};

/// Runs every level of the config (levels in parallel), fits the exponent and sets the verdict.
/// A failing level marks the report incomplete; later levels are still attempted but the
/// verdict fails.
ScalingReport run_scaling_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Deterministic per-(level, trial) seed derived from the config seed.
std::uint64_t derive_seed(std::uint64_t seed, int level, int trial);

/// Predicted slope and fit abscissa for a config.
double predicted_exponent(const ExperimentConfig& config);
std::string scale_name(ExperimentKind kind);

}  // namespace kerninv
