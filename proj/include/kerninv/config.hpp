#pragma once

#include "kerninv/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kerninv {

enum class ExperimentKind {
  Bernstein,
  Nikolskii,
  Stability,
  NativeInverse,
  Sampling,
  GnCheck,
  ManifoldBernstein,
  ManifoldNikolskii,
  Equivalence,
  Poincare,
};

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(const std::string& name);
const std::vector<std::string>& kind_names();

/// Flat experiment description; see docs/config.md for the key list.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Bernstein;
  std::string geometry = "interval";  ///< interval | box | disk | annulus | circle
  std::vector<double> domain;         ///< shape parameters; empty means the unit shape
  std::optional<double> cone_angle;
  double m = 2.0;

  std::optional<double> s;
  std::optional<double> t;
  std::optional<double> alpha;
  std::optional<double> m_order;
  std::optional<double> beta;
  double q = 2.0;
  double p = 2.0;
  double rho = 2.0;

  std::vector<int> levels;
  std::string generator = "uniform";  ///< uniform | fps
  int fps_factor = 20;
  std::uint64_t seed = 1;
  int trials = 20;
  double c_delta = 0.25;

  std::vector<double> poincare_deltas{0.1, 0.5};
  std::vector<double> poincare_p{1.0, 2.0, 3.0};
  int poincare_degree = 5;
  int poincare_count = 100;

  std::optional<double> slope_min;
  std::optional<double> slope_max;
  double ratio_min = 1.0 / 3.0;
  double ratio_max = 3.0;
  int min_fit_levels = 4;

  std::optional<int> quad_refine;
  int spectral_oversample = 5;
  int eval_oversample = 8;
  std::int64_t fill_resolution = 100000;

  bool operator==(const ExperimentConfig&) const = default;
};

/// All violations found while parsing or validating, one message per entry.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Parses `key = value` lines (`#` starts a comment) and validates the result.
/// Throws ConfigError listing every violation.
ExperimentConfig parse_config(const std::string& text);
/// Same, with the kind given on the command line: used when the text has no `kind` key and
/// must agree with it otherwise.
ExperimentConfig parse_config(const std::string& text, std::optional<ExperimentKind> requested);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Range and completeness checks; empty when the config is valid.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Host described by the geometry keys.
Host make_host(const ExperimentConfig& config);

int config_dim(const ExperimentConfig& config);
bool is_manifold_kind(ExperimentKind kind);

}  // namespace kerninv
