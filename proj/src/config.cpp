#include "kerninv/config.hpp"

#include "kerninv/estimators.hpp"
#include "kerninv/kernels.hpp"
#include "kerninv/manifold.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace kerninv {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_table() {
  static const std::vector<std::pair<ExperimentKind, std::string>> table{
      {ExperimentKind::Bernstein, "bernstein"},
      {ExperimentKind::Nikolskii, "nikolskii"},
      {ExperimentKind::Stability, "stability"},
      {ExperimentKind::NativeInverse, "native-inverse"},
      {ExperimentKind::Sampling, "sampling"},
      {ExperimentKind::GnCheck, "gn-check"},
      {ExperimentKind::ManifoldBernstein, "manifold-bernstein"},
      {ExperimentKind::ManifoldNikolskii, "manifold-nikolskii"},
      {ExperimentKind::Equivalence, "equivalence"},
      {ExperimentKind::Poincare, "poincare"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  if (text == "inf" || text == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  char* end = nullptr;
  errno = 0;
  out = std::strtod(text.c_str(), &end);
  return end && *end == '\0' && errno == 0 && std::isfinite(out);
}

bool parse_int64(const std::string& text, std::int64_t& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (!end || *end != '\0' || errno != 0) return false;
  out = v;
  return true;
}

bool parse_u64(const std::string& text, std::uint64_t& out) {
  if (text.empty() || text[0] == '-') return false;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (!end || *end != '\0' || errno != 0) return false;
  out = v;
  return true;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ", ";
    if constexpr (std::is_floating_point_v<T>)
      os << fmt(values[i]);
    else
      os << values[i];
  }
  return os.str();
}

bool is_norm_exponent(double x) { return x == 1.0 || x == 2.0 || (std::isinf(x) && x > 0.0); }

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kind_table())
    if (k == kind) return name;
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(const std::string& name) {
  for (const auto& [k, n] : kind_table())
    if (n == name) return k;
  return std::nullopt;
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, n] : kind_table()) out.push_back(n);
    return out;
  }();
  return names;
}

bool is_manifold_kind(ExperimentKind kind) {
  return kind == ExperimentKind::ManifoldBernstein || kind == ExperimentKind::ManifoldNikolskii ||
         kind == ExperimentKind::Equivalence;
}

int config_dim(const ExperimentConfig& c) { return c.geometry == "interval" ? 1 : 2; }

ConfigError::ConfigError(std::vector<std::string> violations)
    : InvalidArgument([&] {
        std::ostringstream os;
        os << "invalid config (" << violations.size() << " violation" << (violations.size() == 1 ? "" : "s")
           << ")";
        for (const auto& v : violations) os << "\n  - " << v;
        return os.str();
      }()),
      violations_(std::move(violations)) {}

Host make_host(const ExperimentConfig& c) {
  const auto& v = c.domain;
  auto with_cone = [&](Domain d) {
    if (c.cone_angle) d.cone_angle = *c.cone_angle;
    return d;
  };
  if (c.geometry == "circle") return Manifold{};
  if (c.geometry == "interval") {
    if (v.empty()) return with_cone(make_interval(0.0, 1.0));
    if (v.size() != 2) throw InvalidArgument("interval domain needs 2 values: a, b");
    return with_cone(make_interval(v[0], v[1]));
  }
  if (c.geometry == "box") {
    if (v.empty()) return with_cone(make_box({0.0, 0.0}, {1.0, 1.0}));
    if (v.size() != 4) throw InvalidArgument("box domain needs 4 values: x0, y0, x1, y1");
    return with_cone(make_box({v[0], v[1]}, {v[2], v[3]}));
  }
  if (c.geometry == "disk") {
    if (v.empty()) return with_cone(make_disk({0.0, 0.0}, 1.0));
    if (v.size() != 3) throw InvalidArgument("disk domain needs 3 values: cx, cy, radius");
    return with_cone(make_disk({v[0], v[1]}, v[2]));
  }
  if (c.geometry == "annulus") {
    if (v.empty()) return with_cone(make_annulus(0.5, 1.0));
    if (v.size() != 2) throw InvalidArgument("annulus domain needs 2 values: inner, outer");
    return with_cone(make_annulus(v[0], v[1]));
  }
  throw InvalidArgument("unknown geometry '" + c.geometry + "' (use interval, box, disk, annulus or circle)");
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errs;
  const bool manifold_kind = is_manifold_kind(c.kind);
  const bool poincare = c.kind == ExperimentKind::Poincare;
  const int d = config_dim(c);

  if (!poincare) {
    try {
      make_host(c);
    } catch (const std::exception& e) {
      errs.emplace_back(e.what());
    }
    if (manifold_kind && c.geometry != "circle")
      errs.push_back("kind " + to_string(c.kind) + " needs geometry = circle");
    if (!manifold_kind && c.geometry == "circle")
      errs.push_back("kind " + to_string(c.kind) + " needs a domain geometry, not the circle");
    if (c.cone_angle && !(*c.cone_angle > 0.0 && *c.cone_angle < 0.5 * std::numbers::pi))
      errs.push_back("cone_angle must lie in (0, pi/2)");
    try {
      MaternKernel k(c.m, d);
    } catch (const std::exception& e) {
      errs.push_back(std::string("m: ") + e.what());
    }
    if (c.levels.empty()) errs.push_back("levels must list at least one refinement level");
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      if (c.levels[i] < 0) errs.push_back("levels must be >= 0");
      if (i > 0 && c.levels[i] <= c.levels[i - 1]) errs.push_back("levels must be strictly increasing");
    }
    if (c.min_fit_levels < 2) errs.push_back("min_fit_levels must be >= 2");
    if (!c.levels.empty() && static_cast<int>(c.levels.size()) < c.min_fit_levels)
      errs.push_back("an exponent fit needs at least min_fit_levels = " + std::to_string(c.min_fit_levels) +
                     " levels");
    if (c.generator != "uniform" && c.generator != "fps")
      errs.push_back("generator must be uniform or fps");
    if (c.fps_factor < 10) errs.push_back("fps_factor must be >= 10 (candidates >= 10 n)");
    if (c.quad_refine && (*c.quad_refine < 0 || *c.quad_refine > 8)) errs.push_back("quad_refine must lie in [0, 8]");
    if (c.spectral_oversample < 1 || c.spectral_oversample > 10)
      errs.push_back("spectral_oversample must lie in [1, 10]");
    if (c.eval_oversample < 8) errs.push_back("eval_oversample must be >= 8");
    if (c.fill_resolution < 1000) errs.push_back("fill_resolution must be >= 1000");
  }
  if (c.trials < 1) errs.push_back("trials must be >= 1");
  if (c.slope_min && c.slope_max && !(*c.slope_min < *c.slope_max)) errs.push_back("slope_min must be < slope_max");
  if (!(c.ratio_min > 0.0 && c.ratio_min < c.ratio_max)) errs.push_back("need 0 < ratio_min < ratio_max");

  auto need = [&](const std::optional<double>& v, const char* key) {
    if (!v) errs.push_back(std::string("missing required key '") + key + "' for kind " + to_string(c.kind));
    return v.has_value();
  };
  const double m = c.m;
  const double tau = m - 0.5;
  switch (c.kind) {
    case ExperimentKind::Bernstein:
      if (need(c.s, "s") && !bernstein_admissible(*c.s, m, d))
        errs.push_back("s = " + fmt(*c.s) + " violates the Bernstein hypothesis d/2 < s <= m or 0 <= s <= floor(m)");
      break;
    case ExperimentKind::Stability:
      if (need(c.s, "s") && !(*c.s >= 0.0 && *c.s <= std::floor(m + 1e-12)))
        errs.push_back("s = " + fmt(*c.s) + " violates the stability hypothesis 0 <= s <= floor(m)");
      break;
    case ExperimentKind::Sampling:
      if (!is_norm_exponent(c.q) || !is_norm_exponent(c.p) || !is_norm_exponent(c.rho))
        errs.push_back("q, p and rho must each be 1, 2 or inf");
      if (need(c.s, "s") && is_norm_exponent(c.q) && is_norm_exponent(c.p) && is_norm_exponent(c.rho)) {
        if (std::isinf(c.q)) {
          const double kmax = std::ceil(m - d / c.p - 1e-12) - 1.0;
          if (std::abs(*c.s - std::round(*c.s)) > 1e-12 || *c.s < 0.0 || *c.s > kmax)
            errs.push_back("s = " + fmt(*c.s) + " violates the sup-norm sampling hypothesis: integer 0 <= s <= ceil(m - d/p) - 1");
        } else {
          const auto o = sampling_order(m, d, c.p, c.q, c.rho);
          if (*c.s < 0.0 || *c.s > o.l + 1e-12)
            errs.push_back("s = " + fmt(*c.s) + " exceeds the sampling order l = " + fmt(o.l));
        }
      }
      break;
    case ExperimentKind::GnCheck:
      if (need(c.t, "t") && need(c.alpha, "alpha") && need(c.m_order, "m_order")) {
        if (!(*c.t >= 0.0 && *c.t < *c.alpha && *c.alpha < *c.m_order && *c.m_order <= m + 1e-12))
          errs.push_back("interpolation orders must satisfy 0 <= t < alpha < m_order <= m");
      }
      break;
    case ExperimentKind::ManifoldBernstein:
      if (need(c.beta, "beta") && !manifold_bernstein_admissible(*c.beta, tau))
        errs.push_back("beta = " + fmt(*c.beta) +
                       " violates the manifold Bernstein hypothesis d_M/2 < beta <= tau or 0 <= beta <= floor(tau - 1/2)");
      break;
    case ExperimentKind::Equivalence:
      if (need(c.beta, "beta") && !trial_equivalence_admissible(*c.beta, tau))
        errs.push_back("beta = " + fmt(*c.beta) + " violates the band equivalence hypothesis 0 <= beta <= floor(tau - 1/2)");
      if (!(c.c_delta > 0.0)) errs.push_back("c_delta must be positive");
      break;
    case ExperimentKind::Poincare:
      if (c.poincare_deltas.empty() || c.poincare_p.empty())
        errs.push_back("poincare_deltas and poincare_p must be nonempty");
      for (double v : c.poincare_deltas)
        if (!(v > 0.0)) errs.push_back("poincare_deltas must be positive");
      for (double v : c.poincare_p)
        if (!(v >= 1.0) || std::isinf(v)) errs.push_back("poincare_p entries must be finite and >= 1");
      if (c.poincare_degree < 0 || c.poincare_degree > 20) errs.push_back("poincare_degree must lie in [0, 20]");
      if (c.poincare_count < 1) errs.push_back("poincare_count must be >= 1");
      break;
    case ExperimentKind::Nikolskii:
    case ExperimentKind::NativeInverse:
    case ExperimentKind::ManifoldNikolskii:
      break;
  }
  if (manifold_kind && !c.levels.empty() && c.levels.front() + c.spectral_oversample < 6)
    errs.push_back("circle levels need level + spectral_oversample >= 6 (at least 64 spectral samples)");
  return errs;
}

ExperimentConfig parse_config(const std::string& text) { return parse_config(text, std::nullopt); }

ExperimentConfig parse_config(const std::string& text, std::optional<ExperimentKind> requested) {
  ExperimentConfig c;
  std::vector<std::string> errs;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (kv.count(key)) {
      errs.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      continue;
    }
    kv[key] = value;
  }

  auto bad = [&](const std::string& key, const std::string& what) {
    errs.push_back("key '" + key + "': " + what + " (got '" + kv[key] + "')");
  };
  auto get_double = [&](const std::string& key, double& out) {
    if (!parse_double(kv[key], out) && kv[key] != "inf") bad(key, "expected a number");
    if (kv[key] == "inf") out = std::numeric_limits<double>::infinity();
  };
  auto get_opt = [&](const std::string& key, std::optional<double>& out) {
    double v = 0.0;
    if (parse_double(kv[key], v))
      out = v;
    else
      bad(key, "expected a number");
  };
  auto get_int = [&](const std::string& key, int& out) {
    std::int64_t v = 0;
    if (parse_int64(kv[key], v) && v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max())
      out = static_cast<int>(v);
    else
      bad(key, "expected an integer");
  };
  auto get_doubles = [&](const std::string& key, std::vector<double>& out) {
    out.clear();
    for (const auto& item : split_list(kv[key])) {
      double v = 0.0;
      if (!parse_double(item, v)) {
        bad(key, "expected a comma-separated list of numbers");
        return;
      }
      out.push_back(v);
    }
  };

  const std::map<std::string, std::function<void(const std::string&)>> handlers{
      {"kind",
       [&](const std::string& k) {
         if (auto kind = parse_kind(kv[k]))
           c.kind = *kind;
         else
           bad(k, "unknown experiment kind");
       }},
      {"geometry", [&](const std::string& k) { c.geometry = kv[k]; }},
      {"domain", [&](const std::string& k) { get_doubles(k, c.domain); }},
      {"cone_angle", [&](const std::string& k) { get_opt(k, c.cone_angle); }},
      {"m", [&](const std::string& k) { get_double(k, c.m); }},
      {"s", [&](const std::string& k) { get_opt(k, c.s); }},
      {"t", [&](const std::string& k) { get_opt(k, c.t); }},
      {"alpha", [&](const std::string& k) { get_opt(k, c.alpha); }},
      {"m_order", [&](const std::string& k) { get_opt(k, c.m_order); }},
      {"beta", [&](const std::string& k) { get_opt(k, c.beta); }},
      {"q", [&](const std::string& k) { get_double(k, c.q); }},
      {"p", [&](const std::string& k) { get_double(k, c.p); }},
      {"rho", [&](const std::string& k) { get_double(k, c.rho); }},
      {"levels",
       [&](const std::string& k) {
         c.levels.clear();
         for (const auto& item : split_list(kv[k])) {
           std::int64_t v = 0;
           if (!parse_int64(item, v) || v < -1000 || v > 1000) {
             bad(k, "expected a comma-separated list of integers");
             return;
           }
           c.levels.push_back(static_cast<int>(v));
         }
       }},
      {"generator", [&](const std::string& k) { c.generator = kv[k]; }},
      {"fps_factor", [&](const std::string& k) { get_int(k, c.fps_factor); }},
      {"seed",
       [&](const std::string& k) {
         if (!parse_u64(kv[k], c.seed)) bad(k, "expected an unsigned 64-bit integer");
       }},
      {"trials", [&](const std::string& k) { get_int(k, c.trials); }},
      {"c_delta", [&](const std::string& k) { get_double(k, c.c_delta); }},
      {"poincare_deltas", [&](const std::string& k) { get_doubles(k, c.poincare_deltas); }},
      {"poincare_p", [&](const std::string& k) { get_doubles(k, c.poincare_p); }},
      {"poincare_degree", [&](const std::string& k) { get_int(k, c.poincare_degree); }},
      {"poincare_count", [&](const std::string& k) { get_int(k, c.poincare_count); }},
      {"slope_min", [&](const std::string& k) { get_opt(k, c.slope_min); }},
      {"slope_max", [&](const std::string& k) { get_opt(k, c.slope_max); }},
      {"ratio_min", [&](const std::string& k) { get_double(k, c.ratio_min); }},
      {"ratio_max", [&](const std::string& k) { get_double(k, c.ratio_max); }},
      {"min_fit_levels", [&](const std::string& k) { get_int(k, c.min_fit_levels); }},
      {"quad_refine",
       [&](const std::string& k) {
         int v = 0;
         get_int(k, v);
         c.quad_refine = v;
       }},
      {"spectral_oversample", [&](const std::string& k) { get_int(k, c.spectral_oversample); }},
      {"eval_oversample", [&](const std::string& k) { get_int(k, c.eval_oversample); }},
      {"fill_resolution",
       [&](const std::string& k) {
         if (!parse_int64(kv[k], c.fill_resolution)) bad(k, "expected an integer");
       }},
  };

  for (const auto& [key, value] : kv) {
    auto it = handlers.find(key);
    if (it == handlers.end()) {
      errs.push_back("unknown key '" + key + "'");
      continue;
    }
    it->second(key);
  }
  if (!kv.count("kind")) {
    if (requested)
      c.kind = *requested;
    else
      errs.emplace_back("missing required key 'kind'");
  } else if (requested && c.kind != *requested) {
    errs.push_back("config kind " + to_string(c.kind) + " does not match the requested kind " +
                   to_string(*requested));
  }
  const bool poincare = c.kind == ExperimentKind::Poincare;
  if (!poincare) {
    for (const char* key : {"geometry", "m", "levels"})
      if (!kv.count(key)) errs.push_back(std::string("missing required key '") + key + "'");
  }
  if (errs.empty()) {
    auto more = validate_config(c);
    errs.insert(errs.end(), more.begin(), more.end());
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "kind = " << to_string(c.kind) << '\n';
  os << "geometry = " << c.geometry << '\n';
  if (!c.domain.empty()) os << "domain = " << join(c.domain) << '\n';
  if (c.cone_angle) os << "cone_angle = " << fmt(*c.cone_angle) << '\n';
  os << "m = " << fmt(c.m) << '\n';
  const std::pair<const char*, const std::optional<double>*> opts[] = {
      {"s", &c.s}, {"t", &c.t}, {"alpha", &c.alpha}, {"m_order", &c.m_order}, {"beta", &c.beta}};
  for (const auto& [key, v] : opts)
    if (*v) os << key << " = " << fmt(**v) << '\n';
  os << "q = " << fmt(c.q) << '\n';
  os << "p = " << fmt(c.p) << '\n';
  os << "rho = " << fmt(c.rho) << '\n';
  if (!c.levels.empty()) os << "levels = " << join(c.levels) << '\n';
  os << "generator = " << c.generator << '\n';
  os << "fps_factor = " << c.fps_factor << '\n';
  os << "seed = " << c.seed << '\n';
  os << "trials = " << c.trials << '\n';
  os << "c_delta = " << fmt(c.c_delta) << '\n';
  os << "poincare_deltas = " << join(c.poincare_deltas) << '\n';
  os << "poincare_p = " << join(c.poincare_p) << '\n';
  os << "poincare_degree = " << c.poincare_degree << '\n';
  os << "poincare_count = " << c.poincare_count << '\n';
  if (c.slope_min) os << "slope_min = " << fmt(*c.slope_min) << '\n';
  if (c.slope_max) os << "slope_max = " << fmt(*c.slope_max) << '\n';
  os << "ratio_min = " << fmt(c.ratio_min) << '\n';
  os << "ratio_max = " << fmt(c.ratio_max) << '\n';
  os << "min_fit_levels = " << c.min_fit_levels << '\n';
  if (c.quad_refine) os << "quad_refine = " << *c.quad_refine << '\n';
  os << "spectral_oversample = " << c.spectral_oversample << '\n';
  os << "eval_oversample = " << c.eval_oversample << '\n';
  os << "fill_resolution = " << c.fill_resolution << '\n';
  return os.str();
}

}  // namespace kerninv
