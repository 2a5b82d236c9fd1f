#include "kerninv/experiment.hpp"

#include "kerninv/manifold.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace kerninv {

namespace {

struct LevelResult {
  LevelRow row;
  std::vector<std::string> log;
  std::vector<double> bracket_values;  // equivalence ratios, checked against [ratio_min, ratio_max]
  std::string error;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

int rule_offset(const ExperimentConfig& c) {
  if (c.quad_refine) return *c.quad_refine;
  return config_dim(c) == 1 ? 2 : 0;
}

PointSet make_nodes(const ExperimentConfig& c, const Host& host, int level) {
  const auto res = static_cast<std::size_t>(c.fill_resolution);
  PointSet uniform = uniform_refinement(host, level, res);
  if (c.generator == "uniform") return uniform;
  const Eigen::Index n = uniform.size();
  return farthest_point_sample(host, n, static_cast<Eigen::Index>(c.fps_factor) * n,
                               derive_seed(c.seed, level, -1), res);
}

// Tensor grid containing the nodes of the uniform refinement, at least 8 points per node.
PointsXd eval_grid(const ExperimentConfig& c, const Host& host, Eigen::Index n) {
  const auto* dom = std::get_if<Domain>(&host);
  const int d = ambient_dim(host);
  if (dom && std::holds_alternative<Interval>(dom->shape)) {
    const auto& iv = std::get<Interval>(dom->shape);
    Eigen::Index k = c.eval_oversample;
    while (k * (n - 1) + 1 < 8 * n) k *= 2;
    const Eigen::Index count = k * std::max<Eigen::Index>(n - 1, 1) + 1;
    PointsXd g(count, 1);
    g.col(0) = VectorXd::LinSpaced(count, iv.a, iv.b);
    return g;
  }
  if (dom && std::holds_alternative<Box>(dom->shape)) {
    const auto& b = std::get<Box>(dom->shape);
    const auto n1 = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9));
    Eigen::Index k = c.eval_oversample;
    while ((k * (n1 - 1) + 1) * (k * (n1 - 1) + 1) < 8 * n) k *= 2;
    const Eigen::Index per = k * std::max<Eigen::Index>(n1 - 1, 1) + 1;
    const VectorXd xs = VectorXd::LinSpaced(per, b.lo(0), b.hi(0));
    const VectorXd ys = VectorXd::LinSpaced(per, b.lo(1), b.hi(1));
    PointsXd g(per * per, 2);
    for (Eigen::Index i = 0; i < per; ++i)
      for (Eigen::Index j = 0; j < per; ++j) g.row(i * per + j) << xs(i), ys(j);
    return g;
  }
  const auto target = static_cast<std::size_t>(n) * static_cast<std::size_t>(d == 1 ? 8 : 64);
  return candidate_grid(host, target);
}

void fill_space_summary(LevelRow& row, const PointSet& nodes) {
  row.n = nodes.size();
  row.h = nodes.h;
  row.q = nodes.q;
  row.rho = nodes.rho;
}

void note_conditioning(LevelResult& r, const ConstantEstimate& e) {
  if (e.cholesky_fallback)
    r.log.push_back("level " + std::to_string(r.row.level) + ": QR square root rank-deficient, Cholesky with jitter " +
                    fmt(e.jitter));
  else if (e.jitter > 0.0)
    r.log.push_back("level " + std::to_string(r.row.level) + ": jitter " + fmt(e.jitter) + " applied");
}

std::vector<double> conditioning_extra(const ConstantEstimate& e) {
  return {e.jitter, static_cast<double>(e.jitter_escalations), e.diag_ratio};
}

LevelResult run_level(const ExperimentConfig& c, int level, const RunOptions& opt) {
  LevelResult r;
  r.row.level = level;
  const Host host = make_host(c);
  const int d = ambient_dim(host);
  const MaternKernel kernel(c.m, d);
  const PointSet nodes = make_nodes(c, host, level);
  fill_space_summary(r.row, nodes);
  const TrialSpace space(kernel, nodes);
  if (opt.keep_grams) r.row.gram = gram_matrix(space);
  const double dd = is_manifold(host) ? Manifold::intrinsic_dim : d;
  if (nodes.rho > 2.0)
    r.log.push_back("level " + std::to_string(level) + ": mesh ratio rho = " + fmt(nodes.rho) + " exceeds 2");

  const int K = level + c.spectral_oversample;
  auto domain_rule = [&] { return build_rule(host, std::max(1, level + rule_offset(c))); };
  auto trial_seed = [&](int t) { return derive_seed(c.seed, level, t); };

  switch (c.kind) {
    case ExperimentKind::Bernstein: {
      const auto e = bernstein_constant(space, *c.s, domain_rule());
      r.row.scale = nodes.q;
      r.row.raw_value = e.value;
      r.row.constant = e.value * std::pow(nodes.q, *c.s);
      r.row.extra = conditioning_extra(e);
      note_conditioning(r, e);
      break;
    }
    case ExperimentKind::Nikolskii: {
      const PointsXd grid = eval_grid(c, host, nodes.size());
      const auto e = nikolskii_constant(space, domain_rule(), grid);
      r.row.scale = nodes.h;
      r.row.raw_value = e.value;
      r.row.constant = e.value * std::pow(nodes.h, 0.5 * d);
      r.row.extra = conditioning_extra(e);
      r.row.extra.push_back(static_cast<double>(grid.rows()));
      note_conditioning(r, e);
      break;
    }
    case ExperimentKind::Stability: {
      const auto e = stability_constant(space, *c.s, domain_rule());
      r.row.scale = nodes.h;
      r.row.raw_value = e.value;
      r.row.constant = stability_normalized(e, d);
      r.row.extra = conditioning_extra(e);
      note_conditioning(r, e);
      break;
    }
    case ExperimentKind::NativeInverse: {
      const auto e = native_inverse_constant(space, domain_rule());
      r.row.scale = nodes.q;
      r.row.raw_value = e.value;
      r.row.constant = e.value * std::pow(nodes.q, c.m - 0.5 * d);
      r.row.extra = conditioning_extra(e);
      note_conditioning(r, e);
      break;
    }
    case ExperimentKind::Sampling: {
      const QuadratureRule rule = domain_rule();
      double worst = 0.0, sum = 0.0;
      SamplingOrder order;
      for (int t = 0; t < c.trials; ++t) {
        const VectorXd coeffs = random_trial_coefficients(space, trial_seed(t));
        const auto s = sampling_residual(space, coeffs, *c.s, c.q, rule, c.p, c.rho);
        order = s.order;
        if (s.zero_function)
          r.log.push_back("level " + std::to_string(level) + " trial " + std::to_string(t) +
                          ": zero trial function, residual 0 by convention");
        worst = std::max(worst, s.residual);
        sum += s.residual;
      }
      r.row.scale = nodes.h;
      r.row.raw_value = worst;
      r.row.constant = worst;
      r.row.extra = {sum / c.trials, order.l, order.gamma};
      break;
    }
    case ExperimentKind::GnCheck: {
      const QuadratureRule rule = domain_rule();
      double worst = 0.0, sum = 0.0;
      for (int t = 0; t < c.trials; ++t) {
        const VectorXd coeffs = random_trial_coefficients(space, trial_seed(t));
        const double g = gn_interpolation_check(space, coeffs, *c.t, *c.alpha, *c.m_order, rule);
        worst = std::max(worst, g);
        sum += g;
      }
      r.row.scale = nodes.q;
      r.row.raw_value = worst;
      r.row.constant = worst;
      r.row.extra = {sum / c.trials, (*c.alpha - *c.t) / (*c.m_order - *c.t)};
      break;
    }
    case ExperimentKind::ManifoldBernstein: {
      const auto e = manifold_bernstein_constant(space, *c.beta, K);
      r.row.scale = nodes.h;
      r.row.raw_value = e.value;
      r.row.constant = e.value * std::pow(nodes.h, *c.beta);
      r.row.extra = {dd, space.smoothness(), static_cast<double>(K), e.jitter, e.diag_ratio};
      note_conditioning(r, e);
      break;
    }
    case ExperimentKind::ManifoldNikolskii: {
      const auto e = manifold_nikolskii_constant(space, K, K + 6);
      r.row.scale = nodes.h;
      r.row.raw_value = e.value;
      r.row.constant = e.value * std::sqrt(nodes.h);
      r.row.extra = {dd, space.smoothness(), static_cast<double>(K), e.jitter, e.diag_ratio};
      note_conditioning(r, e);
      break;
    }
    case ExperimentKind::Equivalence: {
      const double delta = c.c_delta * nodes.q;
      double worst = 0.0, best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < c.trials; ++t) {
        const VectorXd coeffs = random_trial_coefficients(space, trial_seed(t));
        const double ratio = trial_equivalence_ratio(space, coeffs, delta, *c.beta, level + 2, K);
        worst = std::max(worst, ratio);
        best = std::min(best, ratio);
        r.bracket_values.push_back(ratio);
      }
      r.row.scale = delta;
      r.row.raw_value = worst;
      r.row.constant = worst;
      // Jacobian bounds of the polar map on the band: det = r in [1 - delta, 1 + delta].
      r.row.extra = {delta, best, dd, space.smoothness(), c.c_delta, static_cast<double>(K), 1.0 - delta,
                     1.0 + delta};
      break;
    }
    case ExperimentKind::Poincare:
      throw InvalidArgument("poincare has no refinement levels");
  }
  return r;
}

ScalingReport run_poincare(const ExperimentConfig& c) {
  ScalingReport rep;
  rep.config = c;
  rep.scale_name = "delta";
  rep.extra_columns = {"p", "delta", "failures", "max_lhs_over_rhs"};
  int index = 0;
  bool all_hold = true;
  for (std::size_t ip = 0; ip < c.poincare_p.size(); ++ip)
    for (std::size_t id = 0; id < c.poincare_deltas.size(); ++id) {
      const double p = c.poincare_p[ip];
      const double delta = c.poincare_deltas[id];
      int failures = 0;
      double worst = 0.0;
      for (int i = 0; i < c.poincare_count; ++i) {
        std::mt19937_64 rng(derive_seed(c.seed, static_cast<int>(ip * 1000 + id), i));
        std::normal_distribution<double> normal;
        std::vector<double> a(static_cast<std::size_t>(c.poincare_degree) + 1);
        for (double& v : a) v = normal(rng);
        auto f = [&](double x) {
          double s = 0.0;
          for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * x + *it;
          return s;
        };
        auto df = [&](double x) {
          double s = 0.0;
          for (std::size_t k = a.size() - 1; k >= 1; --k) s = s * x + static_cast<double>(k) * a[k];
          return s;
        };
        const auto res = poincare_check(f, df, delta, p);
        if (!res.holds) ++failures;
        if (res.rhs > 0.0) worst = std::max(worst, res.lhs / res.rhs);
      }
      if (failures > 0) {
        all_hold = false;
        rep.log.push_back("p = " + fmt(p) + ", delta = " + fmt(delta) + ": " + std::to_string(failures) +
                          " violations");
      }
      LevelRow row;
      row.level = index++;
      row.n = c.poincare_count;
      row.scale = delta;
      row.raw_value = worst;
      row.constant = worst;
      row.extra = {p, delta, static_cast<double>(failures), worst};
      rep.rows.push_back(row);
    }
  rep.pass = all_hold;
  return rep;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, int level, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(trial)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::string scale_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Bernstein:
    case ExperimentKind::NativeInverse:
    case ExperimentKind::GnCheck:
      return "q";
    case ExperimentKind::Equivalence:
    case ExperimentKind::Poincare:
      return "delta";
    default:
      return "h";
  }
}

double predicted_exponent(const ExperimentConfig& c) {
  const double d = config_dim(c);
  switch (c.kind) {
    case ExperimentKind::Bernstein: return -c.s.value_or(0.0);
    case ExperimentKind::Nikolskii: return -0.5 * d;
    case ExperimentKind::Stability: return 0.5 * d - c.s.value_or(0.0);
    case ExperimentKind::NativeInverse: return 0.5 * d - c.m;
    case ExperimentKind::ManifoldBernstein: return -c.beta.value_or(0.0);
    case ExperimentKind::ManifoldNikolskii: return -0.5;
    default: return 0.0;
  }
}

ScalingReport run_scaling_experiment(const ExperimentConfig& c, const RunOptions& opt) {
  if (auto errs = validate_config(c); !errs.empty()) throw ConfigError(std::move(errs));
  if (c.kind == ExperimentKind::Poincare) return run_poincare(c);

  ScalingReport rep;
  rep.config = c;
  rep.scale_name = scale_name(c.kind);
  rep.predicted_exponent = predicted_exponent(c);
  const double half = std::max(0.25, 0.3 * std::abs(rep.predicted_exponent));
  rep.slope_min = c.slope_min.value_or(rep.predicted_exponent - half);
  rep.slope_max = c.slope_max.value_or(rep.predicted_exponent + half);
  switch (c.kind) {
    case ExperimentKind::Bernstein:
    case ExperimentKind::Nikolskii:
    case ExperimentKind::Stability:
    case ExperimentKind::NativeInverse:
      rep.extra_columns = {"jitter", "jitter_escalations", "diag_ratio"};
      if (c.kind == ExperimentKind::Nikolskii) rep.extra_columns.push_back("eval_points");
      break;
    case ExperimentKind::Sampling: rep.extra_columns = {"mean_residual", "l", "gamma"}; break;
    case ExperimentKind::GnCheck: rep.extra_columns = {"mean_ratio", "theta"}; break;
    case ExperimentKind::ManifoldBernstein:
    case ExperimentKind::ManifoldNikolskii:
      rep.extra_columns = {"d_M", "tau", "K", "jitter", "diag_ratio"};
      break;
    case ExperimentKind::Equivalence:
      rep.extra_columns = {"delta", "min_ratio", "d_M", "tau", "c_delta", "K", "jacobian_lower", "jacobian_upper"};
      break;
    case ExperimentKind::Poincare: break;
  }

  const std::size_t count = c.levels.size();
  std::vector<LevelResult> results(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = run_level(c, c.levels[i], opt);
      } catch (const std::exception& e) {
        results[i].row.level = c.levels[i];
        results[i].error = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool bracket_ok = true;
  for (auto& r : results) {
    if (!r.error.empty()) {
      if (rep.complete) rep.failure = "level " + std::to_string(r.row.level) + ": " + r.error;
      rep.complete = false;
      rep.log.push_back("level " + std::to_string(r.row.level) + " failed: " + r.error);
      continue;
    }
    rep.log.insert(rep.log.end(), r.log.begin(), r.log.end());
    for (double v : r.bracket_values)
      if (!(v >= c.ratio_min && v <= c.ratio_max)) {
        bracket_ok = false;
        rep.log.push_back("level " + std::to_string(r.row.level) + ": ratio " + fmt(v) + " outside [" +
                          fmt(c.ratio_min) + ", " + fmt(c.ratio_max) + "]");
      }
    rep.rows.push_back(std::move(r.row));
  }
  if (!rep.complete) {
    rep.pass = false;
    return rep;
  }

  std::vector<std::pair<double, double>> pairs;
  for (const auto& row : rep.rows) pairs.emplace_back(row.scale, row.raw_value);
  try {
    rep.fit = fit_exponent(pairs, static_cast<std::size_t>(c.min_fit_levels));
  } catch (const std::exception& e) {
    rep.failure = std::string("exponent fit: ") + e.what();
    rep.log.push_back(rep.failure);
    rep.pass = false;
    return rep;
  }
  const bool slope_ok = rep.fit->slope >= rep.slope_min && rep.fit->slope <= rep.slope_max;
  if (!slope_ok)
    rep.log.push_back("slope " + fmt(rep.fit->slope) + " outside [" + fmt(rep.slope_min) + ", " +
                      fmt(rep.slope_max) + "]");
  rep.pass = slope_ok && bracket_ok;
  return rep;
}

}  // namespace kerninv
