#include "kerninv/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace kerninv {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

std::string compiler() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::string report_csv(const ScalingReport& rep) {
  std::ostringstream os;
  os << "level,N,h,q,rho,constant,raw_value,predicted_exponent";
  for (const auto& col : rep.extra_columns) os << ',' << col;
  os << '\n';
  for (const auto& r : rep.rows) {
    os << r.level << ',' << r.n << ',' << num(r.h) << ',' << num(r.q) << ',' << num(r.rho) << ','
       << num(r.constant) << ',' << num(r.raw_value) << ',' << num(rep.predicted_exponent);
    for (double v : r.extra) os << ',' << num(v);
    os << '\n';
  }
  return os.str();
}

std::string report_json(const ScalingReport& rep) {
  using nlohmann::json;
  json j;
  j["version"] = kVersion;
  j["kind"] = to_string(rep.config.kind);
  j["seed"] = rep.config.seed;
  j["config"] = serialize_config(rep.config);
  j["scale"] = rep.scale_name;
  j["predicted_exponent"] = rep.predicted_exponent;
  j["slope_window"] = {rep.slope_min, rep.slope_max};
  if (rep.fit) {
    j["fit"] = {{"slope", rep.fit->slope}, {"stderr", rep.fit->stderr_slope}, {"intercept", rep.fit->intercept}};
  } else {
    j["fit"] = nullptr;
  }
  j["complete"] = rep.complete;
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  j["verdict"] = rep.pass ? "pass" : "fail";
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row{{"level", r.level},         {"N", r.n},
             {"h", json_number(r.h)},    {"q", json_number(r.q)},
             {"rho", json_number(r.rho)}, {"scale", json_number(r.scale)},
             {"constant", json_number(r.constant)}, {"raw_value", json_number(r.raw_value)}};
    for (std::size_t i = 0; i < r.extra.size() && i < rep.extra_columns.size(); ++i)
      row[rep.extra_columns[i]] = json_number(r.extra[i]);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["log"] = rep.log;
  j["environment"] = {{"compiler", compiler()},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"cxx_standard", static_cast<long>(__cplusplus)}};
  return j.dump(2) + "\n";
}

std::string loglog_data(const ScalingReport& rep) {
  std::ostringstream os;
  os << "# log(" << rep.scale_name << ") log(raw_value)\n";
  for (const auto& r : rep.rows)
    if (r.scale > 0.0 && r.raw_value > 0.0) os << num(std::log(r.scale)) << ' ' << num(std::log(r.raw_value)) << '\n';
  return os.str();
}

void write_report(const ScalingReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << text;
  };
  put("report.csv", report_csv(rep));
  put("report.json", report_json(rep));
  put("loglog.dat", loglog_data(rep));
  for (const auto& r : rep.rows) {
    if (!r.gram) continue;
    std::ostringstream os;
    os << std::setprecision(17);
    const MatrixXd& g = *r.gram;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index k = 0; k < g.cols(); ++k) os << (k ? "," : "") << g(i, k);
      os << '\n';
    }
    put("gram_level" + std::to_string(r.level) + ".csv", os.str());
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel-space inverse inequality experiments", "kerninv"};
  std::string kind_name, config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool dump_grams = false;
  app.add_option("kind", kind_name, "experiment kind")->required();
  app.add_option("--config", config_path, "config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", threads, "levels run in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--dump-grams", dump_grams, "write the kernel Gram of every level");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  const auto kind = parse_kind(kind_name);
  if (!kind) {
    err << "error: unknown kind '" << kind_name << "'; expected one of:";
    for (const auto& n : kind_names()) err << ' ' << n;
    err << '\n';
    return kExitUsage;
  }
  std::ifstream in(config_path);
  if (!in) {
    err << "error: cannot read config " << config_path << '\n';
    return kExitUsage;
  }
  std::stringstream text;
  text << in.rdbuf();

  ExperimentConfig config;
  try {
    config = parse_config(text.str(), kind);
    if (seed) config.seed = *seed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  ScalingReport rep;
  try {
    rep = run_scaling_experiment(config, RunOptions{threads, dump_grams});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  try {
    write_report(rep, out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  out << to_string(config.kind) << ": " << rep.rows.size() << " rows";
  if (rep.fit)
    out << ", slope " << std::setprecision(4) << rep.fit->slope << " (window [" << rep.slope_min << ", "
        << rep.slope_max << "], predicted " << rep.predicted_exponent << ")";
  if (!rep.complete) out << ", INCOMPLETE: " << rep.failure;
  out << " -> " << (rep.pass ? "pass" : "fail") << '\n';
  return rep.pass ? kExitPass : kExitFailure;
}

}  // namespace kerninv
