#include "kerninv/config.hpp"
#include "kerninv/experiment.hpp"
#include "kerninv/runner.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace kerninv;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "kind = bernstein\n"
    "geometry = interval\n"
    "m = 2\n"
    "s = 1\n"
    "levels = 3, 4, 5, 6\n";

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("kerninv_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("a minimal config parses with defaults") {
  const ExperimentConfig c = parse_config(kMinimal);
  CHECK(c.kind == ExperimentKind::Bernstein);
  CHECK(c.m == 2.0);
  CHECK(c.s == 1.0);
  CHECK(c.levels == std::vector<int>{3, 4, 5, 6});
  CHECK(c.generator == "uniform");
  CHECK(c.seed == 1);
  CHECK_FALSE(c.slope_min.has_value());
  CHECK(config_dim(c) == 1);
  CHECK(std::holds_alternative<Domain>(make_host(c)));
  CHECK(parse_config("# comment only\n" + std::string(kMinimal) + "\n   \n") == c);
}

TEST_CASE("every violation is listed") {
  const auto v = violations_of(
      "kind = bernstein\ngeometry = interval\nm = 2\ns = 1\nlevels = 3, 4, 5, 6\n"
      "frobnicate = 3\nfps_factor = many\n");
  CHECK(v.size() == 2);
  CHECK(any_contains(v, "unknown key 'frobnicate'"));
  CHECK(any_contains(v, "key 'fps_factor': expected an integer"));

  const auto w = violations_of("kind = bernstein\ngeometry = interval\nm = 2.5\ns = 1\nlevels = 5, 4\ntrials = 0\n");
  CHECK(w.size() >= 4);
  CHECK(any_contains(w, "m: "));
  CHECK(any_contains(w, "strictly increasing"));
  CHECK(any_contains(w, "trials must be >= 1"));
  CHECK(any_contains(w, "min_fit_levels"));

  CHECK(any_contains(violations_of("geometry = interval\nm = 2\nlevels = 3\n"), "missing required key 'kind'"));
  CHECK(any_contains(violations_of("kind = nikolskii\nm = 2\n"), "missing required key 'geometry'"));
  CHECK(any_contains(violations_of("kind = nikolskii\ngeometry = interval\nm = 2\nlevels =\n"),
                     "at least one refinement level"));
  CHECK(any_contains(violations_of(std::string(kMinimal) + "m = 3\n"), "duplicate key 'm'"));
  CHECK(any_contains(violations_of("kind = bogus\n"), "unknown experiment kind"));
  CHECK(any_contains(violations_of("kind = nikolskii\nno equals sign\n"), "expected 'key = value'"));
  CHECK(violations_of(kMinimal).empty());
}

TEST_CASE("hypothesis violations are described in words") {
  const std::string base = "geometry = interval\nm = 2\nlevels = 3, 4, 5, 6\n";
  CHECK(any_contains(violations_of("kind = bernstein\ns = 2.5\n" + base), "Bernstein hypothesis"));
  CHECK(any_contains(violations_of("kind = stability\ns = 2.5\n" + base), "stability hypothesis"));
  CHECK(any_contains(violations_of("kind = sampling\ns = 2\np = 1\n" + base), "exceeds the sampling order"));
  CHECK(any_contains(violations_of("kind = sampling\ns = 2\nq = inf\n" + base), "sup-norm sampling"));
  CHECK(any_contains(violations_of("kind = sampling\ns = 1\nq = 3\n" + base), "1, 2 or inf"));
  CHECK(any_contains(violations_of("kind = gn-check\nt = 1\nalpha = 1\nm_order = 2\n" + base),
                     "0 <= t < alpha < m_order <= m"));
  CHECK(any_contains(violations_of("kind = bernstein\n" + base), "missing required key 's'"));
  CHECK(any_contains(violations_of("kind = bernstein\ns = 1\ncone_angle = 2\n" + base), "cone_angle"));

  const std::string circ = "geometry = circle\nm = 1.5\nlevels = 3, 4, 5, 6\n";
  CHECK(any_contains(violations_of("kind = manifold-bernstein\nbeta = 0.5\n" + circ), "manifold Bernstein hypothesis"));
  CHECK(any_contains(violations_of("kind = equivalence\nbeta = 1\n" + circ), "band equivalence hypothesis"));
  CHECK(any_contains(violations_of("kind = manifold-nikolskii\nspectral_oversample = 1\n" + circ),
                     "level + spectral_oversample >= 6"));
  CHECK(any_contains(violations_of("kind = manifold-nikolskii\ngeometry = interval\nm = 2\nlevels = 3, 4, 5, 6\n"),
                     "needs geometry = circle"));
  CHECK(any_contains(violations_of("kind = nikolskii\n" + circ), "not the circle"));
  CHECK(any_contains(violations_of("kind = poincare\npoincare_p = 0.5\n"), "poincare_p"));
}

TEST_CASE("the command-line kind fills in or must agree") {
  const std::string body = "geometry = interval\nm = 2\nlevels = 3, 4, 5, 6\n";
  CHECK(parse_config(body, ExperimentKind::Nikolskii).kind == ExperimentKind::Nikolskii);
  CHECK_THROWS_WITH_AS(parse_config("kind = nikolskii\n" + body, ExperimentKind::NativeInverse),
                       doctest::Contains("does not match the requested kind"), ConfigError);
  for (const auto& name : kind_names()) CHECK(to_string(*parse_kind(name)) == name);
  CHECK_FALSE(parse_kind("nope").has_value());
}

TEST_CASE("serialization round trip on seeded configs") {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::uint64_t> seed;
  const std::vector<std::string> names = kind_names();
  for (int i = 0; i < 100; ++i) {
    ExperimentConfig c;
    c.kind = *parse_kind(names[static_cast<std::size_t>(i) % names.size()]);
    c.seed = seed(rng);
    c.trials = 1 + static_cast<int>(u(rng) * 50);
    c.slope_min = -1.0 - u(rng);
    c.slope_max = *c.slope_min + 0.1 + u(rng);
    c.ratio_min = 0.1 + 0.5 * u(rng);
    c.ratio_max = 1.0 + u(rng) * 10.0;
    c.min_fit_levels = 3;
    c.levels = {2, 3, 4 + static_cast<int>(u(rng) * 3)};
    switch (c.kind) {
      case ExperimentKind::ManifoldBernstein:
      case ExperimentKind::ManifoldNikolskii:
      case ExperimentKind::Equivalence:
        c.geometry = "circle";
        c.m = 2.5;
        c.beta = c.kind == ExperimentKind::ManifoldBernstein ? 0.5 + u(rng) : std::floor(2.0 * u(rng));
        c.c_delta = 0.05 + u(rng);
        break;
      case ExperimentKind::Poincare:
        c.poincare_deltas = {u(rng) + 1e-3, 1.0 / 3.0};
        c.poincare_p = {1.0, 1.0 + 3.0 * u(rng)};
        c.poincare_degree = static_cast<int>(u(rng) * 10);
        break;
      default:
        c.geometry = i % 3 == 0 ? "box" : "interval";
        c.m = c.geometry == "box" ? 2.5 : 3.0;
        if (c.geometry == "box") {
          const double x0 = u(rng), y0 = -u(rng);
          c.domain = {x0, y0, x0 + 0.5 + u(rng), y0 + 0.5 + u(rng)};
          c.cone_angle = 0.1 + u(rng);
        } else {
          c.domain = {-u(rng), 1.0 + u(rng)};
        }
        c.s = 1.0;
        c.t = 0.0;
        c.alpha = 1.0 + u(rng);
        c.m_order = 2.5;
        if (c.kind == ExperimentKind::Sampling) c.q = i % 2 ? 2.0 : kInf;
        if (u(rng) < 0.5) c.quad_refine = static_cast<int>(u(rng) * 4);
        c.generator = u(rng) < 0.5 ? "uniform" : "fps";
        break;
    }
    INFO(serialize_config(c));
    REQUIRE(validate_config(c).empty());
    CHECK(parse_config(serialize_config(c)) == c);
  }
}

TEST_CASE("CLI exit codes") {
  TempDir tmp;
  const auto ok = tmp.write("ok.cfg", std::string(kMinimal) + "slope_min = -1.35\nslope_max = -0.75\n");
  const auto out = (tmp.path / "out").string();
  CHECK(cli({"bernstein", "--config", ok.string(), "--out", out}) == kExitPass);
  CHECK(fs::exists(tmp.path / "out" / "report.csv"));
  CHECK(fs::exists(tmp.path / "out" / "loglog.dat"));

  const auto json = nlohmann::json::parse(slurp(tmp.path / "out" / "report.json"));
  CHECK(json["verdict"] == "pass");
  CHECK(json["version"] == kVersion);
  CHECK(json["config"].get<std::string>().find("s = 1\n") != std::string::npos);
  CHECK(json["rows"].size() == 4);
  CHECK(json.dump().find("time") == std::string::npos);

  std::string err;
  CHECK(cli({"bernstein"}, &err) == kExitUsage);
  CHECK(cli({"bogus", "--config", ok.string()}, &err) == kExitUsage);
  CHECK(err.find("unknown kind") != std::string::npos);
  CHECK(cli({"bernstein", "--config", (tmp.path / "missing.cfg").string()}) == kExitUsage);
  CHECK(cli({"nikolskii", "--config", ok.string()}, &err) == kExitUsage);
  CHECK(err.find("does not match") != std::string::npos);
  const auto bad = tmp.write("bad.cfg", "kind = bernstein\ngeometry = interval\nm = 2\ns = 3\nlevels = 3, 4, 5, 6\n");
  CHECK(cli({"bernstein", "--config", bad.string()}, &err) == kExitUsage);
  CHECK(err.find("Bernstein hypothesis") != std::string::npos);

  // slope outside an impossible window
  const auto wrong = tmp.write("wrong.cfg", std::string(kMinimal) + "slope_min = 0.5\nslope_max = 1\n");
  CHECK(cli({"bernstein", "--config", wrong.string(), "--out", out}) == kExitFailure);
  CHECK(nlohmann::json::parse(slurp(tmp.path / "out" / "report.json"))["verdict"] == "fail");

  // the last level exceeds the node budget: the report is written but incomplete
  const auto big = tmp.write("big.cfg", "kind = bernstein\ngeometry = box\nm = 2.5\ns = 1\nlevels = 2, 3, 4, 9\n");
  CHECK(cli({"bernstein", "--config", big.string(), "--out", out, "--threads", "2"}) == kExitFailure);
  const auto j = nlohmann::json::parse(slurp(tmp.path / "out" / "report.json"));
  CHECK(j["complete"] == false);
  CHECK(j["failure"].get<std::string>().find("memory budget") != std::string::npos);
  CHECK(j["verdict"] == "fail");

  CHECK(cli({"--help"}) == kExitPass);
}

TEST_CASE("reports do not depend on the thread count") {
  TempDir tmp;
  const auto cfg = tmp.write("fps.cfg",
                             "kind = nikolskii\ngeometry = box\nm = 2.5\nlevels = 1, 2, 3, 4\n"
                             "generator = fps\nseed = 1234\n");
  const fs::path a = tmp.path / "a", b = tmp.path / "b";
  cli({"nikolskii", "--config", cfg.string(), "--out", a.string(), "--threads", "1", "--dump-grams"});
  cli({"nikolskii", "--config", cfg.string(), "--out", b.string(), "--threads", "4", "--dump-grams"});
  for (const char* name : {"report.csv", "report.json", "loglog.dat", "gram_level3.csv"}) {
    INFO(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  const auto c = tmp.path / "c";
  cli({"nikolskii", "--config", cfg.string(), "--out", c.string(), "--seed", "99"});
  CHECK(slurp(a / "report.csv") != slurp(c / "report.csv"));
}

TEST_CASE("experiment driver") {
  ExperimentConfig c = parse_config(kMinimal);
  const ScalingReport r = run_scaling_experiment(c);
  CHECK(r.scale_name == "q");
  CHECK(r.predicted_exponent == -1.0);
  REQUIRE(r.fit.has_value());
  CHECK(r.rows.size() == 4);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].level == c.levels[i]);
  CHECK(r.rows[1].n == 2 * r.rows[0].n - 1);
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("level,N,h,q,rho,constant,raw_value,predicted_exponent,jitter", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  CHECK(derive_seed(1, 3, 0) == derive_seed(1, 3, 0));
  CHECK(derive_seed(1, 3, 0) != derive_seed(1, 4, 0));
  CHECK(derive_seed(1, 3, 0) != derive_seed(1, 3, 1));
  CHECK(derive_seed(1, 3, 0) != derive_seed(2, 3, 0));

  ExperimentConfig p = parse_config("kind = poincare\npoincare_count = 10\n");
  const ScalingReport pr = run_scaling_experiment(p);
  CHECK(pr.pass);
  CHECK(pr.rows.size() == 6);
}
