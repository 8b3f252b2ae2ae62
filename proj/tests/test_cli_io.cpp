#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qemit/io.hpp"

using namespace qemit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "qemit_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QEMIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("format_double is stable and round-trip exact") {
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(0.1) == io::format_double(0.1));
  for (double v : {1.0 / 3.0, 1e-17, -2.5e8, 3.141592653589793}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("trace files round-trip byte-identically") {
  const auto dir = scratch_dir();
  CorrelationTrace trace;
  trace.tau = linspace(-2.0, 2.0, 41);
  for (double t : trace.tau) {
    trace.g2.push_back(1.0 - 0.5 * std::exp(-std::abs(t)));
    trace.sigma.push_back(0.01 + 0.001 * std::abs(t));
  }
  const auto p1 = dir / "trace_a.tsv";
  const auto p2 = dir / "trace_b.tsv";
  io::save_trace(p1.string(), trace);
  io::save_trace(p2.string(), io::load_trace(p1.string()));
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("histogram files round-trip and validate") {
  const auto dir = scratch_dir();
  CoincidenceHistogram hist;
  hist.bin_width = 0.25;
  for (int i = 0; i < 40; ++i) {
    hist.bin_centers.push_back(-5.0 + 0.25 * i);
    hist.counts.push_back(100.0 + i);
  }
  const auto p1 = dir / "hist_a.tsv";
  const auto p2 = dir / "hist_b.tsv";
  io::save_histogram(p1.string(), hist);
  io::save_histogram(p2.string(), io::load_histogram(p1.string()));
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("histogram parse errors carry the offending line number") {
  const auto dir = scratch_dir();
  const auto path = dir / "bad_hist.tsv";

  SUBCASE("malformed row") {
    spit(path, "# header\n0.0\t10\n0.1\tnot-a-number\n");
    try {
      io::load_histogram(path.string());
      FAIL("expected DataError");
    } catch (const io::DataError& e) {
      CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
  }
  SUBCASE("negative count") {
    spit(path, "0.0\t10\n0.1\t-4\n0.2\t9\n");
    try {
      io::load_histogram(path.string());
      FAIL("expected DataError");
    } catch (const io::DataError& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
      CHECK(std::string(e.what()).find("negative") != std::string::npos);
    }
  }
  SUBCASE("non-uniform bins") {
    spit(path, "0.0\t1\n0.1\t1\n0.35\t1\n");
    CHECK_THROWS_AS((void)io::load_histogram(path.string()), io::DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)io::load_histogram((dir / "nope.tsv").string()), io::DataError);
  }
}

TEST_CASE("phase masks export PGM plus exact raw float64") {
  const auto dir = scratch_dir();
  PhaseMask mask;
  mask.grid.nx = 16;
  mask.grid.ny = 8;
  mask.carrier_kx = 0.31;
  mask.phase.resize(8, 16);
  for (int iy = 0; iy < 8; ++iy)
    for (int ix = 0; ix < 16; ++ix)
      mask.phase(iy, ix) = wrap_phase(0.25 * ix - 0.4 * iy);
  const std::string prefix = (dir / "mask").string();
  io::save_mask(prefix, mask);

  const std::string pgm = slurp(prefix + ".pgm");
  CHECK(pgm.substr(0, 3) == "P5\n");
  CHECK(pgm.find("16 8") != std::string::npos);

  const PhaseMask back = io::load_mask_raw(prefix);
  CHECK(back.grid.nx == 16);
  CHECK(back.carrier_kx == mask.carrier_kx);
  CHECK((back.phase - mask.phase).abs().maxCoeff() == 0.0);
}

TEST_CASE("config loading validates structure") {
  const auto dir = scratch_dir();
  const auto path = dir / "cfg.json";
  spit(path, R"({"scenario": "hom", "seed": 9, "output": "out", "params": {"gamma_a": 1.0}})");
  const auto cfg = io::load_config(path.string());
  CHECK(cfg.scenario == "hom");
  CHECK(cfg.seed == 9);
  CHECK(cfg.params["gamma_a"] == 1.0);

  spit(path, "{not json");
  CHECK_THROWS_AS((void)io::load_config(path.string()), io::UsageError);
  spit(path, R"({"seed": 1})");
  CHECK_THROWS_AS((void)io::load_config(path.string()), io::UsageError);
}

TEST_CASE("emit_plotdata rejects mismatched grids") {
  const auto dir = scratch_dir();
  CorrelationTrace a, b;
  a.tau = linspace(0.0, 1.0, 11);
  a.g2.assign(11, 1.0);
  b.tau = linspace(0.0, 2.0, 11);
  b.g2.assign(11, 1.0);
  io::save_trace((dir / "a.tsv").string(), a);
  io::save_trace((dir / "b.tsv").string(), b);
  CHECK_THROWS_AS(io::emit_plotdata((dir / "a.tsv").string(), (dir / "b.tsv").string(),
                                    (dir / "out.tsv").string()),
                  io::DataError);
  // Matching grids succeed and tabulate residuals.
  io::emit_plotdata((dir / "a.tsv").string(), (dir / "a.tsv").string(),
                    (dir / "out.tsv").string());
  CHECK(slurp(dir / "out.tsv").find("residual") != std::string::npos);
}

TEST_CASE("CLI: identical seeds give byte-identical outputs") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "sim.json";
  spit(cfg, R"({"scenario": "simulate-g2", "seed": 11, "params": {
    "n": 3, "gamma_tot": 2.0, "gamma_d": 3.0, "irf_fwhm_ps": 35,
    "tau": {"min": -2.0, "max": 2.0, "points": 2001}}})");
  const auto out1 = dir / "det_run1";
  const auto out2 = dir / "det_run2";
  REQUIRE(run_cli("simulate-g2 -c " + cfg.string() + " -o " + out1.string()) == 0);
  REQUIRE(run_cli("simulate-g2 -c " + cfg.string() + " -o " + out2.string()) == 0);
  CHECK(slurp(out1 / "trace.tsv") == slurp(out2 / "trace.tsv"));
  CHECK(!slurp(out1 / "bundle.json").empty());
}

TEST_CASE("CLI: exit codes distinguish usage, data and numerical failures") {
  const auto dir = scratch_dir();
  CHECK(run_cli("no-such-scenario") == io::kExitUsage);
  CHECK(run_cli("fit -c " + (dir / "missing_config.json").string()) == io::kExitData);

  // Scenario/subcommand mismatch is a usage error.
  const auto cfg = dir / "mismatch.json";
  spit(cfg, R"({"scenario": "hom", "params": {}})");
  CHECK(run_cli("simulate-g2 -c " + cfg.string()) == io::kExitUsage);

  // Referencing a missing dataset is a data error.
  const auto fit_cfg = dir / "fit_missing.json";
  spit(fit_cfg, R"({"scenario": "fit", "params": {"datasets": [
    {"file": "/nonexistent/data.tsv", "format": "trace", "n": 2}]}})");
  CHECK(run_cli("fit -c " + fit_cfg.string() + " -o " + (dir / "fit_out").string()) ==
        io::kExitData);
}

TEST_CASE("CLI: hom scenario emits density trace and report") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "hom.json";
  spit(cfg, R"({"scenario": "hom", "params": {
    "gamma_a": 1.0, "gamma_b": 1.0, "gamma_d_a": 0.178, "gamma_d_b": 0.178,
    "detuning_uev": 0.0, "tau": {"min": -5.0, "max": 5.0, "points": 401}}})");
  const auto out = dir / "hom_out";
  REQUIRE(run_cli("hom -c " + cfg.string() + " -o " + out.string()) == 0);
  const std::string report = slurp(out / "hom_report.json");
  CHECK(report.find("visibility") != std::string::npos);
  CHECK(fs::exists(out / "hom_density.tsv"));
  CHECK(fs::exists(out / "bundle.json"));
}
