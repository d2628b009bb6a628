#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zonodpp/errors.hpp"
#include "zonodpp/runner.hpp"
#include "zonodpp/trace_io.hpp"

using namespace zonodpp;
namespace fs = std::filesystem;

namespace {

RunConfig small_run(const std::string& out) {
  RunConfig config;
  config.model = "complete";
  config.m = 5;
  config.sampler = "vol-zonotope";
  config.steps = 2000;
  config.chains = 2;
  config.seed = 11;
  config.subset_size = 2;
  config.out = out;
  config.timing = "none";
  return config;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("runner: resolve_run on the complete graph") {
  const ResolvedRun run = resolve_run(small_run("/tmp/unused"), false);
  CHECK(run.rows() == 4);
  CHECK(run.cols() == 10);
  CHECK(run.graph.has_value());
  CHECK(run.enumeration_bound == doctest::Approx(210.0));
  REQUIRE(run.law_det2.has_value());
  CHECK(run.law_det2->atoms.size() == 125);  // Cayley
  CHECK(run.weight_source == "none");
  CHECK(run.subset.size() == 2);
  CHECK(run.truth_source == "enumerate");
  CHECK(run.truth > 0.0);
  CHECK(run.tiling_seed == 11);

  const std::string report = describe_run(run);
  CHECK(report.find("ok") == 0);
  CHECK(report.find("r = 4, n = 10") != std::string::npos);
}

TEST_CASE("runner: weights resolve by priority") {
  RunConfig config = small_run("/tmp/unused");
  config.weight_mode = "q-scaled";

  SUBCASE("seeded uniform by default") {
    const ResolvedRun run = resolve_run(config, false);
    CHECK(run.weight_source == "seeded-uniform");
    REQUIRE(run.q.size() == 10);
    CHECK(run.q.minCoeff() > 0.0);
    CHECK(run.q.maxCoeff() <= 1.0);
    // Deterministic in the master seed.
    const ResolvedRun again = resolve_run(config, false);
    CHECK((run.q - again.q).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("explicit values win") {
    config.weight_values = "1,2,3,4,5,6,7,8,9,10";
    const ResolvedRun run = resolve_run(config, false);
    CHECK(run.weight_source == "values");
    CHECK(run.q[9] == 10.0);
    config.weight_values = "1,2";  // wrong length
    CHECK_THROWS_AS(resolve_run(config, false), ConfigError);
  }
}

TEST_CASE("runner: explicit subset is validated") {
  RunConfig config = small_run("/tmp/unused");
  config.subset = "0,3";
  const ResolvedRun run = resolve_run(config, false);
  CHECK(run.subset == std::vector<int>{0, 3});

  config.subset = "0,99";
  CHECK_THROWS_AS(resolve_run(config, false), ConfigError);
  config.subset = "0,1,2,3,4";  // larger than r = 4
  CHECK_THROWS_AS(resolve_run(config, false), ConfigError);
}

TEST_CASE("runner: tiling seed override") {
  RunConfig config = small_run("/tmp/unused");
  config.tiling_seed = 999;
  config.tiling_seed_set = true;
  const ResolvedRun run = resolve_run(config, false);
  CHECK(run.tiling_seed == 999);
}

TEST_CASE("runner: end-to-end artifacts") {
  const TempDir dir("zonodpp_runner_test");
  const RunResult result = run_experiment(small_run(dir.path.string()));
  CHECK(result.complete);
  CHECK(result.trace_files.size() == 2);

  for (const std::string& name : result.trace_files) {
    const ChainTrace trace =
        load_trace_csv((dir.path / name).string(), SamplerKind::VolZonotope);
    CHECK(trace.steps.size() == 2000);
  }

  const std::string metrics = slurp(dir.path / "metrics.csv");
  CHECK(metrics.find("step,statistic,chain,value") == 0);
  CHECK(metrics.find("acceptance_rate_vol-zonotope") != std::string::npos);
  CHECK(metrics.find("tv_distance_vol-zonotope") != std::string::npos);
  CHECK(metrics.find("inclusion_vol-zonotope") != std::string::npos);
  CHECK(metrics.find("rel_error_median_vol-zonotope") != std::string::npos);

  const std::string psrf_text = slurp(dir.path / "psrf.txt");
  CHECK(psrf_text.find("sampler: vol-zonotope") != std::string::npos);

  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest.at("status") == "complete");
  CHECK(manifest.at("config").at("seed") == 11);
  CHECK(manifest.at("resolved").at("r") == 4);
  CHECK(manifest.at("resolved").at("n") == 10);
  CHECK(manifest.at("resolved").at("truth_source") == "enumerate");
  CHECK(manifest.at("outputs").at("traces").size() == 2);
}

TEST_CASE("runner: compare mode shares chain initializers") {
  const TempDir dir("zonodpp_compare_test");
  RunConfig config = small_run(dir.path.string());
  config.sampler = "compare";
  config.steps = 500;
  const RunResult result = run_experiment(config);
  CHECK(result.trace_files.size() == 4);  // 2 samplers x 2 chains

  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  const auto& bases = manifest.at("resolved").at("initial_bases");
  // Both samplers start chain i from the tile basis of the same x0.
  CHECK(bases.at("basis-exchange") == bases.at("vol-zonotope"));
}

TEST_CASE("runner: parallel execution matches serial") {
  const TempDir serial_dir("zonodpp_serial_test");
  const TempDir parallel_dir("zonodpp_parallel_test");

  RunConfig serial = small_run(serial_dir.path.string());
  serial.sampler = "compare";
  serial.steps = 1000;
  RunConfig parallel = serial;
  parallel.out = parallel_dir.path.string();
  parallel.parallelism = 4;

  const RunResult r1 = run_experiment(serial);
  const RunResult r2 = run_experiment(parallel);
  REQUIRE(r1.trace_files == r2.trace_files);
  for (const std::string& name : r1.trace_files) {
    CHECK(slurp(serial_dir.path / name) == slurp(parallel_dir.path / name));
  }
  CHECK(slurp(serial_dir.path / "metrics.csv") ==
        slurp(parallel_dir.path / "metrics.csv"));
}

TEST_CASE("runner: failures leave a partial manifest") {
  const TempDir dir("zonodpp_partial_test");
  RunConfig config = small_run(dir.path.string());
  config.steps = 100;
  // Make the metrics file unwritable: a directory squats on its name, so the
  // run fails after the traces are produced.
  fs::create_directories(dir.path / "metrics.csv");
  CHECK_THROWS(run_experiment(config));

  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest.at("status") == "partial");
  CHECK(manifest.contains("error"));
}

TEST_CASE("runner: reference truth uses the exact sampler") {
  RunConfig config = small_run("/tmp/unused");
  config.reference_draws = 20000;
  const ResolvedRun run = resolve_run(config, true);
  CHECK(run.truth_source == "reference");
  // K_5 enumerated truth is available too; the estimate must be close.
  const ResolvedRun enumerated = resolve_run(small_run("/tmp/unused"), false);
  CHECK(run.subset == enumerated.subset);
  CHECK(run.truth ==
        doctest::Approx(enumerated.truth).epsilon(0.15));  // MC tolerance
}
