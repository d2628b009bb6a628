#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "zonodpp/config.hpp"
#include "zonodpp/errors.hpp"

using namespace zonodpp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/zonodpp_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

RunConfig minimal_valid() {
  RunConfig config;
  config.model = "complete";
  config.m = 5;
  config.sampler = "vol-zonotope";
  config.steps = 100;
  return config;
}

}  // namespace

TEST_CASE("config: set_config_key parses every key") {
  RunConfig c;
  set_config_key(c, "model", "matrix");
  set_config_key(c, "matrix_path", "/tmp/a.txt");
  set_config_key(c, "m", "10");
  set_config_key(c, "ba_k", "3");
  set_config_key(c, "jitter", "true");
  set_config_key(c, "weight_mode", "q-scaled");
  set_config_key(c, "weight_values", "1,2,3");
  set_config_key(c, "sampler", "compare");
  set_config_key(c, "steps", "50000");
  set_config_key(c, "seconds", "2.5");
  set_config_key(c, "chains", "20");
  set_config_key(c, "laziness", "0.25");
  set_config_key(c, "seed", "123456789");
  set_config_key(c, "tiling_seed", "42");
  set_config_key(c, "subset_size", "4");
  set_config_key(c, "subset", "0,3,7");
  set_config_key(c, "reference_draws", "1000000");
  set_config_key(c, "burn_in", "0.2");
  set_config_key(c, "out", "results");
  set_config_key(c, "timing", "none");
  set_config_key(c, "trace_format", "jsonl");
  set_config_key(c, "parallelism", "4");

  CHECK(c.model == "matrix");
  CHECK(c.m == 10);
  CHECK(c.ba_k == 3);
  CHECK(c.jitter);
  CHECK(c.weight_mode == "q-scaled");
  CHECK(c.sampler == "compare");
  CHECK(c.steps == 50000);
  CHECK(c.seconds == 2.5);
  CHECK(c.chains == 20);
  CHECK(c.laziness == 0.25);
  CHECK(c.seed == 123456789);
  CHECK(c.tiling_seed == 42);
  CHECK(c.tiling_seed_set);
  CHECK(c.subset_size == 4);
  CHECK(c.subset == "0,3,7");
  CHECK(c.reference_draws == 1000000);
  CHECK(c.burn_in == 0.2);
  CHECK(c.out == "results");
  CHECK(c.timing == "none");
  CHECK(c.trace_format == "jsonl");
  CHECK(c.parallelism == 4);
}

TEST_CASE("config: bad values name the key") {
  RunConfig c;
  CHECK_THROWS_WITH_AS(set_config_key(c, "steps", "abc"),
                       doctest::Contains("steps"), ConfigError);
  CHECK_THROWS_WITH_AS(set_config_key(c, "laziness", "0.5x"),
                       doctest::Contains("laziness"), ConfigError);
  CHECK_THROWS_WITH_AS(set_config_key(c, "no_such_key", "1"),
                       doctest::Contains("no_such_key"), ConfigError);
  CHECK_THROWS_AS(set_config_key(c, "jitter", "maybe"), ConfigError);
}

TEST_CASE("config: file grammar") {
  const TempFile file("config.cfg",
                      "# experiment\n"
                      "model = complete\n"
                      "m = 10\n"
                      "\n"
                      "sampler = compare   # trailing comment\n"
                      "steps = 50000\n"
                      "seed = 7\n");
  const RunConfig c = load_config_file(file.path);
  CHECK(c.model == "complete");
  CHECK(c.m == 10);
  CHECK(c.sampler == "compare");
  CHECK(c.steps == 50000);
  CHECK(c.seed == 7);
}

TEST_CASE("config: file errors carry line numbers") {
  const TempFile file("config_bad.cfg", "model = complete\nnonsense line\n");
  CHECK_THROWS_WITH_AS(load_config_file(file.path), doctest::Contains(":2"),
                       ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent.cfg"), ConfigError);
}

TEST_CASE("config: validation") {
  CHECK_NOTHROW(validate_config(minimal_valid()));

  SUBCASE("model requirements") {
    RunConfig c = minimal_valid();
    c.model = "hypercube";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.model = "matrix";  // needs matrix_path
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.model = "ba";  // needs ba_k in (0, m)
    c.ba_k = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }

  SUBCASE("budget required") {
    RunConfig c = minimal_valid();
    c.steps = 0;
    c.seconds = 0.0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c.seconds = 1.5;
    CHECK_NOTHROW(validate_config(c));
    c.steps = -3;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }

  SUBCASE("ranges") {
    RunConfig c = minimal_valid();
    c.laziness = 1.0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.burn_in = 1.0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.chains = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.parallelism = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.timing = "cpu";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.trace_format = "xml";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.weight_mode = "exp-q";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }

  SUBCASE("sampler names") {
    RunConfig c = minimal_valid();
    for (const char* name : {"exact", "aldous-broder", "basis-exchange",
                             "unif-zonotope", "vol-zonotope", "compare"}) {
      c.sampler = name;
      CHECK_NOTHROW(validate_config(c));
    }
    c.sampler = "gibbs";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }

  SUBCASE("aldous-broder needs an unweighted graph model") {
    RunConfig c = minimal_valid();
    c.sampler = "aldous-broder";
    CHECK_NOTHROW(validate_config(c));
    c.weight_mode = "q-scaled";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = minimal_valid();
    c.sampler = "aldous-broder";
    c.model = "matrix";
    c.matrix_path = "/tmp/a.txt";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }
}

TEST_CASE("config: list parsing") {
  CHECK(parse_positive_list("1,2.5,3", "q") ==
        std::vector<double>{1.0, 2.5, 3.0});
  CHECK_THROWS_AS(parse_positive_list("1,-2", "q"), ConfigError);
  CHECK_THROWS_AS(parse_positive_list("1,,2", "q"), ConfigError);
  CHECK_THROWS_AS(parse_positive_list("", "q"), ConfigError);

  CHECK(parse_index_list("3,0,7", "subset") == std::vector<int>{0, 3, 7});
  CHECK_THROWS_AS(parse_index_list("1,1", "subset"), ConfigError);
  CHECK_THROWS_AS(parse_index_list("-1", "subset"), ConfigError);
  CHECK_THROWS_AS(parse_index_list("a", "subset"), ConfigError);
}
