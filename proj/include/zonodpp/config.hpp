#ifndef ZONODPP_CONFIG_HPP
#define ZONODPP_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace zonodpp {

// Flat key = value run description. Grammar: one "key = value" pair per
// line, '#' starts a comment, blank lines ignored. CLI flags override file
// keys. See README for the key reference.
struct RunConfig {
  // model
  std::string model;            // complete | ba | matrix | edges
  int m = 0;                    // vertex count for complete / ba
  int ba_k = 0;                 // attachment parameter for ba
  std::string matrix_path;      // for model = matrix
  std::string edges_path;       // for model = edges
  bool jitter = false;          // rank repair for loaded matrices

  // base measure
  std::string weight_mode = "none";  // none | sqrt-q | q-scaled
  std::string weight_values;         // comma list; empty = seeded Unif(0,1]

  // sampler
  std::string sampler;   // exact | aldous-broder | basis-exchange |
                         // unif-zonotope | vol-zonotope | compare
  long long steps = 0;   // 0 = no step budget
  double seconds = 0.0;  // 0 = no wall-clock budget
  int chains = 1;
  double laziness = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t tiling_seed = 0;  // 0 = derive from seed
  bool tiling_seed_set = false;

  // diagnostics
  int subset_size = 3;        // 0 disables inclusion statistics
  std::string subset;         // explicit comma list overriding the draw
  long long reference_draws = 0;  // exact-sampler truth; 0 = enumerate
  double burn_in = 0.1;

  // output
  std::string out = "out";
  std::string timing = "wall";      // wall | none
  std::string trace_format = "csv";  // csv | jsonl
  int parallelism = 1;
};

// Applies one key; throws ConfigError naming the offending key on bad input.
void set_config_key(RunConfig& config, const std::string& key,
                    const std::string& value);

RunConfig load_config_file(const std::string& path);

// Field-level validation independent of model realization (budgets, ranges,
// mode names). Model-dependent checks happen when the runner builds it.
void validate_config(const RunConfig& config);

std::vector<double> parse_positive_list(const std::string& text,
                                        const std::string& what);
std::vector<int> parse_index_list(const std::string& text,
                                  const std::string& what);

}  // namespace zonodpp

#endif
