#include "zonodpp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zonodpp/errors.hpp"

namespace zonodpp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

long long parse_ll(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

}  // namespace

std::vector<double> parse_positive_list(const std::string& text,
                                        const std::string& what) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(what + ": empty list entry");
    const double v = parse_double(what, item);
    if (!(v > 0.0)) throw ConfigError(what + ": entries must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

std::vector<int> parse_index_list(const std::string& text,
                                  const std::string& what) {
  std::vector<int> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(what + ": empty list entry");
    const long long v = parse_ll(what, item);
    if (v < 0) throw ConfigError(what + ": indices must be nonnegative");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  std::sort(out.begin(), out.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] == out[i - 1]) throw ConfigError(what + ": duplicate index");
  }
  return out;
}

void set_config_key(RunConfig& config, const std::string& key,
                    const std::string& value) {
  if (key == "model") {
    config.model = value;
  } else if (key == "m") {
    config.m = static_cast<int>(parse_ll(key, value));
  } else if (key == "ba_k") {
    config.ba_k = static_cast<int>(parse_ll(key, value));
  } else if (key == "matrix_path") {
    config.matrix_path = value;
  } else if (key == "edges_path") {
    config.edges_path = value;
  } else if (key == "jitter") {
    config.jitter = parse_bool(key, value);
  } else if (key == "weight_mode") {
    config.weight_mode = value;
  } else if (key == "weight_values") {
    config.weight_values = value;
  } else if (key == "sampler") {
    config.sampler = value;
  } else if (key == "steps") {
    config.steps = parse_ll(key, value);
  } else if (key == "seconds") {
    config.seconds = parse_double(key, value);
  } else if (key == "chains") {
    config.chains = static_cast<int>(parse_ll(key, value));
  } else if (key == "laziness") {
    config.laziness = parse_double(key, value);
  } else if (key == "seed") {
    config.seed = parse_u64(key, value);
  } else if (key == "tiling_seed") {
    config.tiling_seed = parse_u64(key, value);
    config.tiling_seed_set = true;
  } else if (key == "subset_size") {
    config.subset_size = static_cast<int>(parse_ll(key, value));
  } else if (key == "subset") {
    config.subset = value;
  } else if (key == "reference_draws") {
    config.reference_draws = parse_ll(key, value);
  } else if (key == "burn_in") {
    config.burn_in = parse_double(key, value);
  } else if (key == "out") {
    config.out = value;
  } else if (key == "timing") {
    config.timing = value;
  } else if (key == "trace_format") {
    config.trace_format = value;
  } else if (key == "parallelism") {
    config.parallelism = static_cast<int>(parse_ll(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": empty key or value");
    }
    try {
      set_config_key(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return config;
}

void validate_config(const RunConfig& config) {
  if (config.model != "complete" && config.model != "ba" &&
      config.model != "matrix" && config.model != "edges") {
    throw ConfigError(
        "model: expected complete | ba | matrix | edges, got '" +
        config.model + "'");
  }
  if (config.model == "complete" && config.m < 2) {
    throw ConfigError("m: complete graph needs m >= 2");
  }
  if (config.model == "ba" && (config.ba_k < 1 || config.m <= config.ba_k)) {
    throw ConfigError("ba: needs m > ba_k >= 1");
  }
  if (config.model == "matrix" && config.matrix_path.empty()) {
    throw ConfigError("matrix_path: required for model = matrix");
  }
  if (config.model == "edges" && config.edges_path.empty()) {
    throw ConfigError("edges_path: required for model = edges");
  }
  if (config.weight_mode != "none" && config.weight_mode != "sqrt-q" &&
      config.weight_mode != "q-scaled") {
    throw ConfigError("weight_mode: expected none | sqrt-q | q-scaled");
  }
  if (config.sampler != "exact" && config.sampler != "aldous-broder" &&
      config.sampler != "basis-exchange" && config.sampler != "unif-zonotope" &&
      config.sampler != "vol-zonotope" && config.sampler != "compare") {
    throw ConfigError(
        "sampler: expected exact | aldous-broder | basis-exchange | "
        "unif-zonotope | vol-zonotope | compare, got '" +
        config.sampler + "'");
  }
  if (config.steps < 0) throw ConfigError("steps: must be nonnegative");
  if (config.seconds < 0.0) throw ConfigError("seconds: must be nonnegative");
  if (config.steps == 0 && config.seconds == 0.0) {
    throw ConfigError("budget: set steps > 0 and/or seconds > 0");
  }
  if (config.chains < 1) throw ConfigError("chains: must be >= 1");
  if (config.laziness < 0.0 || config.laziness >= 1.0) {
    throw ConfigError("laziness: must lie in [0, 1)");
  }
  if (config.subset_size < 0) {
    throw ConfigError("subset_size: must be nonnegative");
  }
  if (!config.subset.empty()) {
    parse_index_list(config.subset, "subset");
  }
  if (config.reference_draws < 0) {
    throw ConfigError("reference_draws: must be nonnegative");
  }
  if (config.burn_in < 0.0 || config.burn_in >= 1.0) {
    throw ConfigError("burn_in: must lie in [0, 1)");
  }
  if (config.timing != "wall" && config.timing != "none") {
    throw ConfigError("timing: expected wall | none");
  }
  if (config.trace_format != "csv" && config.trace_format != "jsonl") {
    throw ConfigError("trace_format: expected csv | jsonl");
  }
  if (config.parallelism < 1) {
    throw ConfigError("parallelism: must be >= 1");
  }
  if (!config.weight_values.empty()) {
    parse_positive_list(config.weight_values, "weight_values");
  }
  if (config.sampler == "aldous-broder") {
    if (config.model != "complete" && config.model != "ba" &&
        config.model != "edges") {
      throw ConfigError("aldous-broder: needs a graph model");
    }
    if (config.weight_mode != "none") {
      throw ConfigError(
          "aldous-broder: unweighted oracle, set weight_mode = none");
    }
  }
}

}  // namespace zonodpp
