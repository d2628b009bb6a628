// Command-line frontend: run experiments, validate configs, enumerate exact
// basis laws, and compute PSRF from saved traces.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/numerical error.

#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zonodpp/config.hpp"
#include "zonodpp/diagnostics.hpp"
#include "zonodpp/errors.hpp"
#include "zonodpp/runner.hpp"
#include "zonodpp/trace_io.hpp"
#include "zonodpp/version.hpp"

namespace {

using namespace zonodpp;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Flags shared by run / validate / enumerate; only flags that were actually
// passed override the config file.
struct SharedFlags {
  CLI::App* sub = nullptr;
  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  int chains = 0;
  long long steps = 0;
  double seconds = 0.0;
  std::string sampler;
  std::string out;
  int parallelism = 0;
};

void add_shared_flags(CLI::App* sub, SharedFlags& f) {
  f.sub = sub;
  sub->add_option("--config", f.config_path,
                  "config file with one 'key = value' per line");
  sub->add_option("--set", f.sets,
                  "override any config key as key=value (repeatable)");
  sub->add_option("--seed", f.seed, "master RNG seed");
  sub->add_option("--chains", f.chains, "number of repeated chains");
  sub->add_option("--steps", f.steps, "per-chain step budget (0 = none)");
  sub->add_option("--seconds", f.seconds,
                  "per-chain wall-clock budget (0 = none)");
  sub->add_option("--sampler", f.sampler,
                  "exact | aldous-broder | basis-exchange | unif-zonotope | "
                  "vol-zonotope | compare");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--parallelism", f.parallelism,
                  "worker threads across chains");
}

RunConfig build_config(const SharedFlags& f) {
  RunConfig config;
  if (f.sub->count("--config") > 0) config = load_config_file(f.config_path);
  for (const std::string& kv : f.sets) {
    const auto pos = kv.find('=');
    if (pos == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    set_config_key(config, trim(kv.substr(0, pos)), trim(kv.substr(pos + 1)));
  }
  if (f.sub->count("--seed") > 0) config.seed = f.seed;
  if (f.sub->count("--chains") > 0) config.chains = f.chains;
  if (f.sub->count("--steps") > 0) config.steps = f.steps;
  if (f.sub->count("--seconds") > 0) config.seconds = f.seconds;
  if (f.sub->count("--sampler") > 0) config.sampler = f.sampler;
  if (f.sub->count("--out") > 0) config.out = f.out;
  if (f.sub->count("--parallelism") > 0) config.parallelism = f.parallelism;
  return config;
}

int do_run(const SharedFlags& f) {
  const RunConfig config = build_config(f);
  const RunResult result = run_experiment(config);
  std::cout << "wrote " << result.trace_files.size() << " trace(s) under "
            << result.out_dir << "\n";
  std::cout << "metrics: " << result.out_dir << "/" << result.metrics_file
            << "\n";
  if (!result.psrf_file.empty()) {
    std::cout << "psrf: " << result.out_dir << "/" << result.psrf_file << "\n";
  }
  std::cout << "manifest: " << result.out_dir << "/" << result.manifest_file
            << "\n";
  return 0;
}

int do_validate(const SharedFlags& f) {
  const RunConfig config = build_config(f);
  const ResolvedRun run = resolve_run(config, /*compute_truth=*/false);
  std::cout << describe_run(run);
  return 0;
}

int do_enumerate(const SharedFlags& f, const std::string& which) {
  const RunConfig config = build_config(f);
  const ResolvedRun run = resolve_run(config, /*compute_truth=*/false);
  const std::optional<ExactLaw>& law =
      which == "absdet" ? run.law_absdet : run.law_det2;
  if (!law.has_value()) {
    throw ConfigError("C(n, r) = " + std::to_string(run.enumeration_bound) +
                      " exceeds the enumeration guard " +
                      std::to_string(kEnumerationGuard));
  }
  std::cout << "basis,probability\n";
  std::cout << std::setprecision(17);
  for (const auto& [basis, prob] : law->atoms) {
    for (std::size_t i = 0; i < basis.indices.size(); ++i) {
      if (i > 0) std::cout << ' ';
      std::cout << basis.indices[i];
    }
    std::cout << ',' << prob << '\n';
  }
  return 0;
}

int do_psrf(const std::vector<std::string>& trace_paths,
            const std::string& subset_text) {
  const std::vector<int> subset = parse_index_list(subset_text, "--subset");
  std::vector<std::vector<double>> chains;
  for (const std::string& path : trace_paths) {
    const ChainTrace trace = load_trace_csv(path, SamplerKind::Exact);
    std::vector<double> indicator;
    indicator.reserve(trace.steps.size());
    for (const StepRecord& rec : trace.steps) {
      indicator.push_back(rec.basis.contains_all(subset) ? 1.0 : 0.0);
    }
    chains.push_back(std::move(indicator));
  }
  const PsrfReport report = psrf(chains);
  std::cout << std::setprecision(17);
  std::cout << "chains: " << report.num_chains << "\n";
  std::cout << "steps: " << report.num_steps << "\n";
  std::cout << "defined: " << (report.defined ? "true" : "false") << "\n";
  if (report.defined) {
    std::cout << "psrf: " << report.psrf << "\n";
    std::cout << "within: " << report.within << "\n";
    std::cout << "between: " << report.between << "\n";
    std::cout << "vhat: " << report.vhat << "\n";
  } else {
    std::cout << "note: every chain is constant, PSRF is undefined\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projection DPP sampling via zonotope hit-and-run"};
  app.set_version_flag("--version", ZONODPP_VERSION);
  app.require_subcommand(1);

  SharedFlags run_flags;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run the configured experiment");
  add_shared_flags(run_cmd, run_flags);

  SharedFlags validate_flags;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "resolve the config and report the model without sampling");
  add_shared_flags(validate_cmd, validate_flags);

  SharedFlags enum_flags;
  std::string enum_which = "det2";
  CLI::App* enum_cmd = app.add_subcommand(
      "enumerate", "print the exact basis law as CSV (enumerable models)");
  add_shared_flags(enum_cmd, enum_flags);
  enum_cmd->add_option("--law", enum_which, "det2 (DPP) or absdet (Unif(Z))")
      ->check(CLI::IsMember({"det2", "absdet"}));

  std::vector<std::string> psrf_traces;
  std::string psrf_subset;
  CLI::App* psrf_cmd = app.add_subcommand(
      "psrf", "Gelman-Rubin PSRF of an inclusion indicator over saved traces");
  psrf_cmd->add_option("traces", psrf_traces, "two or more trace CSV files")
      ->required()
      ->expected(2, -1);
  psrf_cmd->add_option("--subset", psrf_subset, "comma-separated item indices")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/usage text
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_flags);
    if (validate_cmd->parsed()) return do_validate(validate_flags);
    if (enum_cmd->parsed()) return do_enumerate(enum_flags, enum_which);
    if (psrf_cmd->parsed()) return do_psrf(psrf_traces, psrf_subset);
    return 1;
  } catch (const zonodpp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
