#ifndef ZONODPP_RUNNER_HPP
#define ZONODPP_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "zonodpp/config.hpp"
#include "zonodpp/diagnostics.hpp"
#include "zonodpp/models.hpp"
#include "zonodpp/samplers.hpp"

namespace zonodpp {

// Everything derived from a RunConfig before any chain runs: the realized
// model, weights, law kernel, inclusion subset and (optionally) its truth.
struct ResolvedRun {
  RunConfig config;
  std::optional<Graph> graph;
  WeightedModel model;
  ProjectionKernel law_kernel;  // kernel of the law (sqrt-q) matrix
  Eigen::VectorXd q;            // empty when unweighted
  std::string weight_source;    // none | values | edge-file | seeded-uniform
  std::uint64_t tiling_seed = 0;
  std::vector<int> subset;      // empty when disabled
  double enumeration_bound = 0.0;  // C(n, r)
  std::optional<ExactLaw> law_det2;    // det^2 law when enumerable
  std::optional<ExactLaw> law_absdet;  // |det| law of the geometry matrix
  double truth = 0.0;               // P(subset in B) under the det^2 law
  std::string truth_source = "none";  // none | enumerate | reference

  int rows() const { return model.law.rows(); }
  int cols() const { return model.law.cols(); }
};

// Builds the model and diagnostics inputs. compute_truth = false skips the
// (potentially slow) exact-sampler reference pass; the validate verb uses
// that to stay fast.
ResolvedRun resolve_run(const RunConfig& config, bool compute_truth);

// Human-readable resolution report for the validate verb.
std::string describe_run(const ResolvedRun& run);

struct RunResult {
  std::string out_dir;
  std::vector<std::string> trace_files;
  std::string manifest_file;
  std::string metrics_file;
  std::string psrf_file;  // empty when PSRF was not computed
  bool complete = false;
};

// Executes the configured sampler(s), writes traces + metrics.csv +
// psrf.txt + manifest.json under config.out. On failure a partial manifest
// is written and the error is rethrown.
RunResult run_experiment(const RunConfig& config);

}  // namespace zonodpp

#endif
