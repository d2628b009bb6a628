#include "zonodpp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "zonodpp/errors.hpp"
#include "zonodpp/trace_io.hpp"
#include "zonodpp/version.hpp"
#include "zonodpp/zonotope.hpp"

namespace zonodpp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

StreamDomain chain_domain(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Exact:
      return StreamDomain::Exact;
    case SamplerKind::AldousBroder:
      return StreamDomain::AldousBroder;
    case SamplerKind::BasisExchange:
      return StreamDomain::BasisExchange;
    case SamplerKind::UnifZonotope:
      return StreamDomain::UnifZonotope;
    case SamplerKind::VolZonotope:
      return StreamDomain::VolZonotope;
  }
  throw ConfigError("unknown sampler kind");
}

// Initial tile extraction with the same tie-redraw policy as the chains.
TileDecomposition extract_with_redraws(const FeatureMatrix& geometry,
                                       std::uint64_t tiling_seed,
                                       const Eigen::VectorXd& x,
                                       int* redraws_out) {
  for (int draw = 0; draw < 32; ++draw) {
    try {
      const TilingObjective c =
          draw_tiling_objective(geometry.cols(), tiling_seed, draw);
      TileDecomposition tile = extract_basis(geometry, c, x);
      if (redraws_out != nullptr) *redraws_out = draw;
      return tile;
    } catch (const TieError&) {
      continue;
    }
  }
  throw SolverError("tiling objective still tied after 32 redraws");
}

Eigen::VectorXd draw_weights(const FeatureMatrix& a, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, stream_id(StreamDomain::Weights, 0));
  Eigen::VectorXd q(a.cols());
  for (int i = 0; i < a.cols(); ++i) {
    double u = rng.uniform01();
    while (u == 0.0) u = rng.uniform01();  // keep q strictly positive
    q[i] = u;
  }
  return q;
}

double reference_inclusion(const ProjectionKernel& kernel,
                           const std::vector<int>& subset,
                           long long draws, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, stream_id(StreamDomain::Exact, 0xffffffffULL));
  long long hits = 0;
  for (long long i = 0; i < draws; ++i) {
    const Basis b = exact_projection_dpp(kernel, rng);
    if (b.contains_all(subset)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

struct ChainJob {
  SamplerKind kind;
  int chain_index = 0;
};

struct ChainOutput {
  ChainTrace trace;
  int tie_redraws = 0;
  std::string file;
};

}  // namespace

ResolvedRun resolve_run(const RunConfig& config, bool compute_truth) {
  validate_config(config);

  std::optional<Graph> graph;
  std::optional<FeatureMatrix> base;
  if (config.model == "complete") {
    graph = complete_graph(config.m);
    base = incidence_feature_matrix(*graph);
  } else if (config.model == "ba") {
    graph = barabasi_albert(config.m, config.ba_k, config.seed);
    base = incidence_feature_matrix(*graph);
  } else if (config.model == "matrix") {
    base = load_feature_matrix(config.matrix_path, config.jitter, config.seed);
  } else {
    graph = load_edge_list(config.edges_path);
    base = incidence_feature_matrix(*graph);
  }
  const int n = base->cols();

  BaseMeasure measure;
  std::string weight_source = "none";
  if (config.weight_mode == "sqrt-q") measure.mode = WeightMode::SqrtQ;
  if (config.weight_mode == "q-scaled") measure.mode = WeightMode::QScaled;
  if (measure.mode != WeightMode::None) {
    if (!config.weight_values.empty()) {
      const std::vector<double> values =
          parse_positive_list(config.weight_values, "weight_values");
      if (static_cast<int>(values.size()) != n) {
        throw ConfigError("weight_values: expected " + std::to_string(n) +
                          " entries, got " + std::to_string(values.size()));
      }
      measure.q = Eigen::Map<const Eigen::VectorXd>(values.data(), n);
      weight_source = "values";
    } else if (graph.has_value() &&
               std::any_of(graph->weights.begin(), graph->weights.end(),
                           [](double w) { return w != 1.0; })) {
      measure.q = Eigen::Map<const Eigen::VectorXd>(graph->weights.data(), n);
      weight_source = "edge-file";
    } else {
      measure.q = draw_weights(*base, config.seed);
      weight_source = "seeded-uniform";
    }
  }
  WeightedModel model = apply_base_measure(*base, measure);
  ProjectionKernel law_kernel = build_projection_kernel(model.law);

  ResolvedRun run{
      .config = config,
      .graph = std::move(graph),
      .model = std::move(model),
      .law_kernel = std::move(law_kernel),
      .q = measure.q,
      .weight_source = weight_source,
      .tiling_seed = config.tiling_seed_set ? config.tiling_seed : config.seed,
  };

  run.enumeration_bound = binomial_bound(run.cols(), run.rows());
  if (run.enumeration_bound <= kEnumerationGuard) {
    run.law_det2 = enumerate_law(run.model.law, LawKind::DetSquared);
    run.law_absdet = enumerate_law(run.model.geometry, LawKind::AbsDet);
  }

  if (config.subset_size > 0 || !config.subset.empty()) {
    if (!config.subset.empty()) {
      run.subset = parse_index_list(config.subset, "subset");
      if (run.subset.back() >= n) {
        throw ConfigError("subset: index " + std::to_string(run.subset.back()) +
                          " out of range for n = " + std::to_string(n));
      }
      if (static_cast<int>(run.subset.size()) > run.rows()) {
        throw ConfigError("subset: larger than r, inclusion is always 0");
      }
    } else {
      Rng rng = Rng::stream(config.seed, stream_id(StreamDomain::Subset, 0));
      run.subset = draw_inclusion_subset(run.law_kernel,
                                         std::min(config.subset_size,
                                                  run.rows()),
                                         rng);
    }
    if (config.reference_draws > 0) {
      run.truth_source = "reference";
      if (compute_truth) {
        run.truth = reference_inclusion(run.law_kernel, run.subset,
                                        config.reference_draws, config.seed);
      }
    } else if (run.law_det2.has_value()) {
      run.truth_source = "enumerate";
      run.truth = inclusion_probability(*run.law_det2, run.subset);
    }
  }
  return run;
}

std::string describe_run(const ResolvedRun& run) {
  const RunConfig& c = run.config;
  std::ostringstream out;
  out << "ok\n";
  out << "model: " << c.model;
  if (run.graph.has_value()) {
    out << " (vertices = " << run.graph->num_vertices
        << ", edges = " << run.graph->num_edges() << ")";
  }
  out << "\n";
  out << "r = " << run.rows() << ", n = " << run.cols() << "\n";
  out << "C(n, r) = " << run.enumeration_bound;
  if (run.law_det2.has_value()) {
    out << " (" << run.law_det2->atoms.size()
        << " bases, oracle metrics enabled)\n";
  } else {
    out << " exceeds guard " << kEnumerationGuard
        << "; warning: oracle metrics disabled\n";
  }
  out << "weights: " << c.weight_mode;
  if (run.weight_source != "none") out << " (" << run.weight_source << ")";
  out << "\n";
  out << "sampler: " << c.sampler << ", chains = " << c.chains << "\n";
  out << "budget:";
  if (c.steps > 0) out << " steps = " << c.steps;
  if (c.seconds > 0) out << " seconds = " << c.seconds;
  out << "\n";
  out << "seeds: master = " << c.seed << ", tiling = " << run.tiling_seed
      << "\n";
  if (!run.subset.empty()) {
    out << "subset:";
    for (int i : run.subset) out << " " << i;
    out << " (truth source: " << run.truth_source << ")\n";
  }
  return out.str();
}

namespace {

ChainOutput run_one_chain(const ResolvedRun& run, SamplerKind kind,
                          int chain_index) {
  const RunConfig& config = run.config;
  RunBudget budget;
  budget.max_steps = config.steps;
  budget.max_seconds = config.seconds;
  budget.record_timing = config.timing == "wall";

  Rng rng = Rng::stream(config.seed,
                        stream_id(chain_domain(kind), chain_index));
  ChainOutput out;

  if (kind == SamplerKind::Exact) {
    ExactStepper stepper(run.law_kernel);
    out.trace = run_chain(stepper, kind, rng, budget);
  } else if (kind == SamplerKind::AldousBroder) {
    AldousBroderStepper stepper(*run.graph);
    out.trace = run_chain(stepper, kind, rng, budget);
  } else {
    // Chains with state share the per-repetition initializer x0 = A u so a
    // compare run starts basis-exchange and vol-zonotope from the same basis.
    Rng init = Rng::stream(config.seed,
                           stream_id(StreamDomain::ChainInit, chain_index));
    const Eigen::VectorXd x0 = uniform_point(run.model.geometry, init);
    if (kind == SamplerKind::BasisExchange) {
      int redraws = 0;
      TileDecomposition tile = extract_with_redraws(
          run.model.geometry, run.tiling_seed, x0, &redraws);
      out.tie_redraws = redraws;
      BasisExchangeChain stepper(run.model.law, std::move(tile.basis),
                                 config.laziness);
      out.trace = run_chain(stepper, kind, rng, budget);
    } else {
      ZonotopeChain stepper(
          run.model, kind,
          draw_tiling_objective(run.cols(), run.tiling_seed, 0), x0);
      out.trace = run_chain(stepper, kind, rng, budget);
      out.tie_redraws = stepper.tie_redraws();
    }
  }
  return out;
}

void append_metric(std::ostream& out, long long step, const std::string& name,
                   int chain, double value) {
  out << step << ',' << name << ',' << chain << ',' << value << '\n';
}

}  // namespace

RunResult run_experiment(const RunConfig& config) {
  ResolvedRun run = resolve_run(config, /*compute_truth=*/true);
  const std::string started = utc_now();

  fs::create_directories(config.out);
  RunResult result;
  result.out_dir = config.out;

  std::vector<SamplerKind> kinds;
  if (config.sampler == "compare") {
    kinds = {SamplerKind::BasisExchange, SamplerKind::VolZonotope};
  } else {
    kinds = {parse_sampler(config.sampler)};
  }

  json manifest;
  manifest["version"] = ZONODPP_VERSION;
  manifest["started_utc"] = started;
  manifest["config"] = {
      {"model", config.model},
      {"m", config.m},
      {"ba_k", config.ba_k},
      {"matrix_path", config.matrix_path},
      {"edges_path", config.edges_path},
      {"jitter", config.jitter},
      {"weight_mode", config.weight_mode},
      {"weight_values", config.weight_values},
      {"sampler", config.sampler},
      {"steps", config.steps},
      {"seconds", config.seconds},
      {"chains", config.chains},
      {"laziness", config.laziness},
      {"seed", config.seed},
      {"tiling_seed", run.tiling_seed},
      {"subset_size", config.subset_size},
      {"subset", config.subset},
      {"reference_draws", config.reference_draws},
      {"burn_in", config.burn_in},
      {"out", config.out},
      {"timing", config.timing},
      {"trace_format", config.trace_format},
      {"parallelism", config.parallelism},
  };
  manifest["resolved"] = {
      {"r", run.rows()},
      {"n", run.cols()},
      {"num_subsets_bound", run.enumeration_bound},
      {"enumerable", run.law_det2.has_value()},
      {"weight_source", run.weight_source},
      {"q", run.q.size() == 0
                ? std::vector<double>{}
                : std::vector<double>(run.q.data(), run.q.data() + run.q.size())},
      {"subset", run.subset},
      {"truth", run.truth},
      {"truth_source", run.truth_source},
  };
  const auto manifest_path = fs::path(config.out) / "manifest.json";
  const auto write_manifest = [&manifest, &manifest_path] {
    std::ofstream out(manifest_path);
    out << manifest.dump(2) << '\n';
  };

  try {
    // --- run every (sampler, chain) job, optionally in parallel ---
    std::vector<ChainJob> jobs;
    for (SamplerKind kind : kinds) {
      for (int i = 0; i < config.chains; ++i) jobs.push_back({kind, i});
    }
    std::vector<ChainOutput> outputs(jobs.size());
    const int workers =
        std::max(1, std::min<int>(config.parallelism,
                                  static_cast<int>(jobs.size())));
    if (workers == 1) {
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        outputs[j] = run_one_chain(run, jobs[j].kind, jobs[j].chain_index);
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> failures(workers);
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (;;) {
              const std::size_t j = next.fetch_add(1);
              if (j >= jobs.size()) return;
              outputs[j] =
                  run_one_chain(run, jobs[j].kind, jobs[j].chain_index);
            }
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
      }
    }

    const std::string ext = config.trace_format == "csv" ? "csv" : "jsonl";
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      const std::string name = "trace_" + sampler_name(jobs[j].kind) +
                               "_chain" + std::to_string(jobs[j].chain_index) +
                               "." + ext;
      outputs[j].file = name;
      save_trace((fs::path(config.out) / name).string(), outputs[j].trace,
                 config.trace_format);
      result.trace_files.push_back(name);
    }

    // --- metrics ---
    const auto metrics_path = fs::path(config.out) / "metrics.csv";
    std::ofstream metrics(metrics_path);
    if (!metrics) throw Error("cannot write " + metrics_path.string());
    metrics << "step,statistic,chain,value\n";
    std::ostringstream psrf_report;

    for (SamplerKind kind : kinds) {
      const std::string tag = sampler_name(kind);
      std::vector<ChainTrace> traces;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].kind == kind) traces.push_back(outputs[j].trace);
      }

      for (std::size_t i = 0; i < traces.size(); ++i) {
        const long long last =
            traces[i].steps.empty() ? 0 : traces[i].steps.back().step;
        if (traces[i].proposed > 0) {
          append_metric(metrics, last, "acceptance_rate_" + tag,
                        static_cast<int>(i), acceptance_rate(traces[i]));
        }
        if (!traces[i].steps.empty()) {
          append_metric(metrics, last, "move_rate_" + tag,
                        static_cast<int>(i), move_rate(traces[i]));
        }
      }

      const ExactLaw* law = nullptr;
      if (kind == SamplerKind::UnifZonotope) {
        law = run.law_absdet.has_value() ? &*run.law_absdet : nullptr;
      } else {
        law = run.law_det2.has_value() ? &*run.law_det2 : nullptr;
      }
      if (law != nullptr) {
        const BasisCounts counts = basis_counts(traces, config.burn_in);
        const long long last =
            traces.front().steps.empty() ? 0 : traces.front().steps.back().step;
        append_metric(metrics, last, "tv_distance_" + tag, -1,
                      tv_distance(counts, *law));
      }

      if (!run.subset.empty()) {
        std::vector<std::vector<double>> running;
        std::vector<std::vector<double>> indicator;
        for (const ChainTrace& trace : traces) {
          running.push_back(running_inclusion(trace, run.subset));
          std::vector<double> ind;
          ind.reserve(trace.steps.size());
          for (const StepRecord& rec : trace.steps) {
            ind.push_back(rec.basis.contains_all(run.subset) ? 1.0 : 0.0);
          }
          indicator.push_back(std::move(ind));
        }

        const std::size_t len = running.front().size();
        const std::size_t stride = std::max<std::size_t>(1, len / 1000);
        for (std::size_t i = 0; i < running.size(); ++i) {
          for (std::size_t t = 0; t < len; t += stride) {
            append_metric(metrics, static_cast<long long>(t),
                          "inclusion_" + tag, static_cast<int>(i),
                          running[i][t]);
          }
          append_metric(metrics, static_cast<long long>(len - 1),
                        "inclusion_" + tag, static_cast<int>(i),
                        running[i][len - 1]);
        }

        if (run.truth_source != "none" && run.truth > 0.0) {
          std::vector<std::vector<double>> rel;
          for (std::size_t i = 0; i < running.size(); ++i) {
            rel.push_back(relative_errors(running[i], run.truth));
            append_metric(metrics, static_cast<long long>(len - 1),
                          "final_rel_error_" + tag, static_cast<int>(i),
                          rel.back().back());
          }
          if (rel.size() >= 2) {
            const DecileBands bands = decile_bands(rel);
            for (std::size_t t = 0; t < len; t += stride) {
              append_metric(metrics, static_cast<long long>(t),
                            "rel_error_p10_" + tag, -1, bands.lo[t]);
              append_metric(metrics, static_cast<long long>(t),
                            "rel_error_median_" + tag, -1, bands.median[t]);
              append_metric(metrics, static_cast<long long>(t),
                            "rel_error_p90_" + tag, -1, bands.hi[t]);
            }
          }
        }

        if (indicator.size() >= 2 && len >= 10) {
          const PsrfReport report = psrf(indicator);
          psrf_report << "sampler: " << tag << "\n";
          psrf_report << "chains: " << report.num_chains << "\n";
          psrf_report << "steps: " << report.num_steps << "\n";
          psrf_report << "defined: " << (report.defined ? "true" : "false")
                      << "\n";
          if (report.defined) {
            psrf_report << "psrf: " << report.psrf << "\n";
            psrf_report << "within: " << report.within << "\n";
            psrf_report << "between: " << report.between << "\n";
            psrf_report << "vhat: " << report.vhat << "\n";
          }
          psrf_report << "\n";
        }
      }
    }
    metrics.flush();
    if (!metrics) throw Error("failed writing " + metrics_path.string());
    result.metrics_file = "metrics.csv";

    const std::string psrf_text = psrf_report.str();
    if (!psrf_text.empty()) {
      const auto psrf_path = fs::path(config.out) / "psrf.txt";
      std::ofstream out(psrf_path);
      out << psrf_text;
      result.psrf_file = "psrf.txt";
    }

    json tie_redraws = json::object();
    json initial_bases = json::object();
    for (SamplerKind kind : kinds) {
      std::vector<int> redraws;
      json bases = json::array();
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].kind != kind) continue;
        redraws.push_back(outputs[j].tie_redraws);
        bases.push_back(outputs[j].trace.initial_basis.indices);
      }
      tie_redraws[sampler_name(kind)] = redraws;
      initial_bases[sampler_name(kind)] = bases;
    }
    manifest["resolved"]["tiling_tie_redraws"] = tie_redraws;
    manifest["resolved"]["initial_bases"] = initial_bases;
    json outputs_json;
    outputs_json["traces"] = result.trace_files;
    outputs_json["metrics"] = result.metrics_file;
    if (!result.psrf_file.empty()) outputs_json["psrf"] = result.psrf_file;
    manifest["outputs"] = outputs_json;
    manifest["status"] = "complete";
    manifest["finished_utc"] = utc_now();
    write_manifest();
    result.manifest_file = "manifest.json";
    result.complete = true;
    return result;
  } catch (const std::exception& e) {
    manifest["status"] = "partial";
    manifest["error"] = e.what();
    manifest["finished_utc"] = utc_now();
    write_manifest();
    throw;
  }
}

}  // namespace zonodpp
