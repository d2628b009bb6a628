#include "zonodpp/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "zonodpp/errors.hpp"

namespace zonodpp {

std::string sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Exact:
      return "exact";
    case SamplerKind::AldousBroder:
      return "aldous-broder";
    case SamplerKind::BasisExchange:
      return "basis-exchange";
    case SamplerKind::UnifZonotope:
      return "unif-zonotope";
    case SamplerKind::VolZonotope:
      return "vol-zonotope";
  }
  throw ConfigError("unknown sampler kind");
}

SamplerKind parse_sampler(const std::string& name) {
  if (name == "exact") return SamplerKind::Exact;
  if (name == "aldous-broder") return SamplerKind::AldousBroder;
  if (name == "basis-exchange") return SamplerKind::BasisExchange;
  if (name == "unif-zonotope") return SamplerKind::UnifZonotope;
  if (name == "vol-zonotope") return SamplerKind::VolZonotope;
  throw ConfigError("unknown sampler '" + name +
                    "' (expected exact | aldous-broder | basis-exchange | "
                    "unif-zonotope | vol-zonotope)");
}

Basis exact_projection_dpp(const ProjectionKernel& kernel, Rng& rng) {
  const Eigen::MatrixXd& k = kernel.matrix();
  const int n = kernel.size();
  const int r = kernel.rank();
  Eigen::VectorXd rho = k.diagonal();  // residual conditionals
  Eigen::MatrixXd e(n, r);             // on-the-fly Cholesky columns
  std::vector<int> picked;
  std::vector<char> taken(n, 0);
  picked.reserve(r);

  for (int t = 0; t < r; ++t) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (rho[i] < -1e-8) {
        throw NumericalError("negative conditional mass " +
                             std::to_string(rho[i]) + " in exact sampler");
      }
      if (rho[i] > 0.0) total += rho[i];
    }
    if (total <= 0.0) {
      throw NumericalError("conditional mass vanished in exact sampler");
    }
    double target = rng.uniform01() * total;
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (taken[i] || rho[i] <= 0.0) continue;
      target -= rho[i];
      pick = i;
      if (target <= 0.0) break;
    }

    Eigen::VectorXd col = k.col(pick);
    if (t > 0) col.noalias() -= e.leftCols(t) * e.row(pick).head(t).transpose();
    col /= std::sqrt(rho[pick]);
    e.col(t) = col;
    rho -= col.cwiseProduct(col);
    taken[pick] = 1;
    rho[pick] = 0.0;
    picked.push_back(pick);
  }
  std::sort(picked.begin(), picked.end());
  return Basis{std::move(picked)};
}

Basis aldous_broder(const Graph& g, Rng& rng) {
  if (!is_connected(g)) {
    throw ConfigError("aldous_broder requires a connected graph");
  }
  const int m = g.num_vertices;
  std::vector<std::vector<std::pair<int, int>>> adj(m);  // (neighbor, edge)
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& [u, v] = g.edges[e];
    adj[u].emplace_back(v, e);
    adj[v].emplace_back(u, e);
  }
  std::vector<char> seen(m, 0);
  std::vector<int> tree;
  tree.reserve(m - 1);
  int current = static_cast<int>(rng.uniform_int(m));
  seen[current] = 1;
  int covered = 1;
  while (covered < m) {
    const auto& [next, edge] = adj[current][rng.uniform_int(adj[current].size())];
    if (!seen[next]) {
      seen[next] = 1;
      ++covered;
      tree.push_back(edge);
    }
    current = next;
  }
  std::sort(tree.begin(), tree.end());
  return Basis{std::move(tree)};
}

bool ExactStepper::step(Rng& rng) {
  last_ = exact_projection_dpp(kernel_, rng);
  return true;
}

AldousBroderStepper::AldousBroderStepper(const Graph& g) : graph_(g) {
  if (!is_connected(g)) {
    throw ConfigError("aldous_broder requires a connected graph");
  }
}

bool AldousBroderStepper::step(Rng& rng) {
  last_ = aldous_broder(graph_, rng);
  return true;
}

BasisExchangeChain::BasisExchangeChain(const FeatureMatrix& law, Basis b0,
                                       double laziness)
    : a_(law), basis_(std::move(b0)), laziness_(laziness) {
  if (laziness_ < 0.0 || laziness_ >= 1.0) {
    throw ConfigError("laziness must lie in [0, 1)");
  }
  if (static_cast<int>(basis_.indices.size()) != a_.rows()) {
    throw ConfigError("initial basis has wrong cardinality");
  }
  log_vol2_ = log_squared_volume(a_, basis_.indices);
  if (std::isinf(log_vol2_)) {
    throw ConfigError("initial basis columns are dependent");
  }
  for (int i = 0; i < a_.cols(); ++i) {
    if (!basis_.contains(i)) complement_.push_back(i);
  }
}

bool BasisExchangeChain::step(Rng& rng) {
  proposed_last_ = false;
  if (rng.uniform01() < laziness_) return false;  // lazy self-loop

  proposed_last_ = true;
  const int r = static_cast<int>(basis_.indices.size());
  const int si = static_cast<int>(rng.uniform_int(r));
  const int ti = static_cast<int>(rng.uniform_int(complement_.size()));
  const int s = basis_.indices[si];
  const int t = complement_[ti];

  std::vector<int> proposal = basis_.indices;
  proposal[si] = t;
  std::sort(proposal.begin(), proposal.end());
  const double log_vol2_p = log_squared_volume(a_, proposal);
  // accept w.p. Vol^2(P) / (Vol^2(B) + Vol^2(P)); zero when P is dependent
  double accept_prob = 0.0;
  if (!std::isinf(log_vol2_p)) {
    accept_prob = 1.0 / (1.0 + std::exp(log_vol2_ - log_vol2_p));
  }
  if (rng.uniform01() >= accept_prob) return false;

  basis_.indices = std::move(proposal);
  complement_[ti] = s;
  log_vol2_ = log_vol2_p;
  return true;
}

ZonotopeChain::ZonotopeChain(const WeightedModel& model, SamplerKind kind,
                             TilingObjective objective, Eigen::VectorXd x0)
    : model_(model),
      kind_(kind),
      extractor_(model.geometry, std::move(objective)),
      x_(std::move(x0)) {
  if (kind_ != SamplerKind::UnifZonotope && kind_ != SamplerKind::VolZonotope) {
    throw ConfigError("ZonotopeChain supports unif-zonotope and vol-zonotope");
  }
  TileDecomposition tile = extract_with_retry(x_);
  basis_ = std::move(tile.basis);
  log_vol2_ = log_squared_volume(model_.acceptance, basis_.indices);
}

TileDecomposition ZonotopeChain::extract_with_retry(const Eigen::VectorXd& x) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    try {
      return extractor_.extract(x);
    } catch (const TieError&) {
      ++tie_redraws_;
      const TilingObjective& cur = extractor_.objective();
      extractor_.set_objective(draw_tiling_objective(
          model_.geometry.cols(), cur.seed, cur.draw_index + 1));
    }
  }
  throw SolverError("tiling objective still tied after 32 redraws");
}

bool ZonotopeChain::step(Rng& rng) {
  const Eigen::VectorXd d = rng.unit_vector(model_.geometry.rows());
  const Chord chord = extractor_.chord(x_, d);
  const double alpha =
      rng.uniform(chord.alpha_min, chord.alpha_max);
  Eigen::VectorXd proposal = chord.point_at(alpha);
  TileDecomposition tile = extract_with_retry(proposal);

  if (kind_ == SamplerKind::UnifZonotope) {
    // MH acceptance is identically 1 for the uniform target.
    x_ = std::move(proposal);
    basis_ = std::move(tile.basis);
    return true;
  }

  const double log_vol2_p =
      log_squared_volume(model_.acceptance, tile.basis.indices);
  // accept w.p. min(1, |det A_B~ / det A_B|), in log domain
  const double log_ratio = 0.5 * (log_vol2_p - log_vol2_);
  if (log_ratio < 0.0 && rng.uniform01() >= std::exp(log_ratio)) {
    return false;
  }
  x_ = std::move(proposal);
  basis_ = std::move(tile.basis);
  log_vol2_ = log_vol2_p;
  return true;
}

ChainTrace run_chain(Stepper& stepper, SamplerKind kind, Rng& rng,
                     const RunBudget& budget) {
  if (budget.max_steps <= 0 && budget.max_seconds <= 0.0) {
    throw ConfigError("chain budget is empty: set steps and/or seconds > 0");
  }
  ChainTrace trace;
  trace.kind = kind;
  trace.initial_basis = stepper.basis();
  if (budget.max_steps > 0) {
    trace.steps.reserve(static_cast<std::size_t>(
        std::min<long long>(budget.max_steps, 1 << 20)));
  }

  const bool need_clock = budget.max_seconds > 0.0 || budget.record_timing;
  const auto start = std::chrono::steady_clock::now();
  for (long long step = 0;; ++step) {
    if (budget.max_steps > 0 && step >= budget.max_steps) break;
    long long elapsed_ns = 0;
    if (need_clock) {
      elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
      if (budget.max_seconds > 0.0 && elapsed_ns >= budget.max_seconds * 1e9) {
        break;
      }
    }
    const bool accepted = stepper.step(rng);
    StepRecord rec;
    rec.step = step;
    rec.basis = stepper.basis();
    rec.accepted = accepted;
    if (budget.record_timing) {
      rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
    trace.steps.push_back(std::move(rec));
    if (stepper.proposed_last()) ++trace.proposed;
    if (accepted) ++trace.accepted;
  }
  return trace;
}

}  // namespace zonodpp
