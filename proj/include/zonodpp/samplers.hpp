#ifndef ZONODPP_SAMPLERS_HPP
#define ZONODPP_SAMPLERS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "zonodpp/models.hpp"
#include "zonodpp/numerics.hpp"
#include "zonodpp/rng.hpp"
#include "zonodpp/zonotope.hpp"

namespace zonodpp {

enum class SamplerKind {
  Exact,          // chain-rule (HKPV) i.i.d. draws
  AldousBroder,   // uniform spanning tree oracle, unweighted graphs
  BasisExchange,  // Alg. 1 baseline
  UnifZonotope,   // Alg. 2, targets Unif(Z(A)), bases ~ |det B|
  VolZonotope,    // Algs. 4-5, bases ~ det^2 B
};

std::string sampler_name(SamplerKind kind);
SamplerKind parse_sampler(const std::string& name);

struct StepRecord {
  long long step = 0;
  Basis basis;
  bool accepted = false;
  long long elapsed_ns = 0;  // cumulative since chain start; 0 if timing off
};

struct ChainTrace {
  SamplerKind kind = SamplerKind::Exact;
  Basis initial_basis;  // B_0 where the sampler has one; not a step record
  std::vector<StepRecord> steps;
  long long proposed = 0;  // steps that made a proposal (lazy steps do not)
  long long accepted = 0;
};

// One independent projection-DPP draw by the chain rule:
// p(pick i | I) proportional to K_ii - K_{i,I} K_I^{-1} K_{I,i}, maintained
// incrementally in O(n) per candidate scan and O(n * picked) per update.
// Conditionals in [-1e-8, 0) clamp to zero; below that is a numerical error.
Basis exact_projection_dpp(const ProjectionKernel& kernel, Rng& rng);

// Uniform spanning tree of a connected graph via the first-entry random walk;
// returns sorted edge-column indices. Ignores edge weights.
Basis aldous_broder(const Graph& g, Rng& rng);

// Common chain interface so the runner can drive any sampler under a budget.
class Stepper {
 public:
  virtual ~Stepper() = default;
  // Advances one step; returns whether a move was accepted. The post-step
  // basis is available from basis().
  virtual bool step(Rng& rng) = 0;
  virtual const Basis& basis() const = 0;
  // False when the last step was a laziness self-loop without a proposal.
  virtual bool proposed_last() const { return true; }
};

// Each step is a fresh i.i.d. exact draw.
class ExactStepper : public Stepper {
 public:
  explicit ExactStepper(const ProjectionKernel& kernel) : kernel_(kernel) {}
  bool step(Rng& rng) override;
  const Basis& basis() const override { return last_; }

 private:
  const ProjectionKernel& kernel_;
  Basis last_;
};

// Each step is a fresh uniform spanning tree.
class AldousBroderStepper : public Stepper {
 public:
  explicit AldousBroderStepper(const Graph& g);
  bool step(Rng& rng) override;
  const Basis& basis() const override { return last_; }

 private:
  const Graph& graph_;
  Basis last_;
};

// Alg. 1: lazy basis-exchange walk with acceptance
// Vol^2(P) / (Vol^2(B) + Vol^2(P)); stationary law is det^2 of the law
// matrix. Laziness self-loops report proposed_last() = false.
class BasisExchangeChain : public Stepper {
 public:
  BasisExchangeChain(const FeatureMatrix& law, Basis b0, double laziness = 0.5);
  bool step(Rng& rng) override;
  const Basis& basis() const override { return basis_; }
  bool proposed_last() const override { return proposed_last_; }

 private:
  const FeatureMatrix& a_;
  Basis basis_;
  std::vector<int> complement_;
  double log_vol2_;
  double laziness_;
  bool proposed_last_ = false;
};

// Hit-and-run over Z(geometry): UnifZonotope always accepts and targets
// Unif(Z(A)) (bases ~ |det B| by Remark 1); VolZonotope accepts with
// |det acceptance_{:B~} / det acceptance_{:B}| and targets bases ~ det^2.
// A TieError during extraction redraws the tiling objective (continuing its
// recorded stream) and retries; the basis law is invariant to the tiling.
class ZonotopeChain : public Stepper {
 public:
  ZonotopeChain(const WeightedModel& model, SamplerKind kind,
                TilingObjective objective, Eigen::VectorXd x0);
  bool step(Rng& rng) override;
  const Basis& basis() const override { return basis_; }
  const Eigen::VectorXd& point() const { return x_; }
  const TilingObjective& objective() const { return extractor_.objective(); }
  int tie_redraws() const { return tie_redraws_; }

 private:
  TileDecomposition extract_with_retry(const Eigen::VectorXd& x);

  const WeightedModel& model_;
  SamplerKind kind_;
  TileExtractor extractor_;
  Eigen::VectorXd x_;
  Basis basis_;
  double log_vol2_;  // acceptance-matrix log squared volume of basis_
  int tie_redraws_ = 0;
};

struct RunBudget {
  long long max_steps = 0;   // 0 = no step limit
  double max_seconds = 0.0;  // 0 = no wall-clock limit
  bool record_timing = true;
};

// Drives a stepper until a budget is hit, recording one StepRecord per step.
// At least one budget must be set.
ChainTrace run_chain(Stepper& stepper, SamplerKind kind, Rng& rng,
                     const RunBudget& budget);

}  // namespace zonodpp

#endif
