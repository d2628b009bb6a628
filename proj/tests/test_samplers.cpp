#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "zonodpp/diagnostics.hpp"
#include "zonodpp/errors.hpp"
#include "zonodpp/models.hpp"
#include "zonodpp/samplers.hpp"
#include "zonodpp/zonotope.hpp"

using namespace zonodpp;

namespace {

FeatureMatrix fig1() {
  Eigen::MatrixXd a(2, 4);
  a << 1, 2, 0, -1, 0, 1, 2, 1;
  return FeatureMatrix(a);
}

double trace_tv(const std::vector<ChainTrace>& traces, const ExactLaw& law,
                double burn_in = 0.0) {
  return tv_distance(basis_counts(traces, burn_in), law);
}

}  // namespace

TEST_CASE("samplers: names round-trip") {
  for (const SamplerKind kind :
       {SamplerKind::Exact, SamplerKind::AldousBroder,
        SamplerKind::BasisExchange, SamplerKind::UnifZonotope,
        SamplerKind::VolZonotope}) {
    CHECK(parse_sampler(sampler_name(kind)) == kind);
  }
  CHECK(parse_sampler("vol-zonotope") == SamplerKind::VolZonotope);
  CHECK_THROWS_AS(parse_sampler("bogus"), ConfigError);
}

TEST_CASE("samplers: exact draws match the running-example law") {
  const FeatureMatrix a = fig1();
  const ProjectionKernel kernel = build_projection_kernel(a);
  const ExactLaw law = enumerate_law(a, LawKind::DetSquared);

  Rng rng(101);
  ChainTrace trace;
  trace.kind = SamplerKind::Exact;
  const int draws = 100000;
  Eigen::Vector4d marginal = Eigen::Vector4d::Zero();
  for (int i = 0; i < draws; ++i) {
    StepRecord rec;
    rec.step = i;
    rec.basis = exact_projection_dpp(kernel, rng);
    REQUIRE(rec.basis.indices.size() == 2);
    for (int idx : rec.basis.indices) marginal[idx] += 1.0;
    trace.steps.push_back(std::move(rec));
  }
  CHECK(trace_tv({trace}, law) < 0.01);

  // Eq. 1 at singletons: P(i in B) = K_ii.
  marginal /= draws;
  for (int i = 0; i < 4; ++i) {
    const double p = kernel.matrix()(i, i);
    const double se = std::sqrt(p * (1.0 - p) / draws);
    CHECK(std::abs(marginal[i] - p) < 4.0 * se);
  }
}

TEST_CASE("samplers: Aldous-Broder on K_3 is uniform over trees") {
  const Graph k3 = complete_graph(3);
  Rng rng(55);
  std::map<std::vector<int>, int> counts;
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) {
    const Basis tree = aldous_broder(k3, rng);
    REQUIRE(tree.indices.size() == 2);
    ++counts[tree.indices];
  }
  CHECK(counts.size() == 3);
  for (const auto& [tree, count] : counts) {
    CHECK(std::abs(static_cast<double>(count) / draws - 1.0 / 3.0) < 0.01);
  }
}

TEST_CASE("samplers: Aldous-Broder on a path returns its unique tree") {
  Graph path;
  path.num_vertices = 3;
  path.edges = {{0, 1}, {1, 2}};
  path.weights = {1.0, 1.0};
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const Basis tree = aldous_broder(path, rng);
    CHECK(tree.indices == std::vector<int>{0, 1});
  }
}

TEST_CASE("samplers: Aldous-Broder requires a connected graph") {
  Graph g;
  g.num_vertices = 4;
  g.edges = {{0, 1}, {2, 3}};
  g.weights = {1.0, 1.0};
  Rng rng(1);
  CHECK_THROWS_AS(aldous_broder(g, rng), ConfigError);
}

TEST_CASE("samplers: basis-exchange laziness controls proposal rate") {
  const FeatureMatrix a = fig1();
  const Basis b0 = make_basis(a, {0, 1});

  SUBCASE("laziness one half") {
    BasisExchangeChain chain(a, b0, 0.5);
    Rng rng(13);
    ChainTrace trace =
        run_chain(chain, SamplerKind::BasisExchange, rng, {.max_steps = 20000,
                                                           .record_timing = false});
    const double proposal_rate =
        static_cast<double>(trace.proposed) / trace.steps.size();
    CHECK(std::abs(proposal_rate - 0.5) < 0.02);
    CHECK(trace.accepted <= trace.proposed);
  }

  SUBCASE("laziness zero proposes every step") {
    BasisExchangeChain chain(a, b0, 0.0);
    Rng rng(13);
    ChainTrace trace =
        run_chain(chain, SamplerKind::BasisExchange, rng, {.max_steps = 5000,
                                                           .record_timing = false});
    CHECK(trace.proposed == static_cast<long long>(trace.steps.size()));
  }
}

TEST_CASE("samplers: basis-exchange reaches the DPP law") {
  const FeatureMatrix a = fig1();
  const ExactLaw law = enumerate_law(a, LawKind::DetSquared);
  BasisExchangeChain chain(a, make_basis(a, {0, 1}), 0.5);
  Rng rng(207);
  ChainTrace trace = run_chain(chain, SamplerKind::BasisExchange, rng,
                               {.max_steps = 200000, .record_timing = false});
  CHECK(trace_tv({trace}, law, 0.1) < 0.03);
}

TEST_CASE("samplers: basis-exchange on weighted law") {
  // q = (1,1,1,4) via sqrt-q: stationary masses (1,4,4,16,36,16)/77.
  Eigen::VectorXd q(4);
  q << 1, 1, 1, 4;
  const WeightedModel model =
      apply_base_measure(fig1(), {.q = q, .mode = WeightMode::SqrtQ});
  const ExactLaw law = enumerate_law(model.law, LawKind::DetSquared);
  BasisExchangeChain chain(model.law, make_basis(model.law, {0, 1}), 0.5);
  Rng rng(208);
  ChainTrace trace = run_chain(chain, SamplerKind::BasisExchange, rng,
                               {.max_steps = 200000, .record_timing = false});
  CHECK(trace_tv({trace}, law, 0.1) < 0.03);
}

TEST_CASE("samplers: unif-zonotope targets the volume law") {
  const FeatureMatrix a = fig1();
  const WeightedModel model = apply_base_measure(a, {});
  const ExactLaw law = enumerate_law(a, LawKind::AbsDet);

  Rng init(71);
  const Eigen::VectorXd x0 = uniform_point(a, init);
  ZonotopeChain chain(model, SamplerKind::UnifZonotope,
                      draw_tiling_objective(4, 71, 0), x0);
  Rng rng(72);
  ChainTrace trace = run_chain(chain, SamplerKind::UnifZonotope, rng,
                               {.max_steps = 40000, .record_timing = false});
  // Every hit-and-run proposal is accepted.
  CHECK(trace.accepted == trace.proposed);
  CHECK(trace_tv({trace}, law, 0.1) < 0.04);
}

TEST_CASE("samplers: vol-zonotope targets the DPP law") {
  const FeatureMatrix a = fig1();
  const WeightedModel model = apply_base_measure(a, {});
  const ExactLaw law = enumerate_law(a, LawKind::DetSquared);

  Rng init(81);
  const Eigen::VectorXd x0 = uniform_point(a, init);
  ZonotopeChain chain(model, SamplerKind::VolZonotope,
                      draw_tiling_objective(4, 81, 0), x0);
  Rng rng(82);
  ChainTrace trace = run_chain(chain, SamplerKind::VolZonotope, rng,
                               {.max_steps = 40000, .record_timing = false});
  CHECK(trace_tv({trace}, law, 0.1) < 0.04);
  CHECK(trace.accepted <= trace.proposed);
}

TEST_CASE("samplers: vol-zonotope with q-scaled weights") {
  Eigen::VectorXd q(4);
  q << 1, 1, 1, 4;
  const WeightedModel model =
      apply_base_measure(fig1(), {.q = q, .mode = WeightMode::QScaled});
  const ExactLaw law = enumerate_law(model.law, LawKind::DetSquared);

  Rng init(91);
  const Eigen::VectorXd x0 = uniform_point(model.geometry, init);
  ZonotopeChain chain(model, SamplerKind::VolZonotope,
                      draw_tiling_objective(4, 91, 0), x0);
  Rng rng(92);
  ChainTrace trace = run_chain(chain, SamplerKind::VolZonotope, rng,
                               {.max_steps = 60000, .record_timing = false});
  CHECK(trace_tv({trace}, law, 0.1) < 0.04);
}

TEST_CASE("samplers: chain states stay inside the zonotope") {
  const FeatureMatrix a = fig1();
  const WeightedModel model = apply_base_measure(a, {});
  Rng init(3);
  const Eigen::VectorXd x0 = uniform_point(a, init);
  ZonotopeChain chain(model, SamplerKind::VolZonotope,
                      draw_tiling_objective(4, 3, 0), x0);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    chain.step(rng);
    CHECK(contains(a, chain.point()));
    CHECK(chain.basis().indices.size() == 2);
  }
}

TEST_CASE("samplers: run_chain budget handling") {
  const FeatureMatrix a = fig1();
  BasisExchangeChain chain(a, make_basis(a, {0, 1}), 0.5);
  Rng rng(5);

  SUBCASE("no budget is a config error") {
    CHECK_THROWS_AS(
        run_chain(chain, SamplerKind::BasisExchange, rng, RunBudget{}),
        ConfigError);
  }

  SUBCASE("step budget is exact") {
    const ChainTrace trace = run_chain(chain, SamplerKind::BasisExchange, rng,
                                       {.max_steps = 137});
    CHECK(trace.steps.size() == 137);
    CHECK(trace.steps.front().step == 0);
    CHECK(trace.steps.back().step == 136);
  }

  SUBCASE("timing off zeroes elapsed_ns") {
    const ChainTrace trace = run_chain(
        chain, SamplerKind::BasisExchange, rng,
        {.max_steps = 50, .record_timing = false});
    for (const StepRecord& rec : trace.steps) CHECK(rec.elapsed_ns == 0);
  }

  SUBCASE("timing on records nondecreasing cumulative nanoseconds") {
    const ChainTrace trace = run_chain(chain, SamplerKind::BasisExchange, rng,
                                       {.max_steps = 50});
    long long prev = 0;
    for (const StepRecord& rec : trace.steps) {
      CHECK(rec.elapsed_ns >= prev);
      prev = rec.elapsed_ns;
    }
    CHECK(trace.steps.back().elapsed_ns > 0);
  }

  SUBCASE("seconds budget terminates") {
    const ChainTrace trace = run_chain(
        chain, SamplerKind::BasisExchange, rng,
        {.max_steps = 0, .max_seconds = 0.05, .record_timing = false});
    CHECK(trace.steps.size() > 0);
  }
}

TEST_CASE("samplers: exact stepper is a valid Stepper") {
  const FeatureMatrix a = fig1();
  const ProjectionKernel kernel = build_projection_kernel(a);
  ExactStepper stepper(kernel);
  Rng rng(6);
  const ChainTrace trace = run_chain(stepper, SamplerKind::Exact, rng,
                                     {.max_steps = 100, .record_timing = false});
  CHECK(trace.steps.size() == 100);
  CHECK(trace.proposed == 100);
  CHECK(trace.accepted == 100);  // i.i.d. draws always move
}
