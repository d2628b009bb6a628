#ifndef ZONODPP_DIAGNOSTICS_HPP
#define ZONODPP_DIAGNOSTICS_HPP

#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zonodpp/numerics.hpp"
#include "zonodpp/rng.hpp"
#include "zonodpp/samplers.hpp"

namespace zonodpp {

// Brute-force basis law for enumerable instances. Masses are squared volumes
// (the projection DPP) or absolute volumes (the Unif(Z(A)) tile marginal of
// Remark 1); normalization is the unnormalized total, det(AA^T) resp. Vol(Z).
enum class LawKind { DetSquared, AbsDet };

struct ExactLaw {
  std::vector<std::pair<Basis, double>> atoms;  // lexicographic, probs sum 1
  double normalization = 0.0;
  LawKind kind = LawKind::DetSquared;
};

inline constexpr double kEnumerationGuard = 1e6;  // max C(n, r)

// Number of r-subsets, saturating at infinity; used for the guard.
double binomial_bound(int n, int r);

ExactLaw enumerate_law(const FeatureMatrix& law,
                       LawKind kind = LawKind::DetSquared);

double law_probability(const ExactLaw& law, const Basis& b);

// Exact P(S subset of B) by summing law atoms; 0 when |S| > r.
double inclusion_probability(const ExactLaw& law, std::span<const int> subset);

// Running average of 1[S subset of B_t] over the trace, one value per step.
std::vector<double> running_inclusion(const ChainTrace& trace,
                                      std::span<const int> subset);

// |estimate - truth| / truth per entry; truth must be nonzero.
std::vector<double> relative_errors(const std::vector<double>& estimates,
                                    double truth);

// Median and first/last deciles across chains, per step. All chains must
// have equal length.
struct DecileBands {
  std::vector<double> lo;      // 0.1 quantile
  std::vector<double> median;  // 0.5
  std::vector<double> hi;      // 0.9
};

DecileBands decile_bands(const std::vector<std::vector<double>>& per_chain);

// Gelman-Rubin potential scale reduction factor, the classic M-chain form:
//   W = mean within-chain variance (ddof 1),
//   B = N/(M-1) * sum_m (mean_m - grand)^2,
//   Vhat = (N-1)/N * W + B/N + B/(M*N),  PSRF = sqrt(Vhat / W).
// Undefined (defined = false) when every chain is constant (W = 0).
struct PsrfReport {
  double psrf = 0.0;
  double within = 0.0;
  double between = 0.0;
  double vhat = 0.0;
  bool defined = false;
  int num_chains = 0;
  long long num_steps = 0;
};

PsrfReport psrf(const std::vector<std::vector<double>>& chains);

using BasisCounts = std::unordered_map<Basis, long long, BasisHash>;

// Pooled post-burn-in counts; burn_in_fraction of each trace is dropped.
BasisCounts basis_counts(std::span<const ChainTrace> traces,
                         double burn_in_fraction = 0.1);

// 1/2 sum |freq - p| over the union of supports.
double tv_distance(const BasisCounts& counts, const ExactLaw& law);

// accepted / proposed steps (laziness self-loops are not proposals).
double acceptance_rate(const ChainTrace& trace);
// accepted / all steps (laziness self-loops count as non-moves).
double move_rate(const ChainTrace& trace);

// Seeded size-k subset with det K_S > 0, i.e. positive inclusion probability
// under Eq. 1; rejection-sampled.
std::vector<int> draw_inclusion_subset(const ProjectionKernel& kernel,
                                       int size, Rng& rng);

}  // namespace zonodpp

#endif
