#include "zonodpp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zonodpp/errors.hpp"

namespace zonodpp {

namespace {

bool basis_contains_all(const Basis& b, std::span<const int> subset) {
  return b.contains_all(subset);
}

double quantile(std::vector<double>& sorted_values, double q) {
  const std::size_t m = sorted_values.size();
  const double pos = q * static_cast<double>(m - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= m) return sorted_values[m - 1];
  const double frac = pos - static_cast<double>(i);
  return sorted_values[i] * (1.0 - frac) + sorted_values[i + 1] * frac;
}

}  // namespace

double binomial_bound(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double c = 1.0;
  for (int i = 0; i < r; ++i) {
    c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (c > 1e18) return std::numeric_limits<double>::infinity();
  }
  return c;
}

ExactLaw enumerate_law(const FeatureMatrix& law, LawKind kind) {
  const int n = law.cols();
  const int r = law.rows();
  const double count = binomial_bound(n, r);
  if (count > kEnumerationGuard) {
    throw ConfigError("enumeration refused: C(" + std::to_string(n) + "," +
                      std::to_string(r) + ") = " + std::to_string(count) +
                      " exceeds guard " + std::to_string(kEnumerationGuard));
  }
  ExactLaw out;
  out.kind = kind;
  std::vector<int> subset(r);
  for (int i = 0; i < r; ++i) subset[i] = i;
  for (;;) {
    const double v2 = squared_volume(law, subset);
    if (v2 > 0.0) {
      const double mass = kind == LawKind::DetSquared ? v2 : std::sqrt(v2);
      out.atoms.emplace_back(Basis{subset}, mass);
      out.normalization += mass;
    }
    // next r-subset in lexicographic order
    int i = r - 1;
    while (i >= 0 && subset[i] == n - r + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < r; ++j) subset[j] = subset[j - 1] + 1;
  }
  if (out.atoms.empty() || out.normalization <= 0.0) {
    throw NumericalError("no independent r-subset found while enumerating");
  }
  for (auto& [basis, mass] : out.atoms) mass /= out.normalization;
  return out;
}

double law_probability(const ExactLaw& law, const Basis& b) {
  const auto it = std::lower_bound(
      law.atoms.begin(), law.atoms.end(), b,
      [](const auto& atom, const Basis& key) { return atom.first < key; });
  if (it == law.atoms.end() || !(it->first == b)) return 0.0;
  return it->second;
}

double inclusion_probability(const ExactLaw& law, std::span<const int> subset) {
  double p = 0.0;
  for (const auto& [basis, prob] : law.atoms) {
    if (basis_contains_all(basis, subset)) p += prob;
  }
  return p;
}

std::vector<double> running_inclusion(const ChainTrace& trace,
                                      std::span<const int> subset) {
  std::vector<double> out;
  out.reserve(trace.steps.size());
  long long hits = 0;
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    if (basis_contains_all(trace.steps[t].basis, subset)) ++hits;
    out.push_back(static_cast<double>(hits) / static_cast<double>(t + 1));
  }
  return out;
}

std::vector<double> relative_errors(const std::vector<double>& estimates,
                                    double truth) {
  if (truth == 0.0) {
    throw ConfigError(
        "inclusion probability is zero; choose a different subset");
  }
  std::vector<double> out;
  out.reserve(estimates.size());
  for (double e : estimates) out.push_back(std::abs(e - truth) / truth);
  return out;
}

DecileBands decile_bands(const std::vector<std::vector<double>>& per_chain) {
  if (per_chain.empty()) throw ConfigError("decile_bands needs >= 1 chain");
  const std::size_t len = per_chain.front().size();
  for (const auto& chain : per_chain) {
    if (chain.size() != len) {
      throw ConfigError("decile_bands needs equal-length chains");
    }
  }
  DecileBands bands;
  bands.lo.resize(len);
  bands.median.resize(len);
  bands.hi.resize(len);
  std::vector<double> column(per_chain.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t m = 0; m < per_chain.size(); ++m) {
      column[m] = per_chain[m][t];
    }
    std::sort(column.begin(), column.end());
    bands.lo[t] = quantile(column, 0.1);
    bands.median[t] = quantile(column, 0.5);
    bands.hi[t] = quantile(column, 0.9);
  }
  return bands;
}

PsrfReport psrf(const std::vector<std::vector<double>>& chains) {
  const int m = static_cast<int>(chains.size());
  if (m < 2) throw ConfigError("psrf needs at least 2 chains");
  const long long n = static_cast<long long>(chains.front().size());
  if (n < 10) throw ConfigError("psrf needs at least 10 steps per chain");
  for (const auto& chain : chains) {
    if (static_cast<long long>(chain.size()) != n) {
      throw ConfigError("psrf needs equal-length chains");
    }
  }

  PsrfReport report;
  report.num_chains = m;
  report.num_steps = n;

  std::vector<double> means(m);
  double grand = 0.0;
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (double v : chains[i]) s += v;
    means[i] = s / static_cast<double>(n);
    grand += means[i];
  }
  grand /= static_cast<double>(m);

  double w = 0.0;
  for (int i = 0; i < m; ++i) {
    double ss = 0.0;
    for (double v : chains[i]) ss += (v - means[i]) * (v - means[i]);
    w += ss / static_cast<double>(n - 1);
  }
  w /= static_cast<double>(m);

  double b = 0.0;
  for (int i = 0; i < m; ++i) b += (means[i] - grand) * (means[i] - grand);
  b *= static_cast<double>(n) / static_cast<double>(m - 1);

  report.within = w;
  report.between = b;
  report.vhat = (static_cast<double>(n - 1) / static_cast<double>(n)) * w +
                b / static_cast<double>(n) +
                b / (static_cast<double>(m) * static_cast<double>(n));
  if (w <= 0.0) {
    report.defined = false;
    return report;
  }
  report.psrf = std::sqrt(report.vhat / w);
  report.defined = true;
  return report;
}

BasisCounts basis_counts(std::span<const ChainTrace> traces,
                         double burn_in_fraction) {
  if (burn_in_fraction < 0.0 || burn_in_fraction >= 1.0) {
    throw ConfigError("burn-in fraction must lie in [0, 1)");
  }
  BasisCounts counts;
  for (const ChainTrace& trace : traces) {
    const std::size_t skip = static_cast<std::size_t>(
        burn_in_fraction * static_cast<double>(trace.steps.size()));
    for (std::size_t t = skip; t < trace.steps.size(); ++t) {
      ++counts[trace.steps[t].basis];
    }
  }
  return counts;
}

double tv_distance(const BasisCounts& counts, const ExactLaw& law) {
  long long total = 0;
  for (const auto& [basis, c] : counts) total += c;
  if (total == 0) throw ConfigError("tv_distance over an empty trace");
  double tv = 0.0;
  for (const auto& [basis, p] : law.atoms) {
    const auto it = counts.find(basis);
    const double freq =
        it == counts.end()
            ? 0.0
            : static_cast<double>(it->second) / static_cast<double>(total);
    tv += std::abs(freq - p);
  }
  for (const auto& [basis, c] : counts) {
    if (law_probability(law, basis) == 0.0) {
      tv += static_cast<double>(c) / static_cast<double>(total);
    }
  }
  return 0.5 * tv;
}

double acceptance_rate(const ChainTrace& trace) {
  if (trace.proposed <= 0) {
    throw ConfigError("acceptance_rate over a trace with no proposals");
  }
  return static_cast<double>(trace.accepted) /
         static_cast<double>(trace.proposed);
}

double move_rate(const ChainTrace& trace) {
  if (trace.steps.empty()) throw ConfigError("move_rate over an empty trace");
  return static_cast<double>(trace.accepted) /
         static_cast<double>(trace.steps.size());
}

std::vector<int> draw_inclusion_subset(const ProjectionKernel& kernel,
                                       int size, Rng& rng) {
  const int n = kernel.size();
  if (size < 1 || size > kernel.rank()) {
    throw ConfigError("inclusion subset size must lie in [1, r]");
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> subset;
    while (static_cast<int>(subset.size()) < size) {
      const int i = static_cast<int>(rng.uniform_int(n));
      if (std::find(subset.begin(), subset.end(), i) == subset.end()) {
        subset.push_back(i);
      }
    }
    std::sort(subset.begin(), subset.end());
    Eigen::MatrixXd minor(size, size);
    for (int a = 0; a < size; ++a) {
      for (int b = 0; b < size; ++b) {
        minor(a, b) = kernel.matrix()(subset[a], subset[b]);
      }
    }
    if (minor.determinant() > 1e-10) return subset;
  }
  throw ConfigError("could not find a subset with positive inclusion mass");
}

}  // namespace zonodpp
