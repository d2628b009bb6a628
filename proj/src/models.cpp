#include "zonodpp/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "zonodpp/errors.hpp"
#include "zonodpp/rng.hpp"

namespace zonodpp {

namespace {

void check_edge(int m, int u, int v) {
  if (u < 0 || v < 0 || u >= m || v >= m) {
    throw ConfigError("edge endpoint out of range [0," + std::to_string(m) +
                      "): " + std::to_string(u) + "-" + std::to_string(v));
  }
  if (u == v) {
    throw ConfigError("self-loop at vertex " + std::to_string(u));
  }
}

}  // namespace

Graph complete_graph(int m) {
  if (m < 2) throw ConfigError("complete graph needs m >= 2");
  Graph g;
  g.num_vertices = m;
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) g.edges.emplace_back(u, v);
  }
  g.weights.assign(g.edges.size(), 1.0);
  return g;
}

Graph barabasi_albert(int m, int k, std::uint64_t seed) {
  if (k < 1 || m <= k) throw ConfigError("barabasi_albert needs m > k >= 1");
  Graph g;
  g.num_vertices = m;
  // Endpoint multiset: each edge contributes both ends, so a uniform draw
  // from it is degree-proportional.
  std::vector<int> endpoints;
  Rng rng = Rng::stream(seed, stream_id(StreamDomain::Weights, 0x6261ULL));
  for (int u = 0; u < k; ++u) {
    for (int v = u + 1; v < k; ++v) {
      g.edges.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  for (int v = k; v < m; ++v) {
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < std::min(k, v)) {
      int target;
      if (endpoints.empty()) {
        target = static_cast<int>(rng.uniform_int(v));  // k = 1 seed: no edges yet
      } else {
        target = endpoints[rng.uniform_int(endpoints.size())];
      }
      if (std::find(chosen.begin(), chosen.end(), target) == chosen.end()) {
        chosen.push_back(target);
      }
    }
    for (int u : chosen) {
      g.edges.emplace_back(std::min(u, v), std::max(u, v));
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.weights.assign(g.edges.size(), 1.0);
  return g;
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list: " + path);
  Graph g;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;  // blank line
    if (first[0] == '#') continue;
    if (!have_header) {
      try {
        g.num_vertices = std::stoi(first);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": expected vertex count, got '" + first + "'");
      }
      if (g.num_vertices < 2) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": need at least 2 vertices");
      }
      have_header = true;
      continue;
    }
    int u = 0, v = 0;
    double w = 1.0;
    std::istringstream es(line);
    if (!(es >> u >> v)) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'u v [w]', got '" + line + "'");
    }
    if (es >> w) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": edge weight must be positive");
      }
    }
    try {
      check_edge(g.num_vertices, u, v);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    g.edges.emplace_back(std::min(u, v), std::max(u, v));
    g.weights.push_back(w);
  }
  if (!have_header || g.edges.empty()) {
    throw ConfigError(path + ": empty edge list");
  }
  return g;
}

bool is_connected(const Graph& g) {
  if (g.num_vertices <= 0) return false;
  std::vector<std::vector<int>> adj(g.num_vertices);
  for (const auto& [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(g.num_vertices, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == g.num_vertices;
}

FeatureMatrix incidence_feature_matrix(const Graph& g) {
  if (!is_connected(g)) {
    throw ConfigError("graph is disconnected: incidence matroid has rank < m-1");
  }
  const int m = g.num_vertices;
  const int n = g.num_edges();
  if (m - 1 >= n) {
    throw ConfigError("graph needs at least m edges so that r < n");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m - 1, n);
  for (int e = 0; e < n; ++e) {
    const auto& [u, v] = g.edges[e];
    if (u < m - 1) a(u, e) = 1.0;
    if (v < m - 1) a(v, e) = -1.0;
  }
  return FeatureMatrix(std::move(a));
}

FeatureMatrix scale_columns(const FeatureMatrix& a,
                            const Eigen::VectorXd& factors) {
  if (factors.size() != a.cols()) {
    throw ConfigError("column scale vector has wrong length");
  }
  for (int i = 0; i < factors.size(); ++i) {
    if (!(factors[i] > 0.0) || !std::isfinite(factors[i])) {
      throw ConfigError("column scale factors must be positive");
    }
  }
  return FeatureMatrix(a.matrix() * factors.asDiagonal());
}

WeightedModel apply_base_measure(const FeatureMatrix& a,
                                 const BaseMeasure& measure) {
  if (measure.mode == WeightMode::None) {
    return WeightedModel{a, a, a};
  }
  if (measure.q.size() != a.cols()) {
    throw ConfigError("base measure q has wrong length");
  }
  const FeatureMatrix law = scale_columns(a, measure.q.cwiseSqrt());
  if (measure.mode == WeightMode::SqrtQ) {
    return WeightedModel{law, law, law};
  }
  // q-scaled: the zonotope and its tiles are stretched by q, the acceptance
  // ratio keeps the original volumes, and the invariant basis law is the
  // same weighted DPP (Section 3.4 freedom).
  return WeightedModel{scale_columns(a, measure.q), a, law};
}

FeatureMatrix load_feature_matrix(const std::string& path, bool jitter,
                                  std::uint64_t jitter_seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  int lineno = 1;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  std::istringstream header(line);
  int r = 0, n = 0;
  if (!(header >> r >> n) || r < 1 || n < 1) {
    throw ConfigError(path + ":1: expected header 'r n'");
  }
  Eigen::MatrixXd a(r, n);
  for (int i = 0; i < r; ++i) {
    if (!std::getline(in, line)) {
      throw ConfigError(path + ": expected " + std::to_string(r) +
                        " rows, got " + std::to_string(i));
    }
    ++lineno;
    std::istringstream row(line);
    for (int j = 0; j < n; ++j) {
      if (!(row >> a(i, j))) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": row has " +
                          std::to_string(j) + " entries, expected " +
                          std::to_string(n));
      }
    }
    double extra;
    if (row >> extra) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": row has more than " + std::to_string(n) +
                        " entries");
    }
  }
  try {
    return FeatureMatrix(a);
  } catch (const std::invalid_argument& e) {
    if (!jitter) throw ConfigError(path + ": " + e.what());
    // Rank repair: small relative Gaussian noise on every entry.
    Rng rng = Rng::stream(jitter_seed, stream_id(StreamDomain::Weights, 0x6aULL));
    const double scale = 1e-8 * std::max(a.cwiseAbs().maxCoeff(), 1.0);
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd noisy = a;
      for (int i = 0; i < r; ++i) {
        for (int j = 0; j < n; ++j) noisy(i, j) += scale * rng.gaussian();
      }
      try {
        return FeatureMatrix(std::move(noisy));
      } catch (const std::invalid_argument&) {
        continue;
      }
    }
    throw ConfigError(path + ": rank-deficient even after jitter");
  }
}

}  // namespace zonodpp
