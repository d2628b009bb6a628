#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "zonodpp/diagnostics.hpp"
#include "zonodpp/errors.hpp"
#include "zonodpp/models.hpp"

using namespace zonodpp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/zonodpp_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("models: complete graph has lexicographic edges") {
  const Graph k3 = complete_graph(3);
  CHECK(k3.num_vertices == 3);
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {0, 2}, {1, 2}};
  CHECK(k3.edges == expected);
  CHECK(k3.weights == std::vector<double>(3, 1.0));
  CHECK(is_connected(k3));

  const Graph k5 = complete_graph(5);
  CHECK(k5.num_edges() == 10);
  CHECK_THROWS_AS(complete_graph(1), ConfigError);
}

TEST_CASE("models: K_3 incidence matroid has three unit bases") {
  const FeatureMatrix a = incidence_feature_matrix(complete_graph(3));
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  for (const auto& b : {std::vector<int>{0, 1}, std::vector<int>{0, 2},
                        std::vector<int>{1, 2}}) {
    CHECK(squared_volume(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("models: incidence matrix signs and shape") {
  const Graph k5 = complete_graph(5);
  const FeatureMatrix a = incidence_feature_matrix(k5);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 10);
  for (int e = 0; e < k5.num_edges(); ++e) {
    const auto [u, v] = k5.edges[e];
    if (u < 4) CHECK(a.matrix()(u, e) == 1.0);
    if (v < 4) CHECK(a.matrix()(v, e) == -1.0);
  }
  // Column sums vanish except where the dropped vertex appears.
  for (int e = 0; e < k5.num_edges(); ++e) {
    const auto [u, v] = k5.edges[e];
    const double sum = a.matrix().col(e).sum();
    CHECK(sum == doctest::Approx(v == 4 ? 1.0 : (u == 4 ? -1.0 : 0.0)));
  }
}

TEST_CASE("models: incidence rejects disconnected and tree graphs") {
  Graph disconnected;
  disconnected.num_vertices = 4;
  disconnected.edges = {{0, 1}, {2, 3}};
  disconnected.weights = {1.0, 1.0};
  CHECK_FALSE(is_connected(disconnected));
  CHECK_THROWS_AS(incidence_feature_matrix(disconnected), ConfigError);

  Graph path;  // spanning tree: r = n, no strict matroid
  path.num_vertices = 3;
  path.edges = {{0, 1}, {1, 2}};
  path.weights = {1.0, 1.0};
  CHECK(is_connected(path));
  CHECK_THROWS_AS(incidence_feature_matrix(path), ConfigError);
}

TEST_CASE("models: Barabasi-Albert generation") {
  const Graph g = barabasi_albert(20, 3, 99);
  CHECK(g.num_vertices == 20);
  // complete seed on 3 vertices + 17 * 3 attachments
  CHECK(g.num_edges() == 3 + 17 * 3);
  CHECK(is_connected(g));
  for (const auto& [u, v] : g.edges) {
    CHECK(u < v);
    CHECK(v < 20);
  }
  // Deterministic in the seed, sensitive to it.
  const Graph same = barabasi_albert(20, 3, 99);
  CHECK(g.edges == same.edges);
  const Graph other = barabasi_albert(20, 3, 100);
  CHECK(g.edges != other.edges);

  CHECK_THROWS_AS(barabasi_albert(3, 3, 1), ConfigError);
  CHECK_THROWS_AS(barabasi_albert(5, 0, 1), ConfigError);

  // k = 1 grows a tree on top of a single-vertex seed.
  const Graph tree = barabasi_albert(10, 1, 7);
  CHECK(tree.num_edges() == 9);
  CHECK(is_connected(tree));
}

TEST_CASE("models: edge list round-trip") {
  const TempFile file("edges.txt",
                      "4\n0 1\n0 2 2.5\n1 3\n2 3 0.5\n");
  const Graph g = load_edge_list(file.path);
  CHECK(g.num_vertices == 4);
  CHECK(g.num_edges() == 4);
  CHECK(g.edges[1] == std::pair<int, int>{0, 2});
  CHECK(g.weights[0] == 1.0);
  CHECK(g.weights[1] == 2.5);
  CHECK(g.weights[3] == 0.5);
  CHECK(is_connected(g));
}

TEST_CASE("models: edge list errors carry line numbers") {
  const TempFile self("edges_self.txt", "3\n0 0\n");
  CHECK_THROWS_WITH_AS(load_edge_list(self.path),
                       doctest::Contains(":2"), ConfigError);

  const TempFile range("edges_range.txt", "3\n0 5\n");
  CHECK_THROWS_WITH_AS(load_edge_list(range.path),
                       doctest::Contains(":2"), ConfigError);

  const TempFile badw("edges_badw.txt", "3\n0 1 -2\n");
  CHECK_THROWS_WITH_AS(load_edge_list(badw.path),
                       doctest::Contains(":2"), ConfigError);

  CHECK_THROWS_AS(load_edge_list("/nonexistent/file"), ConfigError);
}

TEST_CASE("models: feature matrix file round-trip") {
  const TempFile file("matrix.txt", "2 4\n1 2 0 -1\n0 1 2 1\n");
  const FeatureMatrix a = load_feature_matrix(file.path);
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 4);
  CHECK(a.matrix()(0, 3) == -1.0);
  CHECK(a.matrix()(1, 2) == 2.0);
}

TEST_CASE("models: feature matrix file errors carry line numbers") {
  const TempFile shortrow("matrix_short.txt", "2 4\n1 2 0 -1\n0 1 2\n");
  CHECK_THROWS_WITH_AS(load_feature_matrix(shortrow.path),
                       doctest::Contains(":3"), ConfigError);

  const TempFile longrow("matrix_long.txt", "2 3\n1 2 0 5\n0 1 2\n");
  CHECK_THROWS_WITH_AS(load_feature_matrix(longrow.path),
                       doctest::Contains(":2"), ConfigError);

  const TempFile header("matrix_header.txt", "abc\n");
  CHECK_THROWS_WITH_AS(load_feature_matrix(header.path),
                       doctest::Contains(":1"), ConfigError);
}

TEST_CASE("models: jitter repairs a rank-deficient matrix") {
  const TempFile file("matrix_rank.txt", "2 4\n1 2 3 4\n2 4 6 8\n");
  CHECK_THROWS_AS(load_feature_matrix(file.path, false), ConfigError);
  const FeatureMatrix repaired = load_feature_matrix(file.path, true, 5);
  CHECK(repaired.rows() == 2);
  // The repair is a tiny relative perturbation.
  CHECK(std::abs(repaired.matrix()(0, 0) - 1.0) < 1e-6);
  // Deterministic in the jitter seed.
  const FeatureMatrix again = load_feature_matrix(file.path, true, 5);
  CHECK((repaired.matrix() - again.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("models: apply_base_measure modes") {
  Eigen::MatrixXd m(2, 4);
  m << 1, 2, 0, -1, 0, 1, 2, 1;
  const FeatureMatrix a(m);
  Eigen::VectorXd q(4);
  q << 1, 1, 1, 4;

  SUBCASE("none leaves all matrices alone") {
    const WeightedModel model = apply_base_measure(a, {});
    CHECK((model.geometry.matrix() - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((model.acceptance.matrix() - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((model.law.matrix() - m).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("sqrt-q scales every matrix by sqrt(q)") {
    const WeightedModel model =
        apply_base_measure(a, {.q = q, .mode = WeightMode::SqrtQ});
    const Eigen::MatrixXd expected =
        m * q.cwiseSqrt().asDiagonal();
    CHECK((model.geometry.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((model.acceptance.matrix() - expected).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK((model.law.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("q-scaled splits geometry and acceptance") {
    const WeightedModel model =
        apply_base_measure(a, {.q = q, .mode = WeightMode::QScaled});
    const Eigen::MatrixXd geo = m * q.asDiagonal();
    const Eigen::MatrixXd law = m * q.cwiseSqrt().asDiagonal();
    CHECK((model.geometry.matrix() - geo).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((model.acceptance.matrix() - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((model.law.matrix() - law).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("models: weighted law of the running example") {
  // q = (1,1,1,4): weighted masses det^2 * prod q are (1,4,4,16,36,16),
  // total 77, so P({2,3}) = 16/77.
  Eigen::MatrixXd m(2, 4);
  m << 1, 2, 0, -1, 0, 1, 2, 1;
  const FeatureMatrix a(m);
  Eigen::VectorXd q(4);
  q << 1, 1, 1, 4;

  for (const WeightMode mode : {WeightMode::SqrtQ, WeightMode::QScaled}) {
    const WeightedModel model = apply_base_measure(a, {.q = q, .mode = mode});
    const ExactLaw law = enumerate_law(model.law, LawKind::DetSquared);
    CHECK(law.normalization == doctest::Approx(77.0).epsilon(1e-10));
    CHECK(law_probability(law, Basis{{2, 3}}) ==
          doctest::Approx(16.0 / 77.0).epsilon(1e-10));
    CHECK(law_probability(law, Basis{{1, 3}}) ==
          doctest::Approx(36.0 / 77.0).epsilon(1e-10));
    CHECK(law_probability(law, Basis{{0, 1}}) ==
          doctest::Approx(1.0 / 77.0).epsilon(1e-10));
  }
}

TEST_CASE("models: scale_columns validation") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 0, 1, 0, 1, 1;
  const FeatureMatrix a(m);
  Eigen::VectorXd good(3);
  good << 1, 2, 3;
  CHECK_NOTHROW(scale_columns(a, good));
  Eigen::VectorXd negative(3);
  negative << 1, -2, 3;
  CHECK_THROWS_AS(scale_columns(a, negative), ConfigError);
  Eigen::VectorXd short_vec(2);
  short_vec << 1, 2;
  CHECK_THROWS_AS(scale_columns(a, short_vec), ConfigError);
}
