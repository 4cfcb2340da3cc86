#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fcnet/fcn.hpp"
#include "support/oracles.hpp"

using namespace fcnet;

namespace {

BoldRecording recording_from(const Matrix& signal) {
  BoldRecording rec;
  rec.subject_id = "t";
  rec.signal = signal;
  return rec;
}

Embedding embedding_from(const Matrix& coords) {
  Embedding e;
  e.coords = coords;
  e.method = EmbedMethod::PCA;
  return e;
}

using EdgeSet = std::set<std::pair<int, int>>;

}  // namespace

TEST_CASE("fcn method names round-trip") {
  for (FcnMethod m :
       {FcnMethod::PEARSON, FcnMethod::FISHER_Z, FcnMethod::MAPPER_PCA,
        FcnMethod::MAPPER_TSNE, FcnMethod::MAPPER_UMAP}) {
    CHECK(fcn_method_from_name(fcn_method_name(m)) == m);
  }
  CHECK_THROWS_AS(fcn_method_from_name("granger"), FcnetError);
}

TEST_CASE("pearson of a channel against its negation is -1") {
  Matrix signal(8, 2);
  for (int t = 0; t < 8; ++t) {
    signal(t, 0) = static_cast<double>(t) + 0.5 * ((t * 7) % 3);
    signal(t, 1) = -signal(t, 0);
  }
  CorrMatrix corr = pearson_matrix(recording_from(signal));
  CHECK(corr.values(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(corr.values(0, 0) == 1.0);
  CHECK(corr.values(1, 1) == 1.0);
}

TEST_CASE("pearson matches a two-pass reference on a hand pair") {
  Matrix signal(8, 2);
  std::vector<double> a = {1, 2, 3, 5, 4, 0, 2, 6};
  std::vector<double> b = {2, 2, 4, 5, 3, 1, 1, 7};
  for (int t = 0; t < 8; ++t) {
    signal(t, 0) = a[static_cast<std::size_t>(t)];
    signal(t, 1) = b[static_cast<std::size_t>(t)];
  }
  CorrMatrix corr = pearson_matrix(recording_from(signal));
  CHECK(corr.values(0, 1) ==
        doctest::Approx(oracle::two_pass_pearson(a, b)).epsilon(1e-12));
  CHECK(corr.values(1, 0) == corr.values(0, 1));
}

TEST_CASE("pearson stays within [-1,1] and is symmetric on random input") {
  Rng rng(3);
  Matrix signal(30, 6);
  for (int t = 0; t < 30; ++t) {
    for (int j = 0; j < 6; ++j) signal(t, j) = rng.normal();
  }
  CorrMatrix corr = pearson_matrix(recording_from(signal));
  for (int i = 0; i < 6; ++i) {
    CHECK(corr.values(i, i) == 1.0);
    for (int j = 0; j < 6; ++j) {
      CHECK(corr.values(i, j) >= -1.0);
      CHECK(corr.values(i, j) <= 1.0);
      CHECK(corr.values(i, j) == corr.values(j, i));
    }
  }
}

TEST_CASE("pearson rejects constant channels") {
  Matrix signal(8, 2);
  signal.col(0).setLinSpaced(8, 0.0, 7.0);
  signal.col(1).setConstant(4.2);
  CHECK_THROWS_AS(pearson_matrix(recording_from(signal)), FcnetError);
}

TEST_CASE("fisher transform: frozen values, odd symmetry, capped diag zero") {
  Matrix signal(8, 2);
  std::vector<double> a = {1, 2, 3, 5, 4, 0, 2, 6};
  for (int t = 0; t < 8; ++t) {
    signal(t, 0) = a[static_cast<std::size_t>(t)];
    signal(t, 1) = -a[static_cast<std::size_t>(t)];
  }
  CorrMatrix corr = pearson_matrix(recording_from(signal));
  CorrMatrix z = fisher_z(corr);
  CHECK(z.kind == CorrKind::FISHER_Z);
  CHECK(z.values(0, 0) == 0.0);
  CHECK(z.values(1, 1) == 0.0);
  // r = -1 is capped at 1 - 1e-7 in magnitude
  CHECK(z.values(0, 1) == doctest::Approx(-std::atanh(1.0 - 1e-7)).epsilon(1e-12));

  // frozen interior value: atanh(0.5)
  CorrMatrix half;
  half.values = Matrix::Identity(2, 2);
  half.values(0, 1) = half.values(1, 0) = 0.5;
  CorrMatrix zh = fisher_z(half);
  CHECK(zh.values(0, 1) == doctest::Approx(0.5493061443340548).epsilon(1e-15));

  CorrMatrix neg = half;
  neg.values(0, 1) = neg.values(1, 0) = -0.5;
  CorrMatrix zn = fisher_z(neg);
  CHECK(zn.values(0, 1) == doctest::Approx(-zh.values(0, 1)).epsilon(1e-15));
}

TEST_CASE("threshold_graph keeps |value| >= tau off-diagonal pairs") {
  CorrMatrix corr;
  corr.values = Matrix::Identity(4, 4);
  corr.values(0, 1) = corr.values(1, 0) = 0.9;
  corr.values(0, 2) = corr.values(2, 0) = -0.6;
  corr.values(0, 3) = corr.values(3, 0) = 0.2;
  corr.values(1, 2) = corr.values(2, 1) = 0.5;
  corr.values(1, 3) = corr.values(3, 1) = -0.1;
  corr.values(2, 3) = corr.values(3, 2) = 0.0;

  FcnGraph g = threshold_graph(corr, 0.5);
  CHECK(g.r == 4);
  CHECK(g.edges == EdgeSet{{1, 2}, {1, 3}, {2, 3}});

  FcnGraph tight = threshold_graph(corr, 0.95);
  CHECK(tight.edges.empty());

  // monotone: raising tau can only remove edges
  FcnGraph low = threshold_graph(corr, 0.1);
  for (const auto& e : g.edges) CHECK(low.edges.count(e) == 1);

  CHECK_THROWS_AS(threshold_graph(corr, 0.0), FcnetError);
  CHECK_THROWS_AS(threshold_graph(corr, -0.2), FcnetError);
}

TEST_CASE("mapper config A: two tight pairs far apart") {
  Matrix coords(4, 2);
  coords << 0.0, 0.0, 0.5, 0.0, 10.0, 0.0, 10.5, 0.0;
  MapperParams params;
  params.n_intervals_x = 1;
  params.n_intervals_y = 1;
  params.overlap = 0.3;
  params.cluster_eps = 1.0;
  FcnGraph g = mapper_graph(embedding_from(coords), params);
  CHECK(g.edges == EdgeSet{{1, 2}, {3, 4}});
}

TEST_CASE("mapper config B: one cell, one cluster, a triangle") {
  Matrix coords(3, 2);
  coords << 0.0, 0.0, 0.1, 0.0, 0.0, 0.1;
  MapperParams params;
  params.n_intervals_x = 1;
  params.n_intervals_y = 1;
  params.overlap = 0.3;
  params.cluster_eps = 1.0;
  FcnGraph g = mapper_graph(embedding_from(coords), params);
  CHECK(g.edges == EdgeSet{{1, 2}, {1, 3}, {2, 3}});
  REQUIRE(g.clusters.size() == 1);
  CHECK(g.clusters[0] == std::vector<int>{1, 2, 3});
}

TEST_CASE("mapper config C: overlapping intervals bridge through the middle") {
  // x-range [0,2], 2 intervals, overlap 0.5 -> length 4/3, stride 2/3:
  // cell 0 covers [0, 4/3], cell 1 covers [2/3, 2]; the middle point joins
  // both clusters
  Matrix coords(3, 2);
  coords << 0.0, 0.0, 1.0, 0.0, 2.0, 0.0;
  MapperParams params;
  params.n_intervals_x = 2;
  params.n_intervals_y = 1;
  params.overlap = 0.5;
  params.cluster_eps = 1.0;
  FcnGraph g = mapper_graph(embedding_from(coords), params);
  CHECK(g.edges == EdgeSet{{1, 2}, {2, 3}});
}

TEST_CASE("mapper config D: eps below every gap yields no edges") {
  Matrix coords(4, 2);
  coords << 0.0, 0.0, 5.0, 0.0, 0.0, 5.0, 5.0, 5.0;
  MapperParams params;
  params.n_intervals_x = 2;
  params.n_intervals_y = 2;
  params.overlap = 0.3;
  params.cluster_eps = 0.5;
  FcnGraph g = mapper_graph(embedding_from(coords), params);
  CHECK(g.edges.empty());
  // every point still appears in some cluster
  std::set<int> seen;
  for (const auto& c : g.clusters) {
    for (int node : c) seen.insert(node);
  }
  CHECK(seen == std::set<int>{1, 2, 3, 4});
}

TEST_CASE("mapper config E: chain of five points makes two triangles") {
  // x-range [0,1.6], 2 intervals, overlap 0.3 -> length ~0.9412, stride
  // ~0.6588: cell 0 holds points 1..3, cell 1 holds points 3..5
  Matrix coords(5, 2);
  coords << 0.0, 0.0, 0.4, 0.0, 0.8, 0.0, 1.2, 0.0, 1.6, 0.0;
  MapperParams params;
  params.n_intervals_x = 2;
  params.n_intervals_y = 1;
  params.overlap = 0.3;
  params.cluster_eps = 0.45;
  FcnGraph g = mapper_graph(embedding_from(coords), params);
  CHECK(g.edges == EdgeSet{{1, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 5}});
}

TEST_CASE("mapper graphs are invariant to translating the embedding") {
  Rng rng(71);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix coords(6, 2);
    for (int i = 0; i < 6; ++i) {
      coords(i, 0) = rng.uniform(0.0, 3.0);
      coords(i, 1) = rng.uniform(0.0, 3.0);
    }
    MapperParams params;
    params.n_intervals_x = 3;
    params.n_intervals_y = 2;
    params.overlap = 0.4;
    params.cluster_eps = 0.8;
    FcnGraph base = mapper_graph(embedding_from(coords), params);

    Matrix moved = coords;
    double dx = rng.uniform(-50.0, 50.0), dy = rng.uniform(-50.0, 50.0);
    moved.col(0).array() += dx;
    moved.col(1).array() += dy;
    FcnGraph shifted = mapper_graph(embedding_from(moved), params);
    CHECK(base.edges == shifted.edges);
  }
}

TEST_CASE("every mapper edge is witnessed by a shared cluster") {
  Rng rng(73);
  Matrix coords(10, 2);
  for (int i = 0; i < 10; ++i) {
    coords(i, 0) = rng.uniform(0.0, 2.0);
    coords(i, 1) = rng.uniform(0.0, 2.0);
  }
  MapperParams params;  // defaults with auto eps
  FcnGraph g = mapper_graph(embedding_from(coords), params);
  for (const auto& [a, b] : g.edges) {
    bool witnessed = false;
    for (const auto& c : g.clusters) {
      bool has_a = false, has_b = false;
      for (int node : c) {
        has_a |= node == a;
        has_b |= node == b;
      }
      if (has_a && has_b) {
        witnessed = true;
        break;
      }
    }
    CHECK(witnessed);
  }
}

TEST_CASE("mapper rejects bad parameters and coincident auto-eps input") {
  Matrix coords(3, 2);
  coords << 0.0, 0.0, 1.0, 0.0, 2.0, 0.0;
  MapperParams bad;
  bad.n_intervals_x = 0;
  CHECK_THROWS_AS(mapper_graph(embedding_from(coords), bad), FcnetError);

  MapperParams overlap_high;
  overlap_high.overlap = 0.95;
  CHECK_THROWS_AS(mapper_graph(embedding_from(coords), overlap_high),
                  FcnetError);

  MapperParams auto_eps;  // cluster_eps <= 0 -> percentile of distances
  Matrix same(3, 2);
  same.setZero();
  CHECK_THROWS_AS(mapper_graph(embedding_from(same), auto_eps), FcnetError);
}

TEST_CASE("adjacency round-trips through graph_from_adjacency") {
  FcnGraph g;
  g.r = 5;
  g.edges = {{1, 3}, {2, 5}, {4, 5}};
  g.method = FcnMethod::PEARSON;
  g.params = "tau=0.5";
  Matrix adj = adjacency(g);
  REQUIRE(adj.rows() == 5);
  CHECK(adj(0, 2) == 1.0);
  CHECK(adj(2, 0) == 1.0);
  CHECK(adj(1, 4) == 1.0);
  CHECK(adj(3, 4) == 1.0);
  CHECK(adj.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(adj.sum() == doctest::Approx(6.0));

  FcnGraph back = graph_from_adjacency(adj, FcnMethod::PEARSON, "tau=0.5");
  CHECK(back.edges == g.edges);
  CHECK(back.r == 5);

  // single edge and empty graph
  FcnGraph single;
  single.r = 2;
  single.edges = {{1, 2}};
  Matrix sa = adjacency(single);
  CHECK(sa(0, 1) == 1.0);
  CHECK(graph_from_adjacency(sa, FcnMethod::PEARSON, "").edges ==
        EdgeSet{{1, 2}});

  FcnGraph empty;
  empty.r = 3;
  Matrix ea = adjacency(empty);
  CHECK(ea.cwiseAbs().maxCoeff() == 0.0);
  CHECK(graph_from_adjacency(ea, FcnMethod::PEARSON, "").edges.empty());
}

TEST_CASE("graph_from_adjacency rejects asymmetric and self-loop input") {
  Matrix adj = Matrix::Zero(3, 3);
  adj(0, 1) = 1.0;  // missing the mirror entry
  CHECK_THROWS_AS(graph_from_adjacency(adj, FcnMethod::PEARSON, ""), FcnetError);
  Matrix self = Matrix::Zero(2, 2);
  self(0, 0) = 1.0;
  CHECK_THROWS_AS(graph_from_adjacency(self, FcnMethod::PEARSON, ""),
                  FcnetError);
}

TEST_CASE("dot and json exports carry the structure") {
  RoiAtlas atlas({"Alpha", "Beta", "Gamma"});
  FcnGraph g;
  g.r = 3;
  g.edges = {{1, 2}, {2, 3}};
  g.method = FcnMethod::PEARSON;
  g.params = "tau=0.5";

  std::string dot = graph_to_dot(g, atlas);
  CHECK(dot.find("graph") != std::string::npos);
  CHECK(dot.find("Alpha") != std::string::npos);
  CHECK(dot.find("Gamma") != std::string::npos);
  CHECK(dot.find("--") != std::string::npos);

  std::string json = graph_to_json(g);
  CHECK(json.find("\"r\"") != std::string::npos);
  CHECK(json.find("\"edges\"") != std::string::npos);
  CHECK(json.find("pearson") != std::string::npos);
}
