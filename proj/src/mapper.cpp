#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

#include "fcnet/fcn.hpp"

namespace fcnet {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(a)] = b;
  }
};

// Overlapping 1-D cover: n intervals of equal length whose consecutive
// overlap is the given fraction of the interval length.
struct AxisCover {
  double lo, length, stride;
  int n;
  bool contains(double x, int m) const {
    double start = lo + m * stride;
    double slack = 1e-9 * (length + 1.0);
    return x >= start - slack && x <= start + length + slack;
  }
};

AxisCover make_cover(double lo, double hi, int n, double overlap) {
  double range = hi - lo;
  double length = range / ((n - 1) * (1.0 - overlap) + 1.0);
  return AxisCover{lo, length, length * (1.0 - overlap), n};
}

}  // namespace

FcnGraph mapper_graph(const Embedding& embedding, const MapperParams& params) {
  const Matrix& y = embedding.coords;
  int r = static_cast<int>(y.rows());
  require(r >= 1, ErrorCode::InvalidArgument, "mapper: empty embedding");
  require(y.cols() == 2, ErrorCode::DimensionMismatch,
          "mapper: embedding must be R x 2");
  require(all_finite(y), ErrorCode::NonFinite, "mapper: non-finite coords");
  require(params.n_intervals_x >= 1 && params.n_intervals_y >= 1,
          ErrorCode::InvalidArgument, "mapper: interval counts must be >= 1");
  require(params.overlap > 0.0 && params.overlap < 0.9,
          ErrorCode::InvalidArgument, "mapper: overlap must lie in (0, 0.9)");

  double eps = params.cluster_eps;
  if (eps <= 0.0) {
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(r) * (r - 1) / 2);
    for (int i = 0; i < r; ++i) {
      for (int j = i + 1; j < r; ++j) {
        dists.push_back((y.row(i) - y.row(j)).norm());
      }
    }
    require(!dists.empty(), ErrorCode::InvalidArgument,
            "mapper: need at least 2 points for automatic cluster_eps");
    eps = percentile_nearest_rank(std::move(dists), params.auto_eps_percentile);
    require(eps > 0.0, ErrorCode::InvalidArgument,
            "mapper: automatic cluster_eps is zero (coincident points); set "
            "cluster_eps explicitly");
  }

  AxisCover cx = make_cover(y.col(0).minCoeff(), y.col(0).maxCoeff(),
                            params.n_intervals_x, params.overlap);
  AxisCover cy = make_cover(y.col(1).minCoeff(), y.col(1).maxCoeff(),
                            params.n_intervals_y, params.overlap);

  FcnGraph g;
  g.r = r;
  std::string method = embedding.method == EmbedMethod::PCA    ? "mapper_pca"
                       : embedding.method == EmbedMethod::TSNE ? "mapper_tsne"
                                                               : "mapper_umap";
  g.method = fcn_method_from_name(method);
  std::ostringstream ps;
  ps << "cover=" << params.n_intervals_x << "x" << params.n_intervals_y
     << " overlap=" << format_double(params.overlap)
     << " cluster_eps=" << format_double(eps);
  g.params = ps.str();

  for (int mx = 0; mx < cx.n; ++mx) {
    for (int my = 0; my < cy.n; ++my) {
      std::vector<int> members;
      for (int i = 0; i < r; ++i) {
        if (cx.contains(y(i, 0), mx) && cy.contains(y(i, 1), my)) {
          members.push_back(i);
        }
      }
      if (members.empty()) continue;
      // Single-linkage cut at eps = components of the eps-neighborhood graph.
      int n = static_cast<int>(members.size());
      UnionFind uf(n);
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          double d = (y.row(members[static_cast<std::size_t>(a)]) -
                      y.row(members[static_cast<std::size_t>(b)]))
                         .norm();
          if (d <= eps) uf.unite(a, b);
        }
      }
      std::map<int, std::vector<int>> groups;
      for (int a = 0; a < n; ++a) {
        groups[uf.find(a)].push_back(members[static_cast<std::size_t>(a)] + 1);
      }
      for (auto& [root, nodes] : groups) {
        for (std::size_t a = 0; a < nodes.size(); ++a) {
          for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            g.edges.insert({std::min(nodes[a], nodes[b]),
                            std::max(nodes[a], nodes[b])});
          }
        }
        g.clusters.push_back(std::move(nodes));
      }
    }
  }
  return g;
}

}  // namespace fcnet
