#include "fcnet/fcn.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fcnet {

std::string fcn_method_name(FcnMethod m) {
  switch (m) {
    case FcnMethod::PEARSON: return "pearson";
    case FcnMethod::FISHER_Z: return "fisher_z";
    case FcnMethod::MAPPER_PCA: return "mapper_pca";
    case FcnMethod::MAPPER_TSNE: return "mapper_tsne";
    case FcnMethod::MAPPER_UMAP: return "mapper_umap";
  }
  fail(ErrorCode::InvalidArgument, "unknown fcn method");
}

FcnMethod fcn_method_from_name(const std::string& name) {
  if (name == "pearson") return FcnMethod::PEARSON;
  if (name == "fisher_z") return FcnMethod::FISHER_Z;
  if (name == "mapper_pca") return FcnMethod::MAPPER_PCA;
  if (name == "mapper_tsne") return FcnMethod::MAPPER_TSNE;
  if (name == "mapper_umap") return FcnMethod::MAPPER_UMAP;
  fail(ErrorCode::InvalidArgument, "unknown fcn method: " + name);
}

CorrMatrix pearson_matrix(const BoldRecording& rec, const RoiAtlas* atlas) {
  const Matrix& x = rec.signal;
  int t = rec.t_count();
  int r = rec.r_count();
  require(t >= 3, ErrorCode::InvalidArgument, "pearson: needs T >= 3");
  require(all_finite(x), ErrorCode::NonFinite, "pearson: non-finite input");

  Matrix centered = x.rowwise() - x.colwise().mean();
  Vector norms(r);
  for (int j = 0; j < r; ++j) {
    norms(j) = centered.col(j).norm();
    if (norms(j) <= 0.0) {
      std::string name = atlas ? atlas->label(j + 1)
                               : "channel " + std::to_string(j + 1);
      fail(ErrorCode::InvalidArgument,
           "degenerate channel (zero variance): " + name);
    }
  }
  // Fill from the upper triangle so the result is symmetric to the bit; the
  // Gram product alone is not, its two dot-product orders can round apart.
  Matrix corr(r, r);
  Matrix gram = centered.transpose() * centered;
  for (int i = 0; i < r; ++i) {
    corr(i, i) = 1.0;
    for (int j = i + 1; j < r; ++j) {
      double v = std::clamp(gram(i, j) / (norms(i) * norms(j)), -1.0, 1.0);
      corr(i, j) = v;
      corr(j, i) = v;
    }
  }
  return CorrMatrix{std::move(corr), CorrKind::PEARSON};
}

CorrMatrix fisher_z(const CorrMatrix& corr) {
  require(corr.kind == CorrKind::PEARSON, ErrorCode::InvalidArgument,
          "fisher_z: input must be a Pearson matrix");
  const double cap = 1.0 - 1e-7;
  Matrix z = corr.values.unaryExpr(
      [cap](double r) { return std::atanh(std::clamp(r, -cap, cap)); });
  z.diagonal().setZero();
  return CorrMatrix{std::move(z), CorrKind::FISHER_Z};
}

FcnGraph threshold_graph(const CorrMatrix& corr, double tau) {
  require(tau > 0.0, ErrorCode::InvalidArgument, "threshold: tau must be > 0");
  int r = static_cast<int>(corr.values.rows());
  FcnGraph g;
  g.r = r;
  g.method = corr.kind == CorrKind::PEARSON ? FcnMethod::PEARSON
                                            : FcnMethod::FISHER_Z;
  g.params = "tau=" + format_double(tau);
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      if (std::abs(corr.values(i, j)) >= tau) {
        g.edges.insert({i + 1, j + 1});
      }
    }
  }
  return g;
}

Matrix adjacency(const FcnGraph& graph) {
  Matrix a = Matrix::Zero(graph.r, graph.r);
  for (const auto& [i, j] : graph.edges) {
    require(i >= 1 && j <= graph.r && i < j, ErrorCode::InvalidArgument,
            "adjacency: edge endpoints out of range");
    a(i - 1, j - 1) = 1.0;
    a(j - 1, i - 1) = 1.0;
  }
  return a;
}

FcnGraph graph_from_adjacency(const Matrix& adj, FcnMethod method,
                              const std::string& params) {
  int r = static_cast<int>(adj.rows());
  require(adj.cols() == r, ErrorCode::DimensionMismatch,
          "adjacency must be square");
  FcnGraph g;
  g.r = r;
  g.method = method;
  g.params = params;
  for (int i = 0; i < r; ++i) {
    require(adj(i, i) == 0.0, ErrorCode::InvalidArgument,
            "adjacency diagonal must be zero");
    for (int j = i + 1; j < r; ++j) {
      require(adj(i, j) == adj(j, i), ErrorCode::InvalidArgument,
              "adjacency must be symmetric");
      require(adj(i, j) == 0.0 || adj(i, j) == 1.0, ErrorCode::InvalidArgument,
              "adjacency entries must be 0 or 1");
      if (adj(i, j) == 1.0) g.edges.insert({i + 1, j + 1});
    }
  }
  return g;
}

std::string graph_to_dot(const FcnGraph& graph, const RoiAtlas& atlas) {
  require(atlas.size() == graph.r, ErrorCode::DimensionMismatch,
          "dot export: atlas size != node count");
  std::ostringstream out;
  out << "graph fcn {\n";
  for (int i = 1; i <= graph.r; ++i) {
    out << "  n" << i << " [label=\"" << atlas.label(i) << "\"];\n";
  }
  for (const auto& [i, j] : graph.edges) {
    out << "  n" << i << " -- n" << j << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string graph_to_json(const FcnGraph& graph) {
  nlohmann::json j;
  j["method"] = fcn_method_name(graph.method);
  j["params"] = graph.params;
  j["r"] = graph.r;
  auto edges = nlohmann::json::array();
  for (const auto& [a, b] : graph.edges) {
    edges.push_back({a, b});
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

}  // namespace fcnet
