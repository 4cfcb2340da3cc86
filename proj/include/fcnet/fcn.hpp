#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fcnet/atlas.hpp"
#include "fcnet/common.hpp"
#include "fcnet/embedding.hpp"

namespace fcnet {

enum class CorrKind { PEARSON, FISHER_Z };

struct CorrMatrix {
  Matrix values;  // R x R
  CorrKind kind = CorrKind::PEARSON;
};

enum class FcnMethod {
  PEARSON,
  FISHER_Z,
  MAPPER_PCA,
  MAPPER_TSNE,
  MAPPER_UMAP,
};

std::string fcn_method_name(FcnMethod m);
FcnMethod fcn_method_from_name(const std::string& name);

// Undirected simple graph on nodes 1..r. Mapper graphs also retain their
// cluster memberships (1-based node ids) for inspection.
struct FcnGraph {
  int r = 0;
  std::set<std::pair<int, int>> edges;  // i < j, 1-based
  FcnMethod method = FcnMethod::PEARSON;
  std::string params;
  std::vector<std::vector<int>> clusters;
};

struct MapperParams {
  int n_intervals_x = 4;
  int n_intervals_y = 4;
  double overlap = 0.3;
  // <= 0 means: use the auto_eps_percentile of pairwise embedding distances.
  double cluster_eps = 0.0;
  double auto_eps_percentile = 20.0;
};

CorrMatrix pearson_matrix(const BoldRecording& rec,
                          const RoiAtlas* atlas = nullptr);
CorrMatrix fisher_z(const CorrMatrix& corr);

FcnGraph threshold_graph(const CorrMatrix& corr, double tau);
FcnGraph mapper_graph(const Embedding& embedding, const MapperParams& params);

Matrix adjacency(const FcnGraph& graph);
FcnGraph graph_from_adjacency(const Matrix& adj, FcnMethod method,
                              const std::string& params);

std::string graph_to_dot(const FcnGraph& graph, const RoiAtlas& atlas);
std::string graph_to_json(const FcnGraph& graph);

}  // namespace fcnet
