#pragma once

#include <string>
#include <vector>

#include "fcnet/common.hpp"

namespace fcnet {

enum class EmbedMethod { PCA, TSNE, UMAP };

std::string embed_method_name(EmbedMethod m);
EmbedMethod embed_method_from_name(const std::string& name);

struct TsneParams {
  double perplexity = 10.0;
  int iterations = 1000;
  double learning_rate = 100.0;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;
};

struct UmapParams {
  int n_neighbors = 15;
  double min_dist = 0.1;
  int epochs = 500;
  int negative_sample_rate = 5;
};

struct Embedding {
  Matrix coords;  // R x 2
  EmbedMethod method = EmbedMethod::PCA;
  std::string params;  // compact key=value record of what was used
  std::uint64_t seed = 0;
};

// Channels as points in T-space, cloud centered across channels. coords
// column k is the k-th principal projection rescaled so its sample variance
// equals the k-th eigenvalue of the centered R x R channel covariance
// Zc^T Zc / (T-1). Columns are exactly orthogonal with exact zero mean; sign
// makes each component's largest-magnitude loading positive.
Embedding pca_embed(const Matrix& signal, bool allow_rank_deficient = false);

// Pairwise squared Euclidean distances between columns of signal.
Matrix squared_channel_distances(const Matrix& signal);

// Per-row Gaussian affinities calibrated by bisection so each row entropy of
// the conditional distribution is ln(perplexity) within 1e-5. Returns the
// R x R conditional matrix (zero diagonal, rows sum to 1); betas receives the
// precision 1/(2 sigma_i^2) per row if non-null.
Matrix tsne_conditional_affinities(const Matrix& sq_dist, double perplexity,
                                   std::vector<double>* betas = nullptr);

double kl_divergence_pq(const Matrix& p, const Matrix& q);

// Exact O(R^2) t-SNE. kl_trace, if given, receives KL(P||Q) at iteration 0,
// every 50 iterations, and after the final iteration (plain P, without the
// early-exaggeration factor).
Embedding tsne_embed(const Matrix& signal, const TsneParams& params,
                     std::uint64_t seed,
                     std::vector<double>* kl_trace = nullptr);

// Least-squares fit of 1/(1+a d^{2b}) to the min_dist membership curve.
void umap_fit_ab(double min_dist, double* a, double* b);

// Per-point smooth-kNN calibration: rho_i = nearest-neighbor distance, and
// sigma_i solves sum_j exp(-(d_ij - rho_i)/sigma_i) = log2(n_neighbors) over
// the k nearest neighbors, within 1e-6 where a root exists.
void umap_smooth_knn(const Matrix& sq_dist, int n_neighbors,
                     std::vector<std::vector<int>>* neighbors,
                     std::vector<double>* rho, std::vector<double>* sigma);

// Symmetric fuzzy-union weight matrix w = a + b - ab over directed kNN
// memberships.
Matrix umap_fuzzy_weights(const Matrix& sq_dist, int n_neighbors);

Embedding umap_embed(const Matrix& signal, const UmapParams& params,
                     std::uint64_t seed);

}  // namespace fcnet
