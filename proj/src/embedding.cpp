#include "fcnet/embedding.hpp"

#include <Eigen/Eigenvalues>

namespace fcnet {

std::string embed_method_name(EmbedMethod m) {
  switch (m) {
    case EmbedMethod::PCA: return "pca";
    case EmbedMethod::TSNE: return "tsne";
    case EmbedMethod::UMAP: return "umap";
  }
  fail(ErrorCode::InvalidArgument, "unknown embed method");
}

EmbedMethod embed_method_from_name(const std::string& name) {
  if (name == "pca") return EmbedMethod::PCA;
  if (name == "tsne") return EmbedMethod::TSNE;
  if (name == "umap") return EmbedMethod::UMAP;
  fail(ErrorCode::InvalidArgument, "unknown embed method: " + name);
}

Matrix squared_channel_distances(const Matrix& signal) {
  int r = static_cast<int>(signal.cols());
  Vector norms = signal.colwise().squaredNorm().transpose();
  Matrix d2 = norms.replicate(1, r) + norms.transpose().replicate(r, 1) -
              2.0 * signal.transpose() * signal;
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();
  return d2;
}

Embedding pca_embed(const Matrix& signal, bool allow_rank_deficient) {
  int t = static_cast<int>(signal.rows());
  int r = static_cast<int>(signal.cols());
  require(r >= 3, ErrorCode::InvalidArgument, "pca: needs at least 3 channels");
  require(t >= 2, ErrorCode::InvalidArgument, "pca: needs at least 2 rows");
  require(all_finite(signal), ErrorCode::NonFinite, "pca: non-finite input");

  // Center the channel cloud, then eigendecompose the R x R matrix whose
  // nonzero spectrum matches the T x T point covariance.
  Vector mean_channel = signal.rowwise().mean();
  Matrix zc = signal.colwise() - mean_channel;
  Matrix cov = zc.transpose() * zc / static_cast<double>(t - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  require(es.info() == Eigen::Success, ErrorCode::NumericOverflow,
          "pca: eigen decomposition failed");
  // Eigen returns ascending order.
  double l1 = es.eigenvalues()(r - 1);
  double l2 = es.eigenvalues()(r - 2);
  Vector v1 = es.eigenvectors().col(r - 1);
  Vector v2 = es.eigenvectors().col(r - 2);

  double tol = 1e-12 * std::max(l1, 1.0);
  require(l1 > tol, ErrorCode::RankDeficient, "pca: covariance has rank 0");
  bool rank1 = l2 <= tol;
  if (rank1 && !allow_rank_deficient) {
    fail(ErrorCode::RankDeficient, "pca: covariance has rank < 2");
  }

  auto fix_sign = [](Vector& v) {
    int imax = 0;
    for (int i = 1; i < v.size(); ++i) {
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    }
    if (v(imax) < 0.0) v = -v;
  };
  fix_sign(v1);
  fix_sign(v2);

  Matrix coords(r, 2);
  double scale = std::sqrt(static_cast<double>(r - 1));
  coords.col(0) = std::sqrt(l1) * scale * v1;
  if (rank1) {
    coords.col(1).setZero();
  } else {
    coords.col(1) = std::sqrt(l2) * scale * v2;
  }
  // Sample variance of column k over the R rows is exactly lambda_k: the
  // retained eigenvectors are unit and orthogonal to the ones vector.

  Embedding emb;
  emb.coords = std::move(coords);
  emb.method = EmbedMethod::PCA;
  emb.params = "allow_rank_deficient=" +
               std::string(allow_rank_deficient ? "true" : "false");
  emb.seed = 0;
  return emb;
}

}  // namespace fcnet
