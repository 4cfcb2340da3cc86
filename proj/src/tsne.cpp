#include "fcnet/embedding.hpp"

namespace fcnet {

Matrix tsne_conditional_affinities(const Matrix& sq_dist, double perplexity,
                                   std::vector<double>* betas) {
  int r = static_cast<int>(sq_dist.rows());
  require(sq_dist.cols() == r, ErrorCode::DimensionMismatch,
          "affinities: distance matrix must be square");
  require(perplexity > 1.0, ErrorCode::InvalidArgument,
          "perplexity must exceed 1");
  require(3.0 * perplexity < static_cast<double>(r - 1),
          ErrorCode::InvalidArgument,
          "perplexity too large for " + std::to_string(r) + " points");

  double target_entropy = std::log(perplexity);
  Matrix p = Matrix::Zero(r, r);
  if (betas) betas->assign(static_cast<std::size_t>(r), 0.0);

  std::vector<double> row(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    // Shifting distances by the row minimum leaves the conditional
    // distribution and its entropy unchanged but avoids exp underflow.
    double dmin = INFINITY;
    for (int j = 0; j < r; ++j) {
      if (j != i) dmin = std::min(dmin, sq_dist(i, j));
    }
    double beta = 1.0, beta_lo = 0.0, beta_hi = INFINITY;
    double sum_p = 0.0;
    // Entropy decreases in beta; expand then bisect.
    for (int iter = 0; iter < 200; ++iter) {
      sum_p = 0.0;
      double h_acc = 0.0;
      for (int j = 0; j < r; ++j) {
        if (j == i) {
          row[static_cast<std::size_t>(j)] = 0.0;
          continue;
        }
        double d = sq_dist(i, j) - dmin;
        double w = std::exp(-beta * d);
        row[static_cast<std::size_t>(j)] = w;
        sum_p += w;
        h_acc += beta * d * w;
      }
      require(sum_p > 0.0, ErrorCode::NumericOverflow,
              "affinities: row underflow, distances too large");
      double entropy = std::log(sum_p) + h_acc / sum_p;
      double diff = entropy - target_entropy;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0.0) {
        beta_lo = beta;
        beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta_lo + beta_hi);
      } else {
        beta_hi = beta;
        beta = beta_lo == 0.0 ? beta / 2.0 : 0.5 * (beta_lo + beta_hi);
      }
    }
    for (int j = 0; j < r; ++j) {
      p(i, j) = row[static_cast<std::size_t>(j)] / sum_p;
    }
    if (betas) (*betas)[static_cast<std::size_t>(i)] = beta;
  }
  return p;
}

double kl_divergence_pq(const Matrix& p, const Matrix& q) {
  double kl = 0.0;
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      if (p(i, j) > 0.0) {
        kl += p(i, j) * std::log(p(i, j) / std::max(q(i, j), 1e-300));
      }
    }
  }
  return kl;
}

// Student-t affinities of the current layout; returns Q and the unnormalized
// kernel in num.
static void layout_affinities(const Matrix& y, Matrix* q, Matrix* num) {
  int r = static_cast<int>(y.rows());
  num->resize(r, r);
  double sum = 0.0;
  for (int i = 0; i < r; ++i) {
    (*num)(i, i) = 0.0;
    for (int j = i + 1; j < r; ++j) {
      double dx = y(i, 0) - y(j, 0);
      double dy = y(i, 1) - y(j, 1);
      double w = 1.0 / (1.0 + dx * dx + dy * dy);
      (*num)(i, j) = w;
      (*num)(j, i) = w;
      sum += 2.0 * w;
    }
  }
  *q = *num / sum;
}

Embedding tsne_embed(const Matrix& signal, const TsneParams& params,
                     std::uint64_t seed, std::vector<double>* kl_trace) {
  int r = static_cast<int>(signal.cols());
  require(r >= 4, ErrorCode::InvalidArgument, "tsne: needs at least 4 points");
  require(params.iterations >= 250, ErrorCode::InvalidArgument,
          "tsne: iterations must be >= 250");
  require(all_finite(signal), ErrorCode::NonFinite, "tsne: non-finite input");

  Matrix d2 = squared_channel_distances(signal);
  Matrix pc = tsne_conditional_affinities(d2, params.perplexity);
  Matrix p = (pc + pc.transpose()) / (2.0 * r);
  p *= params.early_exaggeration;

  Rng rng(seed);
  Matrix y(r, 2);
  for (int i = 0; i < r; ++i) {
    y(i, 0) = 1e-4 * rng.normal();
    y(i, 1) = 1e-4 * rng.normal();
  }
  Matrix velocity = Matrix::Zero(r, 2);
  Matrix q, num, grad(r, 2);

  auto plain_kl = [&](double exaggeration) {
    layout_affinities(y, &q, &num);
    return kl_divergence_pq(p / exaggeration, q);
  };
  if (kl_trace) {
    kl_trace->clear();
    kl_trace->push_back(plain_kl(params.early_exaggeration));
  }

  bool exaggerated = true;
  for (int iter = 0; iter < params.iterations; ++iter) {
    if (exaggerated && iter >= params.exaggeration_iters) {
      p /= params.early_exaggeration;
      exaggerated = false;
    }
    layout_affinities(y, &q, &num);
    grad.setZero();
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        if (j == i) continue;
        double mult = 4.0 * (p(i, j) - q(i, j)) * num(i, j);
        grad(i, 0) += mult * (y(i, 0) - y(j, 0));
        grad(i, 1) += mult * (y(i, 1) - y(j, 1));
      }
    }
    double momentum = iter < params.momentum_switch_iter
                          ? params.momentum_initial
                          : params.momentum_final;
    velocity = momentum * velocity - params.learning_rate * grad;
    y += velocity;
    Eigen::RowVector2d center = y.colwise().mean();
    y.rowwise() -= center;
    if (kl_trace && (iter + 1) % 50 == 0 && iter + 1 < params.iterations) {
      kl_trace->push_back(plain_kl(exaggerated ? params.early_exaggeration : 1.0));
    }
  }
  if (exaggerated) p /= params.early_exaggeration;
  require(all_finite(y), ErrorCode::NumericOverflow, "tsne: layout diverged");
  if (kl_trace) kl_trace->push_back(plain_kl(1.0));

  Embedding emb;
  emb.coords = std::move(y);
  emb.method = EmbedMethod::TSNE;
  emb.params = "perplexity=" + format_double(params.perplexity) +
               " iterations=" + std::to_string(params.iterations) +
               " learning_rate=" + format_double(params.learning_rate);
  emb.seed = seed;
  return emb;
}

}  // namespace fcnet
