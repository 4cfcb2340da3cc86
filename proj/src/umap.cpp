#include <algorithm>
#include <numeric>

#include "fcnet/embedding.hpp"

namespace fcnet {

void umap_fit_ab(double min_dist, double* a, double* b) {
  require(min_dist > 0.0 && min_dist < 1.0, ErrorCode::InvalidArgument,
          "umap: min_dist must lie in (0,1)");
  // Gauss-Newton fit of 1/(1+a d^{2b}) to the target membership curve on a
  // fixed grid; damping keeps the iterates positive.
  const int n = 300;
  const double span = 3.0;
  std::vector<double> d(n), target(n);
  for (int i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] = span * (i + 1) / n;
    double x = d[static_cast<std::size_t>(i)];
    target[static_cast<std::size_t>(i)] =
        x <= min_dist ? 1.0 : std::exp(-(x - min_dist));
  }
  double pa = 1.0, pb = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    double j11 = 0.0, j12 = 0.0, j22 = 0.0, g1 = 0.0, g2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = d[static_cast<std::size_t>(i)];
      double xp = std::pow(x, 2.0 * pb);
      double denom = 1.0 + pa * xp;
      double f = 1.0 / denom;
      double res = f - target[static_cast<std::size_t>(i)];
      double dfa = -xp / (denom * denom);
      double dfb = -2.0 * pa * xp * std::log(x) / (denom * denom);
      j11 += dfa * dfa;
      j12 += dfa * dfb;
      j22 += dfb * dfb;
      g1 += dfa * res;
      g2 += dfb * res;
    }
    double det = j11 * j22 - j12 * j12;
    if (std::abs(det) < 1e-18) break;
    double da = -(j22 * g1 - j12 * g2) / det;
    double db = -(j11 * g2 - j12 * g1) / det;
    double step = 1.0;
    while ((pa + step * da <= 1e-3 || pb + step * db <= 1e-3) && step > 1e-6) {
      step *= 0.5;
    }
    pa += step * da;
    pb += step * db;
    if (std::abs(da) + std::abs(db) < 1e-12) break;
  }
  *a = pa;
  *b = pb;
}

void umap_smooth_knn(const Matrix& sq_dist, int n_neighbors,
                     std::vector<std::vector<int>>* neighbors,
                     std::vector<double>* rho, std::vector<double>* sigma) {
  int r = static_cast<int>(sq_dist.rows());
  require(n_neighbors >= 2 && n_neighbors < r, ErrorCode::InvalidArgument,
          "umap: need 2 <= n_neighbors < point count");
  neighbors->assign(static_cast<std::size_t>(r), {});
  rho->assign(static_cast<std::size_t>(r), 0.0);
  sigma->assign(static_cast<std::size_t>(r), 0.0);
  double target = std::log2(static_cast<double>(n_neighbors));

  for (int i = 0; i < r; ++i) {
    std::vector<int> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      double dx = sq_dist(i, x), dy = sq_dist(i, y);
      return dx != dy ? dx < dy : x < y;
    });
    std::vector<int>& nn = (*neighbors)[static_cast<std::size_t>(i)];
    for (int j : order) {
      if (j == i) continue;
      nn.push_back(j);
      if (static_cast<int>(nn.size()) == n_neighbors) break;
    }
    std::vector<double> dist(nn.size());
    for (std::size_t k = 0; k < nn.size(); ++k) {
      dist[k] = std::sqrt(sq_dist(i, nn[k]));
    }
    double r_i = *std::min_element(dist.begin(), dist.end());
    (*rho)[static_cast<std::size_t>(i)] = r_i;

    auto mass = [&](double s) {
      double acc = 0.0;
      for (double dd : dist) acc += std::exp(-std::max(0.0, dd - r_i) / s);
      return acc;
    };
    // mass is increasing in sigma, from the count of ties at rho up to k.
    double lo = 1e-8, hi = 1.0;
    while (mass(hi) < target && hi < 1e6) hi *= 2.0;
    if (mass(lo) > target) {
      (*sigma)[static_cast<std::size_t>(i)] = lo;  // ties make it infeasible
      continue;
    }
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mass(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    (*sigma)[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
  }
}

Matrix umap_fuzzy_weights(const Matrix& sq_dist, int n_neighbors) {
  int r = static_cast<int>(sq_dist.rows());
  std::vector<std::vector<int>> neighbors;
  std::vector<double> rho, sigma;
  umap_smooth_knn(sq_dist, n_neighbors, &neighbors, &rho, &sigma);
  Matrix directed = Matrix::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j : neighbors[static_cast<std::size_t>(i)]) {
      double d = std::sqrt(sq_dist(i, j));
      directed(i, j) = std::exp(
          -std::max(0.0, d - rho[static_cast<std::size_t>(i)]) /
          sigma[static_cast<std::size_t>(i)]);
    }
  }
  Matrix w(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      double a = directed(i, j), b = directed(j, i);
      w(i, j) = a + b - a * b;
    }
  }
  w.diagonal().setZero();
  return w;
}

Embedding umap_embed(const Matrix& signal, const UmapParams& params,
                     std::uint64_t seed) {
  int r = static_cast<int>(signal.cols());
  require(params.epochs >= 1, ErrorCode::InvalidArgument,
          "umap: epochs must be >= 1");
  require(params.negative_sample_rate >= 0, ErrorCode::InvalidArgument,
          "umap: negative_sample_rate must be >= 0");
  require(all_finite(signal), ErrorCode::NonFinite, "umap: non-finite input");

  Matrix d2 = squared_channel_distances(signal);
  Matrix w = umap_fuzzy_weights(d2, params.n_neighbors);
  double a, b;
  umap_fit_ab(params.min_dist, &a, &b);

  struct EdgeRec {
    int i, j;
    double w;
  };
  std::vector<EdgeRec> edges;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      if (w(i, j) > 0.0) edges.push_back({i, j, w(i, j)});
    }
  }

  Rng rng(seed);
  Matrix y(r, 2);
  for (int i = 0; i < r; ++i) {
    y(i, 0) = rng.uniform(-10.0, 10.0);
    y(i, 1) = rng.uniform(-10.0, 10.0);
  }

  auto clip = [](double v) { return std::clamp(v, -4.0, 4.0); };
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double alpha = 1.0 - static_cast<double>(epoch) / params.epochs;
    for (const EdgeRec& e : edges) {
      double dx = y(e.i, 0) - y(e.j, 0);
      double dy = y(e.i, 1) - y(e.j, 1);
      double dsq = dx * dx + dy * dy;
      if (dsq > 0.0) {
        // Attraction, scaled by the edge's fuzzy weight instead of the
        // reference implementation's per-edge sampling schedule.
        double coeff = -2.0 * a * b * std::pow(dsq, b - 1.0) /
                       (1.0 + a * std::pow(dsq, b));
        double gx = clip(coeff * dx) * alpha * e.w;
        double gy = clip(coeff * dy) * alpha * e.w;
        y(e.i, 0) += gx;
        y(e.i, 1) += gy;
        y(e.j, 0) -= gx;
        y(e.j, 1) -= gy;
      }
      for (int s = 0; s < params.negative_sample_rate; ++s) {
        int k = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(r)));
        if (k == e.i || k == e.j) continue;
        double rx = y(e.i, 0) - y(k, 0);
        double ry = y(e.i, 1) - y(k, 1);
        double rsq = rx * rx + ry * ry;
        double coeff = 2.0 * b / ((1e-3 + rsq) * (1.0 + a * std::pow(rsq, b)));
        y(e.i, 0) += clip(coeff * rx) * alpha;
        y(e.i, 1) += clip(coeff * ry) * alpha;
      }
    }
  }
  require(all_finite(y), ErrorCode::NumericOverflow, "umap: layout diverged");

  Embedding emb;
  emb.coords = std::move(y);
  emb.method = EmbedMethod::UMAP;
  emb.params = "n_neighbors=" + std::to_string(params.n_neighbors) +
               " min_dist=" + format_double(params.min_dist) +
               " epochs=" + std::to_string(params.epochs);
  emb.seed = seed;
  return emb;
}

}  // namespace fcnet
