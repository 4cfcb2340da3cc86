#include "fcnet/lsirm.hpp"

#include <iostream>

#include <Eigen/SVD>

namespace fcnet {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_normal_pdf(double x, double mean, double var) {
  double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

double log_inv_gamma_pdf(double x, double shape, double rate) {
  require(x > 0.0, ErrorCode::InvalidArgument, "inv-gamma support is x > 0");
  return shape * std::log(rate) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - rate / x;
}

Matrix pairwise_distances(const Matrix& u, const Matrix& v) {
  Matrix d(v.rows(), u.rows());
  for (int i = 0; i < v.rows(); ++i) {
    for (int j = 0; j < u.rows(); ++j) {
      d(i, j) = (u.row(j) - v.row(i)).norm();
    }
  }
  return d;
}

void validate_state(const LsirmState& state, const LsirmData& data) {
  require(state.theta.size() == data.j() && state.beta.size() == data.n(),
          ErrorCode::DimensionMismatch, "lsirm: effect vector sizes mismatch");
  require(state.u.rows() == data.j() && state.u.cols() == 2 &&
              state.v.rows() == data.n() && state.v.cols() == 2,
          ErrorCode::DimensionMismatch, "lsirm: latent position shapes mismatch");
  require(state.sigma2 > 0.0 && state.sigma_theta2 > 0.0,
          ErrorCode::InvalidArgument, "lsirm: variances must be positive");
}

}  // namespace

void validate_sampler_config(const SamplerConfig& config) {
  require(config.n_iter > config.burn_in && config.burn_in >= 0,
          ErrorCode::Config, "lsirm: need n_iter > burn_in >= 0");
  require(config.thin >= 1, ErrorCode::Config, "lsirm: thin must be >= 1");
  require(config.sd_theta >= 0.0 && config.sd_beta >= 0.0 &&
              config.sd_u >= 0.0 && config.sd_v >= 0.0,
          ErrorCode::Config, "lsirm: proposal sds must be >= 0");
  require(config.tau2_beta > 0.0, ErrorCode::Config,
          "lsirm: tau2_beta must be > 0");
  require(config.a > 0.0 && config.b > 0.0 && config.a_sigma > 0.0 &&
              config.b_sigma > 0.0,
          ErrorCode::Config, "lsirm: inv-gamma hyperparameters must be > 0");
}

double log_likelihood(const LsirmState& state, const LsirmData& data) {
  validate_state(state, data);
  require(all_finite(data.y), ErrorCode::NonFinite, "lsirm: non-finite data");
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.j(); ++j) {
      double mean = state.theta(j) + state.beta(i) -
                    (state.u.row(j) - state.v.row(i)).norm();
      acc += log_normal_pdf(data.y(i, j), mean, state.sigma2);
    }
  }
  return acc;
}

double log_posterior(const LsirmState& state, const LsirmData& data,
                     const SamplerConfig& config) {
  double acc = log_likelihood(state, data);
  for (int j = 0; j < data.j(); ++j) {
    acc += log_normal_pdf(state.theta(j), 0.0, state.sigma_theta2);
    acc += log_normal_pdf(state.u(j, 0), 0.0, 1.0) +
           log_normal_pdf(state.u(j, 1), 0.0, 1.0);
  }
  for (int i = 0; i < data.n(); ++i) {
    acc += log_normal_pdf(state.beta(i), 0.0, config.tau2_beta);
    acc += log_normal_pdf(state.v(i, 0), 0.0, 1.0) +
           log_normal_pdf(state.v(i, 1), 0.0, 1.0);
  }
  acc += log_inv_gamma_pdf(state.sigma2, config.a, config.b);
  acc += log_inv_gamma_pdf(state.sigma_theta2, config.a_sigma, config.b_sigma);
  return acc;
}

double gibbs_sigma2(const LsirmState& state, const LsirmData& data,
                    const SamplerConfig& config, Rng& rng) {
  validate_state(state, data);
  double ss = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    for (int jj = 0; jj < data.j(); ++jj) {
      double resid = data.y(i, jj) -
                     (state.theta(jj) + state.beta(i) -
                      (state.u.row(jj) - state.v.row(i)).norm());
      ss += resid * resid;
    }
  }
  return rng.inv_gamma(config.a + 0.5 * data.n() * data.j(),
                       config.b + 0.5 * ss);
}

double gibbs_sigma_theta2(const LsirmState& state, const SamplerConfig& config,
                          Rng& rng) {
  return rng.inv_gamma(config.a_sigma + 0.5 * state.theta.size(),
                       config.b_sigma + 0.5 * state.theta.squaredNorm());
}

Matrix procrustes_rotation(const Matrix& source, const Matrix& reference) {
  require(source.rows() == reference.rows() && source.cols() == 2 &&
              reference.cols() == 2,
          ErrorCode::DimensionMismatch, "procrustes: shape mismatch");
  Matrix m = source.transpose() * reference;  // 2 x 2
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

LsirmPosterior mcmc_run(const LsirmData& data, const SamplerConfig& config) {
  validate_sampler_config(config);
  require(data.n() >= 2 && data.j() >= 2, ErrorCode::InvalidArgument,
          "lsirm: need N >= 2 and J >= 2");
  require(all_finite(data.y), ErrorCode::NonFinite, "lsirm: non-finite data");
  {
    double spread = data.y.maxCoeff() - data.y.minCoeff();
    if (spread == 0.0) {
      std::cerr << "lsirm: all responses are equal; the chain will be driven "
                   "by the priors\n";
    }
  }

  int n = data.n(), j = data.j();
  Rng rng(config.seed);

  // Moment-matched start: main effects from margins, small random positions.
  LsirmState state;
  double grand = data.y.mean();
  state.theta =
      (data.y.colwise().mean().transpose().array() - grand).matrix();
  state.beta = (data.y.rowwise().mean().array() - grand).matrix();
  state.u.resize(j, 2);
  state.v.resize(n, 2);
  for (int a = 0; a < j; ++a) {
    state.u(a, 0) = 0.1 * rng.normal();
    state.u(a, 1) = 0.1 * rng.normal();
  }
  for (int a = 0; a < n; ++a) {
    state.v(a, 0) = 0.1 * rng.normal();
    state.v(a, 1) = 0.1 * rng.normal();
  }
  double init_var = (data.y.array() - grand).square().mean();
  state.sigma2 = init_var > 0.0 ? init_var : 1.0;
  state.sigma_theta2 = 1.0;

  LsirmPosterior post;
  post.initial_state = state;
  post.config = config;

  // dist(i, j) is refreshed incrementally as positions move.
  Matrix dist = pairwise_distances(state.u, state.v);

  bool frozen = config.sd_theta == 0.0 && config.sd_beta == 0.0 &&
                config.sd_u == 0.0 && config.sd_v == 0.0;

  long prop_theta = 0, acc_theta = 0, prop_beta = 0, acc_beta = 0;
  long prop_u = 0, acc_u = 0, prop_v = 0, acc_v = 0;
  const std::size_t max_log = 200;

  auto log_transition = [&](const std::string& block, double delta,
                            double log_u, bool accepted,
                            const LsirmState& before,
                            const LsirmState& after) {
    if (!config.log_transitions || post.transition_log.size() >= max_log) {
      return;
    }
    TransitionRecord rec;
    rec.block = block;
    rec.lp_before = log_posterior(before, data, config);
    rec.lp_after = log_posterior(after, data, config);
    rec.delta = delta;
    rec.log_uniform = log_u;
    rec.accepted = accepted;
    post.transition_log.push_back(std::move(rec));
  };

  for (int iter = 1; iter <= config.n_iter; ++iter) {
    // theta block: likelihood column j plus its prior.
    for (int jj = 0; jj < j; ++jj) {
      ++prop_theta;
      double cur = state.theta(jj);
      double prop = cur + config.sd_theta * rng.normal();
      double delta = 0.0;
      for (int i = 0; i < n; ++i) {
        double base = state.beta(i) - dist(i, jj);
        delta += log_normal_pdf(data.y(i, jj), prop + base, state.sigma2) -
                 log_normal_pdf(data.y(i, jj), cur + base, state.sigma2);
      }
      delta += log_normal_pdf(prop, 0.0, state.sigma_theta2) -
               log_normal_pdf(cur, 0.0, state.sigma_theta2);
      double lu = std::log(std::max(rng.uniform(), 1e-300));
      bool accepted = lu < delta;
      if (config.log_transitions &&
          post.transition_log.size() < max_log) {
        LsirmState after = state;
        after.theta(jj) = prop;
        log_transition("theta", delta, lu, accepted, state, after);
      }
      if (accepted) {
        state.theta(jj) = prop;
        ++acc_theta;
      }
    }

    // beta block: likelihood row i plus its prior.
    for (int i = 0; i < n; ++i) {
      ++prop_beta;
      double cur = state.beta(i);
      double prop = cur + config.sd_beta * rng.normal();
      double delta = 0.0;
      for (int jj = 0; jj < j; ++jj) {
        double base = state.theta(jj) - dist(i, jj);
        delta += log_normal_pdf(data.y(i, jj), prop + base, state.sigma2) -
                 log_normal_pdf(data.y(i, jj), cur + base, state.sigma2);
      }
      delta += log_normal_pdf(prop, 0.0, config.tau2_beta) -
               log_normal_pdf(cur, 0.0, config.tau2_beta);
      double lu = std::log(std::max(rng.uniform(), 1e-300));
      bool accepted = lu < delta;
      if (config.log_transitions &&
          post.transition_log.size() < max_log) {
        LsirmState after = state;
        after.beta(i) = prop;
        log_transition("beta", delta, lu, accepted, state, after);
      }
      if (accepted) {
        state.beta(i) = prop;
        ++acc_beta;
      }
    }

    // u rows: distances to every patient change.
    for (int jj = 0; jj < j; ++jj) {
      ++prop_u;
      Eigen::RowVector2d cur = state.u.row(jj);
      Eigen::RowVector2d prop = cur;
      prop(0) += config.sd_u * rng.normal();
      prop(1) += config.sd_u * rng.normal();
      double delta = 0.0;
      Vector new_dist(n);
      for (int i = 0; i < n; ++i) {
        double nd = (prop - state.v.row(i)).norm();
        new_dist(i) = nd;
        double base = state.theta(jj) + state.beta(i);
        delta += log_normal_pdf(data.y(i, jj), base - nd, state.sigma2) -
                 log_normal_pdf(data.y(i, jj), base - dist(i, jj),
                                state.sigma2);
      }
      delta += log_normal_pdf(prop(0), 0.0, 1.0) +
               log_normal_pdf(prop(1), 0.0, 1.0) -
               log_normal_pdf(cur(0), 0.0, 1.0) -
               log_normal_pdf(cur(1), 0.0, 1.0);
      double lu = std::log(std::max(rng.uniform(), 1e-300));
      bool accepted = lu < delta;
      if (config.log_transitions &&
          post.transition_log.size() < max_log) {
        LsirmState after = state;
        after.u.row(jj) = prop;
        log_transition("u", delta, lu, accepted, state, after);
      }
      if (accepted) {
        state.u.row(jj) = prop;
        dist.col(jj) = new_dist;
        ++acc_u;
      }
    }

    // v rows.
    for (int i = 0; i < n; ++i) {
      ++prop_v;
      Eigen::RowVector2d cur = state.v.row(i);
      Eigen::RowVector2d prop = cur;
      prop(0) += config.sd_v * rng.normal();
      prop(1) += config.sd_v * rng.normal();
      double delta = 0.0;
      Vector new_dist(j);
      for (int jj = 0; jj < j; ++jj) {
        double nd = (state.u.row(jj) - prop).norm();
        new_dist(jj) = nd;
        double base = state.theta(jj) + state.beta(i);
        delta += log_normal_pdf(data.y(i, jj), base - nd, state.sigma2) -
                 log_normal_pdf(data.y(i, jj), base - dist(i, jj),
                                state.sigma2);
      }
      delta += log_normal_pdf(prop(0), 0.0, 1.0) +
               log_normal_pdf(prop(1), 0.0, 1.0) -
               log_normal_pdf(cur(0), 0.0, 1.0) -
               log_normal_pdf(cur(1), 0.0, 1.0);
      double lu = std::log(std::max(rng.uniform(), 1e-300));
      bool accepted = lu < delta;
      if (config.log_transitions &&
          post.transition_log.size() < max_log) {
        LsirmState after = state;
        after.v.row(i) = prop;
        log_transition("v", delta, lu, accepted, state, after);
      }
      if (accepted) {
        state.v.row(i) = prop;
        dist.row(i) = new_dist.transpose();
        ++acc_v;
      }
    }

    // Conjugate variance draws; skipped when the whole chain is frozen so a
    // zero-proposal run reproduces its initial state exactly.
    if (!frozen) {
      state.sigma2 = gibbs_sigma2(state, data, config, rng);
      state.sigma_theta2 = gibbs_sigma_theta2(state, config, rng);
    }

    if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0) {
      post.samples.push_back(state);
    }
  }

  post.acceptance_rates["theta"] =
      static_cast<double>(acc_theta) / static_cast<double>(prop_theta);
  post.acceptance_rates["beta"] =
      static_cast<double>(acc_beta) / static_cast<double>(prop_beta);
  post.acceptance_rates["u"] =
      static_cast<double>(acc_u) / static_cast<double>(prop_u);
  post.acceptance_rates["v"] =
      static_cast<double>(acc_v) / static_cast<double>(prop_v);

  // Joint Procrustes alignment of every retained sample to the last one.
  if (!post.samples.empty()) {
    const LsirmState& ref = post.samples.back();
    Matrix ref_stack(j + n, 2);
    ref_stack.topRows(j) = ref.u;
    ref_stack.bottomRows(n) = ref.v;
    for (LsirmState& s : post.samples) {
      Matrix stack(j + n, 2);
      stack.topRows(j) = s.u;
      stack.bottomRows(n) = s.v;
      Matrix q = procrustes_rotation(stack, ref_stack);
      s.u = s.u * q;
      s.v = s.v * q;
    }
  }
  return post;
}

LsirmSummary posterior_summary(const LsirmPosterior& posterior) {
  require(!posterior.samples.empty(), ErrorCode::InvalidArgument,
          "summary: no retained samples");
  const auto& samples = posterior.samples;
  int j = static_cast<int>(samples.front().theta.size());
  int n = static_cast<int>(samples.front().beta.size());
  double count = static_cast<double>(samples.size());

  LsirmSummary s;
  s.theta_mean = Vector::Zero(j);
  s.beta_mean = Vector::Zero(n);
  s.u_mean = Matrix::Zero(j, 2);
  s.v_mean = Matrix::Zero(n, 2);
  s.roi_centrality = Vector::Zero(j);
  s.acceptance_rates = posterior.acceptance_rates;

  for (const LsirmState& st : samples) {
    s.theta_mean += st.theta;
    s.beta_mean += st.beta;
    s.u_mean += st.u;
    s.v_mean += st.v;
    s.sigma2_mean += st.sigma2;
    s.sigma_theta2_mean += st.sigma_theta2;
    Eigen::RowVector2d centroid = st.v.colwise().mean();
    for (int a = 0; a < j; ++a) {
      s.roi_centrality(a) += (st.u.row(a) - centroid).norm();
    }
  }
  s.theta_mean /= count;
  s.beta_mean /= count;
  s.u_mean /= count;
  s.v_mean /= count;
  s.sigma2_mean /= count;
  s.sigma_theta2_mean /= count;
  s.roi_centrality /= count;

  s.theta_sd = Vector::Zero(j);
  for (const LsirmState& st : samples) {
    s.theta_sd += (st.theta - s.theta_mean).cwiseAbs2();
  }
  if (samples.size() > 1) {
    s.theta_sd = (s.theta_sd / (count - 1.0)).cwiseSqrt();
  } else {
    s.theta_sd.setZero();
  }
  return s;
}

std::string roi_category_name(RoiCategory c) {
  switch (c) {
    case RoiCategory::ONLY_A: return "only_a";
    case RoiCategory::ONLY_B: return "only_b";
    case RoiCategory::BOTH: return "both";
    case RoiCategory::STRONGER_A: return "stronger_a";
    case RoiCategory::STRONGER_B: return "stronger_b";
  }
  fail(ErrorCode::InvalidArgument, "unknown roi category");
}

std::map<int, RoiCategory> significant_rois(const LsirmSummary& summary_a,
                                            const LsirmSummary& summary_b,
                                            const std::vector<int>& selected_a,
                                            const std::vector<int>& selected_b) {
  std::map<int, int> pos_a, pos_b;
  for (std::size_t p = 0; p < selected_a.size(); ++p) {
    pos_a[selected_a[p]] = static_cast<int>(p);
  }
  for (std::size_t p = 0; p < selected_b.size(); ++p) {
    pos_b[selected_b[p]] = static_cast<int>(p);
  }
  require(summary_a.theta_mean.size() ==
              static_cast<Eigen::Index>(selected_a.size()),
          ErrorCode::DimensionMismatch,
          "significant_rois: summary A does not match selected set A");
  require(summary_b.theta_mean.size() ==
              static_cast<Eigen::Index>(selected_b.size()),
          ErrorCode::DimensionMismatch,
          "significant_rois: summary B does not match selected set B");

  std::map<int, RoiCategory> out;
  for (const auto& [roi, pa] : pos_a) {
    auto itb = pos_b.find(roi);
    if (itb == pos_b.end()) {
      out[roi] = RoiCategory::ONLY_A;
      continue;
    }
    int pb = itb->second;
    double ta = summary_a.theta_mean(pa);
    double tb = summary_b.theta_mean(pb);
    double sa = summary_a.theta_sd(pa);
    double sb = summary_b.theta_sd(pb);
    double delta = std::sqrt(0.5 * (sa * sa + sb * sb));
    if (std::abs(ta - tb) <= delta) {
      out[roi] = RoiCategory::BOTH;
    } else {
      out[roi] = ta > tb ? RoiCategory::STRONGER_A : RoiCategory::STRONGER_B;
    }
  }
  for (const auto& [roi, pb] : pos_b) {
    if (pos_a.find(roi) == pos_a.end()) {
      out[roi] = RoiCategory::ONLY_B;
    }
  }
  return out;
}

}  // namespace fcnet
