#pragma once

#include <map>
#include <string>
#include <vector>

#include "fcnet/common.hpp"

namespace fcnet {

struct LsirmData {
  Matrix y;  // N patients x J rois
  int n() const { return static_cast<int>(y.rows()); }
  int j() const { return static_cast<int>(y.cols()); }
};

struct LsirmState {
  Vector theta;  // J roi effects
  Vector beta;   // N patient effects
  Matrix u;      // J x 2 roi positions
  Matrix v;      // N x 2 patient positions
  double sigma2 = 1.0;
  double sigma_theta2 = 1.0;
};

struct SamplerConfig {
  int n_iter = 55000;
  int burn_in = 5000;
  int thin = 10;
  double sd_theta = 0.1;
  double sd_beta = 0.1;
  double sd_u = 0.1;
  double sd_v = 0.1;
  double tau2_beta = 1.0;
  double a = 1.0, b = 1.0;              // sigma2 ~ InvGamma(a, b)
  double a_sigma = 1.0, b_sigma = 1.0;  // sigma_theta2 ~ InvGamma(a_sigma, b_sigma)
  std::uint64_t seed = 0;
  // When true, the first transitions of each sweep are logged with full
  // before/after log-posteriors for audit.
  bool log_transitions = false;
};

void validate_sampler_config(const SamplerConfig& config);

double log_likelihood(const LsirmState& state, const LsirmData& data);
double log_posterior(const LsirmState& state, const LsirmData& data,
                     const SamplerConfig& config);

struct TransitionRecord {
  std::string block;
  double lp_before = 0.0;   // full log-posterior before the proposal
  double lp_after = 0.0;    // full log-posterior of the proposed state
  double delta = 0.0;       // incremental delta used by the sampler
  double log_uniform = 0.0; // log of the acceptance draw
  bool accepted = false;
};

struct LsirmPosterior {
  std::vector<LsirmState> samples;  // retained, Procrustes-aligned
  std::map<std::string, double> acceptance_rates;  // theta/beta/u/v
  LsirmState initial_state;
  SamplerConfig config;
  std::vector<TransitionRecord> transition_log;
};

LsirmPosterior mcmc_run(const LsirmData& data, const SamplerConfig& config);

// One conjugate draw from the variance's full conditional given the rest of
// the state. These are the draws mcmc_run performs at the end of each sweep.
double gibbs_sigma2(const LsirmState& state, const LsirmData& data,
                    const SamplerConfig& config, Rng& rng);
double gibbs_sigma_theta2(const LsirmState& state, const SamplerConfig& config,
                          Rng& rng);

// Orthogonal (rotation or reflection, no translation) alignment of the
// stacked rows of (U, V) onto the reference stack; returns the 2x2 transform.
Matrix procrustes_rotation(const Matrix& source, const Matrix& reference);

struct LsirmSummary {
  Vector theta_mean, theta_sd;
  Vector beta_mean;
  Matrix u_mean;  // J x 2
  Matrix v_mean;  // N x 2
  double sigma2_mean = 0.0;
  double sigma_theta2_mean = 0.0;
  // Mean over samples of distance from u_j to that sample's patient centroid.
  Vector roi_centrality;
  std::map<std::string, double> acceptance_rates;
};

LsirmSummary posterior_summary(const LsirmPosterior& posterior);

enum class RoiCategory { ONLY_A, ONLY_B, BOTH, STRONGER_A, STRONGER_B };

std::string roi_category_name(RoiCategory c);

// Categorize each ROI in the union of the two selected sets. ROI keys are
// the original 1-based atlas indices carried by the selected lists.
std::map<int, RoiCategory> significant_rois(const LsirmSummary& summary_a,
                                            const LsirmSummary& summary_b,
                                            const std::vector<int>& selected_a,
                                            const std::vector<int>& selected_b);

}  // namespace fcnet
