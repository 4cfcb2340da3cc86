#pragma once

#include <string>
#include <vector>

#include "fcnet/attention.hpp"
#include "fcnet/common.hpp"

namespace fcnet {

struct GroupAttention {
  Group group = Group::SYNTH_A;
  Matrix mean_attn;  // R x R row-stochastic
  int n_subjects = 0;
};

GroupAttention group_mean_attention(
    const std::vector<AttentionDistribution>& subjects);

// KL(p~ || q~) in nats after (x+eps)/sum(x+eps) smoothing.
double kld(const Vector& p, const Vector& q, double epsilon = 1e-10);

struct KldRanking {
  // (1-based roi index, score), sorted non-increasing, ties by index.
  std::vector<std::pair<int, double>> entries;
};

KldRanking rank_rois_kld(const GroupAttention& ga, const GroupAttention& gb,
                         bool symmetric = true, double epsilon = 1e-10);

double coefficient_variation(const std::vector<double>& x);

struct SelectedRoiSet {
  Group group_a = Group::SYNTH_A, group_b = Group::SYNTH_B;
  std::vector<int> rois_a;  // 1-based, CV-descending order
  std::vector<int> rois_b;
  int k = 29;
};

// Top-quartile columns by group mean-attention column mean, then ordered by
// the coefficient of variation of per-subject column means, descending.
SelectedRoiSet select_rois(const GroupAttention& ga, const GroupAttention& gb,
                           const std::vector<AttentionDistribution>& subjects_a,
                           const std::vector<AttentionDistribution>& subjects_b,
                           int k = 29);

struct PatientRoiMatrix {
  Matrix values;  // N_p x k, entries in [0,1]
  std::vector<std::string> subject_ids;
  std::vector<int> roi_indices;  // 1-based
  Group group = Group::SYNTH_A;
};

PatientRoiMatrix build_patient_roi_matrix(
    const std::vector<AttentionDistribution>& subjects,
    const std::vector<int>& selected_rois, Group group);

}  // namespace fcnet
