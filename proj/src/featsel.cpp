#include "fcnet/featsel.hpp"

#include <algorithm>
#include <iostream>

namespace fcnet {

GroupAttention group_mean_attention(
    const std::vector<AttentionDistribution>& subjects) {
  require(!subjects.empty(), ErrorCode::InvalidArgument,
          "group attention: empty subject list");
  Group g = subjects.front().group;
  int r = static_cast<int>(subjects.front().values.rows());
  Matrix mean = Matrix::Zero(r, r);
  for (const auto& s : subjects) {
    require(s.group == g, ErrorCode::InvalidArgument,
            "group attention: mixed groups in subject list");
    require(s.values.rows() == r && s.values.cols() == r,
            ErrorCode::DimensionMismatch,
            "group attention: inconsistent matrix sizes");
    mean += s.values;
  }
  mean /= static_cast<double>(subjects.size());
  return GroupAttention{g, std::move(mean), static_cast<int>(subjects.size())};
}

double kld(const Vector& p, const Vector& q, double epsilon) {
  require(p.size() == q.size(), ErrorCode::DimensionMismatch,
          "kld: length mismatch");
  require(p.size() > 0, ErrorCode::InvalidArgument, "kld: empty vectors");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "kld: epsilon must be > 0");
  require(p.minCoeff() >= 0.0 && q.minCoeff() >= 0.0,
          ErrorCode::InvalidArgument, "kld: negative entries");
  require(std::abs(p.sum() - 1.0) <= 1e-6 && std::abs(q.sum() - 1.0) <= 1e-6,
          ErrorCode::InvalidArgument, "kld: inputs must sum to 1 within 1e-6");
  double n = static_cast<double>(p.size());
  double ps = p.sum() + n * epsilon;
  double qs = q.sum() + n * epsilon;
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    double pi = (p(i) + epsilon) / ps;
    double qi = (q(i) + epsilon) / qs;
    acc += pi * std::log(pi / qi);
  }
  return std::max(acc, 0.0);
}

KldRanking rank_rois_kld(const GroupAttention& ga, const GroupAttention& gb,
                         bool symmetric, double epsilon) {
  int r = static_cast<int>(ga.mean_attn.rows());
  require(gb.mean_attn.rows() == r, ErrorCode::DimensionMismatch,
          "kld ranking: group sizes differ");
  KldRanking ranking;
  ranking.entries.reserve(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    Vector rowa = ga.mean_attn.row(i).transpose();
    Vector rowb = gb.mean_attn.row(i).transpose();
    double score = kld(rowa, rowb, epsilon);
    if (symmetric) score += kld(rowb, rowa, epsilon);
    ranking.entries.push_back({i + 1, score});
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  return ranking;
}

double coefficient_variation(const std::vector<double>& x) {
  require(!x.empty(), ErrorCode::InvalidArgument, "cv: empty vector");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  require(mean != 0.0, ErrorCode::InvalidArgument, "cv: zero mean");
  return sample_sd(x) / mean;
}

namespace {

// CV-descending order of the top-quartile-by-mean columns of one group.
std::vector<int> select_for_group(
    const GroupAttention& group_attn,
    const std::vector<AttentionDistribution>& subjects, int k) {
  int r = static_cast<int>(group_attn.mean_attn.rows());
  int quartile = (r + 3) / 4;

  std::vector<int> by_mean(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) by_mean[static_cast<std::size_t>(i)] = i;
  Vector col_mean = group_attn.mean_attn.colwise().mean().transpose();
  std::stable_sort(by_mean.begin(), by_mean.end(), [&](int a, int b) {
    if (col_mean(a) != col_mean(b)) return col_mean(a) > col_mean(b);
    return a < b;
  });
  by_mean.resize(static_cast<std::size_t>(quartile));

  // Dispersion of each candidate column's per-subject means.
  std::vector<double> cv(static_cast<std::size_t>(r), 0.0);
  for (int c : by_mean) {
    std::vector<double> means;
    means.reserve(subjects.size());
    for (const auto& s : subjects) {
      means.push_back(s.values.col(c).mean());
    }
    cv[static_cast<std::size_t>(c)] = coefficient_variation(means);
  }
  std::stable_sort(by_mean.begin(), by_mean.end(), [&](int a, int b) {
    double da = cv[static_cast<std::size_t>(a)];
    double db = cv[static_cast<std::size_t>(b)];
    if (da != db) return da > db;
    return a < b;
  });

  if (k > static_cast<int>(by_mean.size())) {
    std::cerr << "select_rois: k=" << k << " exceeds candidate count "
              << by_mean.size() << "; reducing\n";
    k = static_cast<int>(by_mean.size());
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    out.push_back(by_mean[static_cast<std::size_t>(i)] + 1);
  }
  return out;
}

}  // namespace

SelectedRoiSet select_rois(const GroupAttention& ga, const GroupAttention& gb,
                           const std::vector<AttentionDistribution>& subjects_a,
                           const std::vector<AttentionDistribution>& subjects_b,
                           int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "select_rois: k must be >= 1");
  require(ga.mean_attn.rows() == gb.mean_attn.rows(),
          ErrorCode::DimensionMismatch, "select_rois: group sizes differ");
  require(static_cast<int>(subjects_a.size()) == ga.n_subjects &&
              static_cast<int>(subjects_b.size()) == gb.n_subjects,
          ErrorCode::InvalidArgument,
          "select_rois: subject lists do not match group aggregates");
  SelectedRoiSet out;
  out.group_a = ga.group;
  out.group_b = gb.group;
  out.rois_a = select_for_group(ga, subjects_a, k);
  out.rois_b = select_for_group(gb, subjects_b, k);
  out.k = static_cast<int>(std::min(out.rois_a.size(), out.rois_b.size()));
  return out;
}

PatientRoiMatrix build_patient_roi_matrix(
    const std::vector<AttentionDistribution>& subjects,
    const std::vector<int>& selected_rois, Group group) {
  require(!subjects.empty(), ErrorCode::InvalidArgument,
          "patient matrix: no subjects");
  require(!selected_rois.empty(), ErrorCode::InvalidArgument,
          "patient matrix: no selected rois");
  int r = static_cast<int>(subjects.front().values.rows());
  PatientRoiMatrix m;
  m.group = group;
  m.roi_indices = selected_rois;
  m.values.resize(static_cast<Eigen::Index>(subjects.size()),
                  static_cast<Eigen::Index>(selected_rois.size()));
  for (std::size_t n = 0; n < subjects.size(); ++n) {
    require(subjects[n].group == group, ErrorCode::InvalidArgument,
            "patient matrix: subject group mismatch");
    m.subject_ids.push_back(subjects[n].subject_id);
    for (std::size_t c = 0; c < selected_rois.size(); ++c) {
      int roi = selected_rois[c];
      require(roi >= 1 && roi <= r, ErrorCode::InvalidArgument,
              "patient matrix: roi index out of range");
      m.values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c)) =
          subjects[n].values.col(roi - 1).mean();
    }
  }
  return m;
}

}  // namespace fcnet
