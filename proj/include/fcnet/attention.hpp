#pragma once

#include <string>
#include <vector>

#include "fcnet/atlas.hpp"
#include "fcnet/common.hpp"

namespace fcnet {

struct ModelConfig {
  int n_heads = 128;
  int d_model = 64;
  int d_head = 8;
  double learning_rate = 0.01;
  int batch_size = 8;
  int folds = 10;
  int epochs = 50;
  std::uint64_t seed = 0;
};

void validate_config(const ModelConfig& config);

// Heads are stored stacked: row block h*d_head..(h+1)*d_head of w_q/w_k/w_v
// is head h's projection.
struct ModelParams {
  Matrix w_in;  // d_model x R
  Vector b_in;  // d_model
  Matrix w_q;   // (n_heads*d_head) x d_model
  Matrix w_k;   // (n_heads*d_head) x d_model
  Matrix w_v;   // (n_heads*d_head) x d_model
  Matrix w_o;   // d_model x (n_heads*d_head)
  Vector b_o;   // d_model
  Matrix w_c;   // 2 x d_model
  Vector b_c;   // 2

  // Visits every block in a fixed order; f(Matrix&) must also accept
  // Vector& (Eigen vectors are matrices).
  template <typename F>
  void for_each_block(F&& f) {
    f(w_in);
    f(b_in);
    f(w_q);
    f(w_k);
    f(w_v);
    f(w_o);
    f(b_o);
    f(w_c);
    f(b_c);
  }
};

ModelParams init_params(const ModelConfig& config, int r, Rng& rng);
ModelParams zeros_like(const ModelParams& p);

struct TrainExample {
  Matrix adj;  // R x R
  int label = 0;
};

Matrix encode_input(const ModelParams& params, const Matrix& adj);

struct Forward {
  Matrix tokens;              // R x d_model
  Matrix q, k, v;             // R x (n_heads*d_head)
  std::vector<Matrix> attn;   // per head, R x R row-stochastic
  Matrix concat;              // R x (n_heads*d_head)
  Matrix mixed;               // R x d_model
  Vector pooled;              // d_model
  Vector logits;              // 2
  Matrix attn_mean;           // R x R
};

Forward attention_forward(const ModelParams& params, const ModelConfig& config,
                          const Matrix& adj);

double cross_entropy(const Vector& logits, int label);

struct LossGrads {
  double loss = 0.0;
  ModelParams grads;
};

LossGrads loss_and_grads(const ModelParams& params, const ModelConfig& config,
                         const std::vector<TrainExample>& batch);

struct AttentionDistribution {
  Matrix values;  // R x R row-stochastic
  std::string subject_id;
  Group group = Group::SYNTH_A;
};

AttentionDistribution extract_attention(const ModelParams& params,
                                        const ModelConfig& config,
                                        const Matrix& adj,
                                        const std::string& subject_id,
                                        Group group);

struct SubjectGraphInput {
  Matrix adj;
  std::string subject_id;
  Group group = Group::SYNTH_A;
};

struct CvReport {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  // Positive class = second group of the pair.
  long true_positive = 0, true_negative = 0;
  long false_positive = 0, false_negative = 0;
  ModelConfig config;
  Group group_a = Group::SYNTH_A, group_b = Group::SYNTH_B;
};

std::string cv_report_to_json(const CvReport& report);

struct CvResult {
  CvReport report;
  std::vector<ModelParams> fold_params;
  // For each dataset index, the fold in which it was held out.
  std::vector<int> fold_of_subject;
};

CvResult train_cv(const std::vector<SubjectGraphInput>& dataset,
                  Group group_a, Group group_b, const ModelConfig& config);

ModelParams adam_train(const ModelParams& init,
                       const ModelConfig& config,
                       const std::vector<TrainExample>& train_set, Rng& rng);

}  // namespace fcnet
