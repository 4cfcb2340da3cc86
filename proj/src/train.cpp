#include <algorithm>

#include <nlohmann/json.hpp>

#include "fcnet/attention.hpp"

namespace fcnet {

namespace {

struct AdamState {
  ModelParams m, v;
  long t = 0;
};

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               double lr) {
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++state.t;
  double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));

  auto update = [&](Matrix& p, const Matrix& g, Matrix& m, Matrix& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p -= (lr * (m / c1).array() / ((v / c2).array().sqrt() + eps)).matrix();
  };
  update(params.w_in, grads.w_in, state.m.w_in, state.v.w_in);
  update(params.w_q, grads.w_q, state.m.w_q, state.v.w_q);
  update(params.w_k, grads.w_k, state.m.w_k, state.v.w_k);
  update(params.w_v, grads.w_v, state.m.w_v, state.v.w_v);
  update(params.w_o, grads.w_o, state.m.w_o, state.v.w_o);
  update(params.w_c, grads.w_c, state.m.w_c, state.v.w_c);

  auto update_vec = [&](Vector& p, const Vector& g, Vector& m, Vector& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p -= (lr * (m / c1).array() / ((v / c2).array().sqrt() + eps)).matrix();
  };
  update_vec(params.b_in, grads.b_in, state.m.b_in, state.v.b_in);
  update_vec(params.b_o, grads.b_o, state.m.b_o, state.v.b_o);
  update_vec(params.b_c, grads.b_c, state.m.b_c, state.v.b_c);
}

}  // namespace

ModelParams adam_train(const ModelParams& init, const ModelConfig& config,
                       const std::vector<TrainExample>& train_set, Rng& rng) {
  require(!train_set.empty(), ErrorCode::InvalidArgument, "empty train set");
  ModelParams params = init;
  AdamState state{zeros_like(init), zeros_like(init), 0};

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<TrainExample> batch;
      batch.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(train_set[order[k]]);
      }
      LossGrads lg = loss_and_grads(params, config, batch);
      adam_step(params, lg.grads, state, config.learning_rate);
    }
  }
  return params;
}

CvResult train_cv(const std::vector<SubjectGraphInput>& dataset, Group group_a,
                  Group group_b, const ModelConfig& config) {
  validate_config(config);
  require(group_a != group_b, ErrorCode::InvalidArgument,
          "group pair must be distinct");
  std::vector<std::size_t> idx_a, idx_b;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    Group g = dataset[i].group;
    if (g == group_a) {
      idx_a.push_back(i);
    } else if (g == group_b) {
      idx_b.push_back(i);
    } else {
      fail(ErrorCode::InvalidArgument,
           "dataset contains group " + group_name(g) +
               " which is not in the trained pair");
    }
  }
  require(static_cast<int>(idx_a.size()) >= config.folds &&
              static_cast<int>(idx_b.size()) >= config.folds,
          ErrorCode::InvalidArgument,
          "each group needs at least one subject per fold");

  Rng rng(config.seed);
  // Stratified fold assignment: shuffle within each group, deal round-robin.
  std::vector<int> fold_of(dataset.size(), -1);
  Rng shuffle_rng = rng.fork(1);
  shuffle_rng.shuffle(idx_a);
  shuffle_rng.shuffle(idx_b);
  for (std::size_t k = 0; k < idx_a.size(); ++k) {
    fold_of[idx_a[k]] = static_cast<int>(k % static_cast<std::size_t>(config.folds));
  }
  for (std::size_t k = 0; k < idx_b.size(); ++k) {
    fold_of[idx_b[k]] = static_cast<int>(k % static_cast<std::size_t>(config.folds));
  }

  int r = static_cast<int>(dataset.front().adj.rows());
  CvResult result;
  result.fold_of_subject = fold_of;
  result.report.config = config;
  result.report.group_a = group_a;
  result.report.group_b = group_b;

  for (int fold = 0; fold < config.folds; ++fold) {
    std::vector<TrainExample> train_set;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      int label = dataset[i].group == group_b ? 1 : 0;
      if (fold_of[i] == fold) {
        test_idx.push_back(i);
      } else {
        train_set.push_back(TrainExample{dataset[i].adj, label});
      }
    }
    Rng fold_rng = rng.fork(100 + static_cast<std::uint64_t>(fold));
    ModelParams params = init_params(config, r, fold_rng);
    params = adam_train(params, config, train_set, fold_rng);

    long correct = 0;
    for (std::size_t i : test_idx) {
      Forward f = attention_forward(params, config, dataset[i].adj);
      int pred = f.logits(1) > f.logits(0) ? 1 : 0;
      int label = dataset[i].group == group_b ? 1 : 0;
      if (pred == label) ++correct;
      if (label == 1 && pred == 1) ++result.report.true_positive;
      if (label == 0 && pred == 0) ++result.report.true_negative;
      if (label == 0 && pred == 1) ++result.report.false_positive;
      if (label == 1 && pred == 0) ++result.report.false_negative;
    }
    result.report.fold_accuracy.push_back(
        static_cast<double>(correct) / static_cast<double>(test_idx.size()));
    result.fold_params.push_back(std::move(params));
  }
  double sum = 0.0;
  for (double a : result.report.fold_accuracy) sum += a;
  result.report.mean_accuracy =
      sum / static_cast<double>(result.report.fold_accuracy.size());
  return result;
}

std::string cv_report_to_json(const CvReport& report) {
  nlohmann::json j;
  j["group_a"] = group_name(report.group_a);
  j["group_b"] = group_name(report.group_b);
  j["fold_accuracy"] = report.fold_accuracy;
  j["mean_accuracy"] = report.mean_accuracy;
  j["confusion"] = {{"tp", report.true_positive},
                    {"tn", report.true_negative},
                    {"fp", report.false_positive},
                    {"fn", report.false_negative}};
  j["config"] = {{"n_heads", report.config.n_heads},
                 {"d_model", report.config.d_model},
                 {"d_head", report.config.d_head},
                 {"learning_rate", report.config.learning_rate},
                 {"batch_size", report.config.batch_size},
                 {"folds", report.config.folds},
                 {"epochs", report.config.epochs},
                 {"seed", report.config.seed}};
  return j.dump(2) + "\n";
}

}  // namespace fcnet
