#include "fcnet/attention.hpp"

namespace fcnet {

void validate_config(const ModelConfig& config) {
  require(config.n_heads >= 1, ErrorCode::Config, "n_heads must be >= 1");
  require(config.d_model >= 1, ErrorCode::Config, "d_model must be >= 1");
  require(config.d_head >= 1, ErrorCode::Config, "d_head must be >= 1");
  require(config.learning_rate > 0.0, ErrorCode::Config,
          "learning_rate must be > 0");
  require(config.batch_size >= 1, ErrorCode::Config, "batch_size must be >= 1");
  require(config.folds >= 2, ErrorCode::Config, "folds must be >= 2");
  require(config.epochs >= 1, ErrorCode::Config, "epochs must be >= 1");
}

static Matrix init_block(int rows, int cols, int fan_in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(-bound, bound);
    }
  }
  return m;
}

ModelParams init_params(const ModelConfig& config, int r, Rng& rng) {
  validate_config(config);
  require(r >= 1, ErrorCode::InvalidArgument, "init: r must be >= 1");
  int hd = config.n_heads * config.d_head;
  ModelParams p;
  p.w_in = init_block(config.d_model, r, r, rng);
  p.b_in = Vector::Zero(config.d_model);
  p.w_q = init_block(hd, config.d_model, config.d_model, rng);
  p.w_k = init_block(hd, config.d_model, config.d_model, rng);
  p.w_v = init_block(hd, config.d_model, config.d_model, rng);
  p.w_o = init_block(config.d_model, hd, hd, rng);
  p.b_o = Vector::Zero(config.d_model);
  p.w_c = init_block(2, config.d_model, config.d_model, rng);
  p.b_c = Vector::Zero(2);
  return p;
}

ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  z.for_each_block([](auto& block) { block.setZero(); });
  return z;
}

Matrix encode_input(const ModelParams& params, const Matrix& adj) {
  require(adj.rows() == adj.cols(), ErrorCode::DimensionMismatch,
          "encode: adjacency must be square");
  require(adj.cols() == params.w_in.cols(), ErrorCode::DimensionMismatch,
          "encode: adjacency width != W_in input width");
  return (adj * params.w_in.transpose()).rowwise() +
         params.b_in.transpose();
}

// Row softmax with max-subtraction; rows sum to 1 exactly up to rounding.
static void row_softmax_inplace(Matrix& scores) {
  for (int i = 0; i < scores.rows(); ++i) {
    double mx = scores.row(i).maxCoeff();
    scores.row(i) = (scores.row(i).array() - mx).exp().matrix();
    scores.row(i) /= scores.row(i).sum();
  }
}

Forward attention_forward(const ModelParams& params, const ModelConfig& config,
                          const Matrix& adj) {
  int r = static_cast<int>(adj.rows());
  Forward f;
  f.tokens = encode_input(params, adj);
  f.q = f.tokens * params.w_q.transpose();
  f.k = f.tokens * params.w_k.transpose();
  f.v = f.tokens * params.w_v.transpose();
  f.attn.resize(static_cast<std::size_t>(config.n_heads));
  f.concat.resize(r, config.n_heads * config.d_head);
  f.attn_mean = Matrix::Zero(r, r);
  for (int h = 0; h < config.n_heads; ++h) {
    int off = h * config.d_head;
    Matrix scores = f.q.middleCols(off, config.d_head) *
                    f.k.middleCols(off, config.d_head).transpose();
    require(scores.allFinite(), ErrorCode::NumericOverflow,
            "attention scores are non-finite");
    row_softmax_inplace(scores);
    f.concat.middleCols(off, config.d_head) =
        scores * f.v.middleCols(off, config.d_head);
    f.attn_mean += scores;
    f.attn[static_cast<std::size_t>(h)] = std::move(scores);
  }
  f.attn_mean /= static_cast<double>(config.n_heads);
  f.mixed = (f.concat * params.w_o.transpose()).rowwise() +
            params.b_o.transpose();
  f.pooled = f.mixed.colwise().mean().transpose();
  f.logits = params.w_c * f.pooled + params.b_c;
  require(f.logits.allFinite(), ErrorCode::NumericOverflow,
          "logits are non-finite");
  return f;
}

double cross_entropy(const Vector& logits, int label) {
  require(label == 0 || label == 1, ErrorCode::InvalidArgument,
          "label must be 0 or 1");
  double mx = logits.maxCoeff();
  double lse = mx + std::log((logits.array() - mx).exp().sum());
  return lse - logits(label);
}

LossGrads loss_and_grads(const ModelParams& params, const ModelConfig& config,
                         const std::vector<TrainExample>& batch) {
  require(!batch.empty(), ErrorCode::InvalidArgument, "empty batch");
  LossGrads out;
  out.grads = zeros_like(params);
  double inv_b = 1.0 / static_cast<double>(batch.size());

  for (const TrainExample& ex : batch) {
    Forward f = attention_forward(params, config, ex.adj);
    out.loss += cross_entropy(f.logits, ex.label) * inv_b;

    int r = static_cast<int>(ex.adj.rows());
    int dh = config.d_head;

    // d loss / d logits for mean cross-entropy.
    double mx = f.logits.maxCoeff();
    Vector soft = (f.logits.array() - mx).exp().matrix();
    soft /= soft.sum();
    Vector dlogits = soft * inv_b;
    dlogits(ex.label) -= inv_b;

    out.grads.w_c += dlogits * f.pooled.transpose();
    out.grads.b_c += dlogits;
    Vector dpooled = params.w_c.transpose() * dlogits;

    // Mean-pool spreads the gradient evenly over tokens.
    Matrix dmixed = (1.0 / r) * Vector::Ones(r) * dpooled.transpose();

    out.grads.w_o += dmixed.transpose() * f.concat;
    out.grads.b_o += dmixed.colwise().sum().transpose();
    Matrix dconcat = dmixed * params.w_o;

    Matrix dq = Matrix::Zero(r, config.n_heads * dh);
    Matrix dk = Matrix::Zero(r, config.n_heads * dh);
    Matrix dv = Matrix::Zero(r, config.n_heads * dh);
    for (int h = 0; h < config.n_heads; ++h) {
      int off = h * dh;
      const Matrix& a = f.attn[static_cast<std::size_t>(h)];
      Matrix dy = dconcat.middleCols(off, dh);
      Matrix da = dy * f.v.middleCols(off, dh).transpose();
      dv.middleCols(off, dh) = a.transpose() * dy;
      // Softmax rows: ds = a .* (da - rowsum(da .* a)).
      Vector rowdot = da.cwiseProduct(a).rowwise().sum();
      Matrix centered = da;
      centered.colwise() -= rowdot;
      Matrix ds = a.cwiseProduct(centered);
      dq.middleCols(off, dh) = ds * f.k.middleCols(off, dh);
      dk.middleCols(off, dh) = ds.transpose() * f.q.middleCols(off, dh);
    }
    out.grads.w_q += dq.transpose() * f.tokens;
    out.grads.w_k += dk.transpose() * f.tokens;
    out.grads.w_v += dv.transpose() * f.tokens;

    Matrix dtokens =
        dq * params.w_q + dk * params.w_k + dv * params.w_v;
    out.grads.w_in += dtokens.transpose() * ex.adj;
    out.grads.b_in += dtokens.colwise().sum().transpose();
  }
  return out;
}

AttentionDistribution extract_attention(const ModelParams& params,
                                        const ModelConfig& config,
                                        const Matrix& adj,
                                        const std::string& subject_id,
                                        Group group) {
  Forward f = attention_forward(params, config, adj);
  return AttentionDistribution{std::move(f.attn_mean), subject_id, group};
}

}  // namespace fcnet
