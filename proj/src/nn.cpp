#include "mtl/nn.hpp"

#include <cmath>

namespace mtl {

namespace {

Tensor init_weight(int rows, int cols, double bound, std::uint64_t seed,
                   const std::string& path) {
  Tensor t = Tensor::zeros({rows, cols}, true);
  RngStream rng(seed_for(seed, path));
  fill_uniform(t, -bound, bound, rng);
  return t;
}

}  // namespace

LstmParams make_lstm(int input_dim, int hidden_dim, std::uint64_t seed,
                     const std::string& path) {
  if (hidden_dim <= 0 || input_dim <= 0)
    throw ConfigError("make_lstm: dims must be positive");
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const int cols = input_dim + hidden_dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  p.w_i = init_weight(hidden_dim, cols, bound, seed, path + ".w_i");
  p.w_f = init_weight(hidden_dim, cols, bound, seed, path + ".w_f");
  p.w_o = init_weight(hidden_dim, cols, bound, seed, path + ".w_o");
  p.w_g = init_weight(hidden_dim, cols, bound, seed, path + ".w_g");
  p.b_i = Tensor::zeros({hidden_dim}, true);
  p.b_f = Tensor::filled({hidden_dim}, 1.0, true);  // forget-gate stabilizer
  p.b_o = Tensor::zeros({hidden_dim}, true);
  p.b_g = Tensor::zeros({hidden_dim}, true);
  return p;
}

BiLstm make_bilstm(int input_dim, int hidden_dim, std::uint64_t seed,
                   const std::string& path) {
  BiLstm b;
  b.fwd = make_lstm(input_dim, hidden_dim, seed, path + ".fwd");
  b.bwd = make_lstm(input_dim, hidden_dim, seed, path + ".bwd");
  return b;
}

EmbeddingTable make_embedding(int vocab_size, int dim, std::uint64_t seed,
                              const std::string& path, bool trainable) {
  if (vocab_size < 1 || dim < 1)
    throw ConfigError("make_embedding: vocab_size and dim must be positive");
  EmbeddingTable t;
  t.vocab_size = vocab_size;
  t.dim = dim;
  t.trainable = trainable;
  t.weights = Tensor::zeros({vocab_size, dim}, trainable);
  RngStream rng(seed_for(seed, path + ".weights"));
  auto& v = t.weights.values();
  // row 0 (padding) stays zero
  for (int r = 1; r < vocab_size; ++r)
    for (int c = 0; c < dim; ++c)
      v[static_cast<std::size_t>(r) * dim + c] = rng.normal();
  return t;
}

MlpParams make_mlp(const std::vector<int>& dims,
                   const std::vector<Activation>& activations,
                   std::uint64_t seed, const std::string& path) {
  if (dims.size() < 2) throw ConfigError("make_mlp: need at least two dims");
  if (activations.size() != dims.size() - 1)
    throw ConfigError("make_mlp: one activation per layer");
  MlpParams p;
  p.dims = dims;
  p.activations = activations;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    p.weights.push_back(init_weight(dims[l + 1], dims[l], bound, seed,
                                    path + ".w" + std::to_string(l)));
    p.biases.push_back(Tensor::zeros({dims[l + 1]}, true));
  }
  return p;
}

void collect_params(const std::string& prefix, const LstmParams& p,
                    NamedParams& out) {
  out.emplace_back(prefix + ".w_i", p.w_i);
  out.emplace_back(prefix + ".w_f", p.w_f);
  out.emplace_back(prefix + ".w_o", p.w_o);
  out.emplace_back(prefix + ".w_g", p.w_g);
  out.emplace_back(prefix + ".b_i", p.b_i);
  out.emplace_back(prefix + ".b_f", p.b_f);
  out.emplace_back(prefix + ".b_o", p.b_o);
  out.emplace_back(prefix + ".b_g", p.b_g);
}

void collect_params(const std::string& prefix, const BiLstm& p,
                    NamedParams& out) {
  collect_params(prefix + ".fwd", p.fwd, out);
  collect_params(prefix + ".bwd", p.bwd, out);
}

void collect_params(const std::string& prefix, const EmbeddingTable& t,
                    NamedParams& out) {
  if (t.trainable) out.emplace_back(prefix + ".weights", t.weights);
}

void collect_params(const std::string& prefix, const MlpParams& p,
                    NamedParams& out) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    out.emplace_back(prefix + ".w" + std::to_string(l), p.weights[l]);
    out.emplace_back(prefix + ".b" + std::to_string(l), p.biases[l]);
  }
}

std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x, const Tensor& h,
                                         const Tensor& c,
                                         const LstmParams& params) {
  if (x.rank() != 1 || x.dim(0) != params.input_dim)
    throw DimensionError("lstm_cell_step: input dim mismatch");
  if (h.dim(0) != params.hidden_dim || c.dim(0) != params.hidden_dim)
    throw DimensionError("lstm_cell_step: state dim mismatch");
  Tensor xh = concat({x, h});
  Tensor i = sigmoid(affine(params.w_i, xh, params.b_i));
  Tensor f = sigmoid(affine(params.w_f, xh, params.b_f));
  Tensor o = sigmoid(affine(params.w_o, xh, params.b_o));
  Tensor g = tanh(affine(params.w_g, xh, params.b_g));
  Tensor c_next = add(mul(f, c), mul(i, g));
  Tensor h_next = mul(o, tanh(c_next));
  return {h_next, c_next};
}

std::vector<Tensor> bilstm_forward(const std::vector<Tensor>& seq,
                                   const LstmParams& fwd,
                                   const LstmParams& bwd, int length) {
  if (seq.empty()) throw ContractError("bilstm_forward: empty sequence");
  if (length < 1 || static_cast<std::size_t>(length) > seq.size())
    throw ContractError("bilstm_forward: length out of range");
  if (fwd.hidden_dim != bwd.hidden_dim)
    throw DimensionError("bilstm_forward: direction hidden dims disagree");
  const int hid = fwd.hidden_dim;

  std::vector<Tensor> fwd_h(static_cast<std::size_t>(length));
  {
    Tensor h = Tensor::zeros({hid});
    Tensor c = Tensor::zeros({hid});
    for (int t = 0; t < length; ++t) {
      auto [h2, c2] = lstm_cell_step(seq[static_cast<std::size_t>(t)], h, c, fwd);
      h = h2;
      c = c2;
      fwd_h[static_cast<std::size_t>(t)] = h;
    }
  }
  std::vector<Tensor> bwd_h(static_cast<std::size_t>(length));
  {
    Tensor h = Tensor::zeros({hid});
    Tensor c = Tensor::zeros({hid});
    for (int t = length - 1; t >= 0; --t) {
      auto [h2, c2] = lstm_cell_step(seq[static_cast<std::size_t>(t)], h, c, bwd);
      h = h2;
      c = c2;
      bwd_h[static_cast<std::size_t>(t)] = h;
    }
  }
  std::vector<Tensor> out(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (t < static_cast<std::size_t>(length))
      out[t] = concat({fwd_h[t], bwd_h[t]});
    else
      out[t] = Tensor::zeros({2 * hid});  // masked: no value, no gradient
  }
  return out;
}

std::pair<std::vector<Tensor>, std::vector<Tensor>> soft_align_attention(
    const std::vector<Tensor>& a, const std::vector<Tensor>& b) {
  if (a.empty() || b.empty())
    throw ContractError("soft_align_attention: empty sequence");
  const int d = a[0].dim(0);
  for (const Tensor& t : a)
    if (t.dim(0) != d) throw DimensionError("soft_align_attention: ragged a");
  for (const Tensor& t : b)
    if (t.dim(0) != d)
      throw DimensionError("soft_align_attention: dim mismatch between sides");

  Tensor am = stack_rows(a);            // [n, d]
  Tensor bm = stack_rows(b);            // [m, d]
  Tensor bt = transpose(bm);            // [d, m]
  Tensor scores = matmul(am, bt);       // e_ij = a_i . b_j
  Tensor scores_t = transpose(scores);  // [m, n]

  std::vector<Tensor> a_tilde(a.size()), b_tilde(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Tensor w = softmax(take_row(scores, static_cast<int>(i)));
    a_tilde[i] = matvec(bt, w);
  }
  Tensor at = transpose(am);  // [d, n]
  for (std::size_t j = 0; j < b.size(); ++j) {
    Tensor w = softmax(take_row(scores_t, static_cast<int>(j)));
    b_tilde[j] = matvec(at, w);
  }
  return {a_tilde, b_tilde};
}

Tensor mlp_forward(const Tensor& x, const MlpParams& params) {
  if (x.rank() != 1 || x.dim(0) != params.dims.front())
    throw DimensionError("mlp_forward: input dim mismatch");
  Tensor h = x;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    h = affine(params.weights[l], h, params.biases[l]);
    switch (params.activations[l]) {
      case Activation::kLinear:
        break;
      case Activation::kTanh:
        h = tanh(h);
        break;
      case Activation::kSigmoid:
        h = sigmoid(h);
        break;
    }
  }
  return h;
}

Tensor dropout_apply(const Tensor& x, double rate, bool training,
                     RngStream& rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw ContractError("dropout_apply: rate must be in [0, 1)");
  if (!training || rate == 0.0) return x;
  const double keep = 1.0 - rate;
  Tensor mask = Tensor::zeros(x.shape());
  for (double& m : mask.values()) m = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  return mul(x, mask);
}

std::vector<Tensor> embedding_lookup(const std::vector<int>& ids,
                                     const EmbeddingTable& table) {
  std::vector<Tensor> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= table.vocab_size)
      throw IndexError("embedding_lookup: id " + std::to_string(id) +
                       " out of range [0," + std::to_string(table.vocab_size) +
                       ")");
    if (id == 0)
      out.push_back(Tensor::zeros({table.dim}));  // frozen padding row
    else
      out.push_back(take_row(table.weights, id));
  }
  return out;
}

}  // namespace mtl
