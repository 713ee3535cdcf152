#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtl/tensor.hpp"

namespace mtl {

using NamedParams = std::vector<std::pair<std::string, Tensor>>;

// One LSTM direction. Gate matrices act on [x; h].
struct LstmParams {
  int input_dim = 0;
  int hidden_dim = 0;
  Tensor w_i, w_f, w_o, w_g;  // each [hidden_dim, input_dim + hidden_dim]
  Tensor b_i, b_f, b_o, b_g;  // [hidden_dim]
};

struct BiLstm {
  LstmParams fwd, bwd;
};

struct EmbeddingTable {
  int vocab_size = 0;
  int dim = 0;
  Tensor weights;  // [vocab_size, dim]; row 0 is padding and stays zero
  bool trainable = true;
};

enum class Activation { kLinear, kTanh, kSigmoid };

struct MlpParams {
  std::vector<int> dims;  // layer widths, input first
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;
  std::vector<Activation> activations;
};

// Weights uniform(-1/sqrt(hidden), 1/sqrt(hidden)); biases zero except the
// forget gate, which starts at 1.
LstmParams make_lstm(int input_dim, int hidden_dim, std::uint64_t seed,
                     const std::string& path);
BiLstm make_bilstm(int input_dim, int hidden_dim, std::uint64_t seed,
                   const std::string& path);
EmbeddingTable make_embedding(int vocab_size, int dim, std::uint64_t seed,
                              const std::string& path, bool trainable = true);
MlpParams make_mlp(const std::vector<int>& dims,
                   const std::vector<Activation>& activations,
                   std::uint64_t seed, const std::string& path);

void collect_params(const std::string& prefix, const LstmParams& p,
                    NamedParams& out);
void collect_params(const std::string& prefix, const BiLstm& p,
                    NamedParams& out);
void collect_params(const std::string& prefix, const EmbeddingTable& t,
                    NamedParams& out);
void collect_params(const std::string& prefix, const MlpParams& p,
                    NamedParams& out);

// Standard recurrence: i,f,o = sigmoid gates, g = tanh candidate,
// c' = f*c + i*g, h' = o*tanh(c').
std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x, const Tensor& h,
                                         const Tensor& c,
                                         const LstmParams& params);

// Output i is [forward_h_i ; backward_h_i]; backward direction consumes the
// sequence reversed. Positions at or beyond `length` yield zero vectors with
// no gradient path.
std::vector<Tensor> bilstm_forward(const std::vector<Tensor>& seq,
                                   const LstmParams& fwd,
                                   const LstmParams& bwd, int length);

inline std::vector<Tensor> bilstm_forward(const std::vector<Tensor>& seq,
                                          const BiLstm& p, int length) {
  return bilstm_forward(seq, p.fwd, p.bwd, length);
}

// Dot-product soft alignment: e_ij = a_i . b_j, each side attends over the
// other with row-softmax weights.
std::pair<std::vector<Tensor>, std::vector<Tensor>> soft_align_attention(
    const std::vector<Tensor>& a, const std::vector<Tensor>& b);

Tensor mlp_forward(const Tensor& x, const MlpParams& params);

// Inverted dropout: expectation-preserving mask in training mode, identity
// in evaluation.
Tensor dropout_apply(const Tensor& x, double rate, bool training,
                     RngStream& rng);

std::vector<Tensor> embedding_lookup(const std::vector<int>& ids,
                                     const EmbeddingTable& table);

inline Tensor affine(const Tensor& w, const Tensor& x, const Tensor& b) {
  return add(matvec(w, x), b);
}

}  // namespace mtl
