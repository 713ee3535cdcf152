#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtl/nn.hpp"

namespace mtl {

enum class TaskKind {
  kSingleClassification,
  kPairClassification,
  kSimilarityRegression,
  kTokenTagging,
  kDependencyParsing,
};

bool task_kind_is_pair(TaskKind k);
bool task_kind_is_sequence(TaskKind k);
const char* task_kind_name(TaskKind k);
TaskKind task_kind_from_name(const std::string& name);

// id 0 = padding, id 1 = unknown.
struct Vocab {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  std::vector<std::string> id_to_token{"<pad>", "<unk>"};
  std::unordered_map<std::string, int> token_to_id;

  int size() const { return static_cast<int>(id_to_token.size()); }
  int id(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? kUnk : it->second;
  }
  const std::string& token(int id) const {
    return id_to_token[static_cast<std::size_t>(id)];
  }
};

struct Example {
  std::vector<std::string> tokens_a;
  std::vector<std::string> tokens_b;  // pair kinds only
  int label = -1;                     // classification label id
  double score = 0.0;                 // similarity kinds only
  std::vector<std::string> pos;       // tagging kinds
  std::vector<std::string> chunk;
  std::vector<int> heads;  // 1-based, 0 = root
  std::vector<int> meta_features;  // synthetic derivation bits (tests only)
};

struct Dataset {
  TaskKind kind = TaskKind::kSingleClassification;
  std::vector<Example> examples;
  std::vector<std::string> label_names;  // file order of first appearance
  std::vector<std::string> pos_names;
  std::vector<std::string> chunk_names;

  std::size_t size() const { return examples.size(); }
};

struct Batch {
  std::vector<std::vector<int>> token_ids;  // batch x max_len, padded with 0
  std::vector<int> lengths;
  std::vector<std::vector<int>> token_ids_b;
  std::vector<int> lengths_b;
  std::vector<int> labels;
  std::vector<double> scores;
  std::vector<std::vector<int>> pos;    // tag ids aligned with tokens
  std::vector<std::vector<int>> chunk;
  std::vector<std::vector<int>> heads;

  std::size_t size() const { return lengths.size(); }
};

// Lowercased whitespace tokenization.
std::vector<std::string> tokenize(const std::string& text);

// Tokens with frequency >= min_count, ordered by frequency descending then
// lexicographically; deterministic for identical input.
Vocab build_vocab(const std::vector<std::vector<std::string>>& corpora,
                  int min_count = 1);

// Text format: `token f1 f2 ... fd` per line. In-vocab rows are copied,
// everything else is Normal(0,1); the padding row stays zero.
EmbeddingTable load_embeddings(const std::string& path, const Vocab& vocab,
                               int dim, std::uint64_t seed);

// Single-sentence TSV: text<TAB>label. Pair TSV: a<TAB>b<TAB>label.
// Similarity TSV: a<TAB>b<TAB>score. CoNLL: `token pos chunk head` columns,
// blank-line sentence separator. A non-null fixed label set makes unknown
// labels an error; otherwise labels are collected in order of appearance.
Dataset load_dataset(const std::string& path, TaskKind kind,
                     const std::vector<std::string>* fixed_labels = nullptr);
void write_dataset(const std::string& path, const Dataset& ds);

// Deterministic batches: optional shuffle by seed, truncation to max_len,
// final partial batch emitted.
std::vector<Batch> make_batches(const Dataset& ds, const Vocab& vocab,
                                int batch_size, int max_len, bool shuffle,
                                std::uint64_t shuffle_seed);

// FNV-1a over file or string content, hex-encoded; used in run manifests.
std::string content_digest(const std::string& bytes);
std::string file_digest(const std::string& path);

}  // namespace mtl
