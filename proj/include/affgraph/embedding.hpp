#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "affgraph/graphlet.hpp"

namespace affgraph {

/// Tokens longer than this are replaced by a 128-bit digest.
inline constexpr std::size_t kMaxTokenLength = 4096;

/// Weisfeiler-Lehman rooted-subtree tokens for iterations 0..depth, listed
/// per iteration and per vertex. Iteration 0 is the raw label; iteration
/// i+1 of v is "<tok_i(v)>(<sorted neighbour tok_i joined by ','>)".
std::vector<std::string> wl_tokens(const LabeledGraph& g, int depth);
std::vector<std::string> wl_tokens(std::string_view canonical, int depth);

struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, int> index;

  std::size_t size() const { return tokens.size(); }
  int find(const std::string& token) const;
};

/// Indexes every distinct token in first-seen order.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus);

/// Maps token bags to vocabulary indices; unknown tokens are dropped.
std::vector<std::vector<int>> encode_corpus(const std::vector<std::vector<std::string>>& corpus,
                                            const Vocabulary& vocab);

enum class Objective { NegativeSampling, FullSoftmax };

struct TrainConfig {
  int embedding_dim = 128;
  double learning_rate = 0.5;
  int batch_size = 512;
  int wl_depth = 14;
  int negatives = 5;
  int epochs = 200;
  std::uint64_t seed = 7;
  Objective objective = Objective::NegativeSampling;

  void validate() const;
};

using EmbeddingTable = std::vector<std::vector<double>>;

struct TrainResult {
  EmbeddingTable graph_vectors;  // one row per document
  EmbeddingTable token_vectors;  // output layer, one row per vocabulary entry
  std::vector<double> epoch_loss;  // mean per-pair loss of each epoch
};

/// Bag-of-subgraphs skip-gram training: each graph vector predicts the
/// tokens of its graph against sampled negatives. Mini-batch SGD with
/// batch-averaged gradients and a linearly decaying rate. Deterministic for
/// a fixed seed.
TrainResult train(const std::vector<std::vector<int>>& docs, const Vocabulary& vocab, const TrainConfig& cfg);

void write_embeddings(const std::string& path, const std::vector<std::string>& ids, const EmbeddingTable& table);
void read_embeddings(const std::string& path, std::vector<std::string>& ids, EmbeddingTable& table);
void write_vocabulary(const std::string& path, const Vocabulary& vocab);
Vocabulary read_vocabulary(const std::string& path);

}  // namespace affgraph
