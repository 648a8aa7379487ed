// Contextual word encoder: subword embeddings + sinusoidal positions run
// through single-head scaled-dot self-attention layers, pooled at each
// word's first subword. An external-precomputed mode reads frozen per-word
// vectors from a file instead.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "jnlp/bpe.h"
#include "jnlp/corpus.h"
#include "jnlp/optim.h"
#include "jnlp/tensor.h"

namespace jnlp {

enum class EncoderKind { DeskScale, ExternalPrecomputed };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::DeskScale;
  std::size_t dim = 64;
  std::size_t layers = 2;
};

struct SubwordSegmentation {
  std::vector<int> subword_ids;        // flattened over the sentence
  std::vector<std::size_t> first_pos;  // first subword position per word
};

class Encoder {
 public:
  // Desk-scale: registers subword embeddings and per-layer attention/FFN
  // weights on the store and initializes them from rng.
  Encoder(const EncoderConfig& config, const Vocab& subword_vocab, const BpeTable& bpe,
          ParamStore& store, Rng& rng);

  // External-precomputed: word -> frozen vector table, no trainable weights.
  Encoder(const EncoderConfig& config, const std::string& embedding_file);

  const EncoderConfig& config() const { return config_; }

  SubwordSegmentation segment(const Sentence& sentence) const;

  // n x dim, one row per word (first-subword pooling). Differentiable for
  // the desk-scale encoder.
  TensorPtr encode(Graph& g, const Sentence& sentence) const;

  // Word-per-line "form v1 v2 ... vdim" table used by ExternalPrecomputed.
  static std::map<std::string, std::vector<double>> read_embedding_file(
      const std::string& path, std::size_t dim);

 private:
  EncoderConfig config_;
  const Vocab* subword_vocab_ = nullptr;
  const BpeTable* bpe_ = nullptr;
  TensorPtr embeddings_;  // |subword| x dim
  struct Layer {
    TensorPtr wq, wk, wv;  // dim x dim
    TensorPtr ff_w;        // dim x dim
    TensorPtr ff_b;        // dim
  };
  std::vector<Layer> layers_;
  std::map<std::string, std::vector<double>> external_;

  TensorPtr encode_desk(Graph& g, const Sentence& sentence) const;
  TensorPtr encode_external(Graph& g, const Sentence& sentence) const;
};

// Position encoding row p: sin(p / 10000^(2k/d)) in even slots, cos in odd.
std::vector<double> sinusoid_position(std::size_t pos, std::size_t dim);

}  // namespace jnlp
