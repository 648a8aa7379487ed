// Joint three-task model: shared encoder, POS softmax layer, soft POS tag
// projections feeding a CRF-based NER layer and a biaffine dependency layer.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "jnlp/bpe.h"
#include "jnlp/corpus.h"
#include "jnlp/dep_head.h"
#include "jnlp/encoder.h"
#include "jnlp/ner_head.h"
#include "jnlp/optim.h"
#include "jnlp/pos_head.h"
#include "jnlp/tensor.h"

namespace jnlp {

struct ModelConfig {
  EncoderConfig encoder;
  bool hard_tags = false;  // inference ablation: one-hot argmax instead of p
  std::string embedding_file;  // ExternalPrecomputed only
};

class JointModel {
 public:
  JointModel(const ModelConfig& config, Vocabs vocabs, BpeTable bpe, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocabs& vocabs() const { return vocabs_; }
  const BpeTable& bpe() const { return bpe_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }

  // Per-sentence loss terms (sums over tokens), all on one tape.
  TensorPtr pos_loss(Graph& g, const Sentence& s) const;
  TensorPtr ner_loss(Graph& g, const Sentence& s) const;
  TensorPtr dep_loss(Graph& g, const Sentence& s) const;

  std::vector<std::string> predict_pos(const Sentence& s) const;
  std::vector<std::string> predict_ner(const Sentence& s) const;
  // heads (0 = ROOT) and relation labels.
  std::pair<std::vector<int>, std::vector<std::string>> predict_dep(const Sentence& s) const;

  // Full pipeline: encode -> POS -> soft tags -> {NER decode, parse decode}.
  Sentence annotate(const Sentence& s) const;

 private:
  ModelConfig config_;
  Vocabs vocabs_;
  BpeTable bpe_;
  ParamStore store_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<PosHead> pos_;
  std::unique_ptr<NerHead> ner_;
  std::unique_ptr<DepHead> dep_;

  TensorPtr tag_distribution(Graph& g, const TensorPtr& e, bool inference) const;
  std::vector<int> gold_pos_ids(const Sentence& s) const;
};

}  // namespace jnlp
