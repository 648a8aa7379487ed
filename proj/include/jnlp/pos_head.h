// Linear POS prediction over encoder outputs, plus the two soft-tag
// projection matrices consumed downstream (t(k) = W(k) p, 100-dim rows).
#pragma once

#include <string>
#include <vector>

#include "jnlp/corpus.h"
#include "jnlp/optim.h"
#include "jnlp/tensor.h"

namespace jnlp {

inline constexpr std::size_t kSoftTagDim = 100;

class PosHead {
 public:
  PosHead(std::size_t encoder_dim, const Vocab& pos_vocab, ParamStore& store, Rng& rng);

  std::size_t tagset_size() const { return tagset_size_; }

  struct Forward {
    TensorPtr logits;  // n x |POS|
    TensorPtr p;       // n x |POS|, row-stochastic
  };
  Forward forward(Graph& g, const TensorPtr& e) const;

  // Sum of per-token cross-entropies for one sentence.
  TensorPtr loss(Graph& g, const TensorPtr& logits, const std::vector<int>& gold) const;

  // t(k)_i = W(k) p_i, rows n x 100. which selects W(1) or W(2).
  TensorPtr soft_tags(Graph& g, const TensorPtr& p, int which) const;

  std::vector<int> predict(const TensorPtr& p) const;  // row argmax, smaller id wins ties

 private:
  std::size_t tagset_size_;
  TensorPtr w_, b_;    // d x |POS|, |POS|
  TensorPtr w1_, w2_;  // 100 x |POS| each
};

}  // namespace jnlp
