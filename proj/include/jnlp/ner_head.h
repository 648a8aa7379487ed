// NER layer: affine emissions over [e ; t(1)] and a linear-chain CRF with
// learned transitions plus start/end score vectors. Training uses the
// forward-algorithm NLL on the autodiff tape; inference is Viterbi.
#pragma once

#include <vector>

#include "jnlp/corpus.h"
#include "jnlp/optim.h"
#include "jnlp/tensor.h"

namespace jnlp {

struct NerPath {
  std::vector<int> labels;
  double score = 0.0;
};

class NerHead {
 public:
  NerHead(std::size_t encoder_dim, std::size_t soft_dim, const Vocab& ner_vocab,
          ParamStore& store, Rng& rng);

  std::size_t label_count() const { return label_count_; }

  // h_i = affine([e_i ; t1_i]), shape n x |NER|.
  TensorPtr emissions(Graph& g, const TensorPtr& e, const TensorPtr& t1) const;

  // NLL = logZ - score(gold), both on tape.
  TensorPtr crf_nll(Graph& g, const TensorPtr& h, const std::vector<int>& gold) const;

  // Exactly-optimal path; ties at each backpointer take the smaller label id.
  NerPath viterbi(const TensorPtr& h) const;

 private:
  std::size_t label_count_;
  TensorPtr w_, b_;          // (d+soft) x K, K
  TensorPtr trans_;          // K x K, trans[i][j] = score of i -> j
  TensorPtr start_, end_;    // K each
};

}  // namespace jnlp
