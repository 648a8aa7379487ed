// Dependency layer: four 400-dim FFNN projections over [e ; t(2)] with a
// learned ROOT vector, biaffine arc scores with relative-ordering and
// log-distance terms, biaffine relation scores, per-dependent softmax loss
// with teacher-forced label loss, and Chu-Liu/Edmonds decoding.
#pragma once

#include <vector>

#include "jnlp/corpus.h"
#include "jnlp/optim.h"
#include "jnlp/tensor.h"

namespace jnlp {

inline constexpr std::size_t kParserFfnDim = 400;

struct ParserReprs {
  TensorPtr arc_h, arc_d, lab_h, lab_d;  // each (n+1) x 400, row 0 = ROOT
};

class DepHead {
 public:
  DepHead(std::size_t encoder_dim, std::size_t soft_dim, const Vocab& deprel_vocab,
          ParamStore& store, Rng& rng);

  std::size_t relation_count() const { return relation_count_; }

  // z_i = [e_i ; t2_i]; ROOT row from the learned z0; affine + ReLU each.
  ParserReprs reprs(Graph& g, const TensorPtr& e, const TensorPtr& t2) const;

  // S: n x (n+1); S[d-1][h] scores head h for dependent d; S[d-1][d] = -inf.
  TensorPtr arc_scores(Graph& g, const ParserReprs& r) const;

  // Relation logits per dependent at the given arcs: n x |REL|.
  TensorPtr label_scores_at(Graph& g, const ParserReprs& r,
                            const std::vector<int>& heads) const;

  // Per-dependent head cross-entropy plus relation cross-entropy at gold arcs.
  TensorPtr loss(Graph& g, const TensorPtr& arc_s, const TensorPtr& gold_label_logits,
                 const std::vector<int>& gold_heads,
                 const std::vector<int>& gold_rels) const;

  // Exact maximum single-root arborescence (head per token, 0 = ROOT).
  std::vector<int> decode_heads(const TensorPtr& arc_s) const;

  // Row argmax; ties take the smaller relation id.
  std::vector<int> decode_labels(const TensorPtr& label_logits) const;

 private:
  std::size_t relation_count_;
  TensorPtr z0_;                       // learned ROOT input, (d+soft)
  TensorPtr fw_[4], fb_[4];            // FFNN weights (d+soft) x 400, biases
  TensorPtr w_arc_, u_arc_;            // 400 x 400, 1 x 400
  TensorPtr w_lin_, w_dist_;           // 400 x 400 each
  TensorPtr u_rel_;                    // (|REL| * 400) x 400, flattened bilinear
  TensorPtr w_rel_, b_rel_;            // 800 x |REL|, |REL|
};

}  // namespace jnlp
