#include "jnlp/pos_head.h"

#include <stdexcept>

namespace jnlp {

PosHead::PosHead(std::size_t encoder_dim, const Vocab& pos_vocab, ParamStore& store,
                 Rng& rng)
    : tagset_size_(pos_vocab.size()) {
  if (tagset_size_ == 0) throw std::runtime_error("POS vocabulary is empty");
  w_ = store.create("pos.w", {encoder_dim, tagset_size_});
  b_ = store.create("pos.b", {tagset_size_});
  w1_ = store.create("pos.soft1", {kSoftTagDim, tagset_size_});
  w2_ = store.create("pos.soft2", {kSoftTagDim, tagset_size_});
  init_xavier(*w_, rng);
  init_xavier(*w1_, rng);
  init_xavier(*w2_, rng);
}

PosHead::Forward PosHead::forward(Graph& g, const TensorPtr& e) const {
  Forward out;
  out.logits = g.add_rowvec(g.matmul(e, w_), b_);
  out.p = g.softmax_rows(out.logits);
  return out;
}

TensorPtr PosHead::loss(Graph& g, const TensorPtr& logits,
                        const std::vector<int>& gold) const {
  if (logits->rows() != gold.size())
    throw std::runtime_error("pos loss: one gold tag per token required");
  return g.cross_entropy_rows(logits, gold);
}

TensorPtr PosHead::soft_tags(Graph& g, const TensorPtr& p, int which) const {
  if (which != 1 && which != 2)
    throw std::runtime_error("soft_tags: selector must be 1 or 2");
  // t_i = W p_i for each row, i.e. P (n x |POS|) times W^T (|POS| x 100).
  return g.matmul(p, which == 1 ? w1_ : w2_, false, true);
}

std::vector<int> PosHead::predict(const TensorPtr& p) const {
  std::size_t n = p->rows(), k = p->cols();
  std::vector<int> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = p->value[i * k];
    for (std::size_t j = 1; j < k; ++j) {
      if (p->value[i * k + j] > best) {
        best = p->value[i * k + j];
        out[i] = static_cast<int>(j);
      }
    }
  }
  return out;
}

}  // namespace jnlp
