#include "jnlp/ner_head.h"

#include <limits>
#include <stdexcept>

namespace jnlp {

NerHead::NerHead(std::size_t encoder_dim, std::size_t soft_dim, const Vocab& ner_vocab,
                 ParamStore& store, Rng& rng)
    : label_count_(ner_vocab.size()) {
  if (label_count_ == 0) throw std::runtime_error("NER vocabulary is empty");
  w_ = store.create("ner.w", {encoder_dim + soft_dim, label_count_});
  b_ = store.create("ner.b", {label_count_});
  trans_ = store.create("ner.trans", {label_count_, label_count_});
  start_ = store.create("ner.start", {label_count_});
  end_ = store.create("ner.end", {label_count_});
  init_xavier(*w_, rng);
}

TensorPtr NerHead::emissions(Graph& g, const TensorPtr& e, const TensorPtr& t1) const {
  return g.add_rowvec(g.matmul(g.concat_cols(e, t1), w_), b_);
}

TensorPtr NerHead::crf_nll(Graph& g, const TensorPtr& h, const std::vector<int>& gold) const {
  std::size_t n = h->rows(), k = label_count_;
  if (h->cols() != k) throw std::runtime_error("crf_nll: emission width mismatch");
  if (gold.size() != n) throw std::runtime_error("crf_nll: one gold label per token");
  for (int y : gold)
    if (y < 0 || static_cast<std::size_t>(y) >= k)
      throw std::runtime_error("crf_nll: gold label out of range");

  // score(gold) = start[y1] + sum_t h[t][y_t] + sum_t trans[y_{t-1}][y_t] + end[yn]
  std::vector<std::size_t> h_flat(n);
  for (std::size_t t = 0; t < n; ++t)
    h_flat[t] = t * k + static_cast<std::size_t>(gold[t]);
  auto gold_score = g.add(g.sum(g.select(h, h_flat)),
                          g.sum(g.select(start_, {static_cast<std::size_t>(gold[0])})));
  if (n > 1) {
    std::vector<std::size_t> t_flat(n - 1);
    for (std::size_t t = 1; t < n; ++t)
      t_flat[t - 1] = static_cast<std::size_t>(gold[t - 1]) * k +
                      static_cast<std::size_t>(gold[t]);
    gold_score = g.add(gold_score, g.sum(g.select(trans_, t_flat)));
  }
  gold_score = g.add(gold_score,
                     g.sum(g.select(end_, {static_cast<std::size_t>(gold[n - 1])})));

  // logZ: alpha_1 = start + h_1; alpha_t = logsumexp_i(trans[i][.] + alpha[i]) + h_t
  auto alpha = g.add(start_, g.reshape(g.slice_rows(h, 0, 1), {k}));
  for (std::size_t t = 1; t < n; ++t) {
    auto m = g.add_colvec(trans_, alpha);
    alpha = g.add(g.logsumexp_cols(m), g.reshape(g.slice_rows(h, t, t + 1), {k}));
  }
  auto log_z = g.logsumexp_all(g.add(alpha, end_));
  return g.sub(log_z, gold_score);
}

NerPath NerHead::viterbi(const TensorPtr& h) const {
  std::size_t n = h->rows(), k = label_count_;
  if (h->cols() != k) throw std::runtime_error("viterbi: emission width mismatch");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // delta folds each step as prev + (trans + emission) so the winning path's
  // score accumulates exactly like a left-to-right rescoring of that path.
  std::vector<std::vector<double>> delta(n, std::vector<double>(k, kNegInf));
  std::vector<std::vector<int>> back(n, std::vector<int>(k, 0));
  for (std::size_t j = 0; j < k; ++j)
    delta[0][j] = start_->value[j] + h->value[j];
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (std::size_t i = 0; i < k; ++i) {
        double cand = delta[t - 1][i] + (trans_->value[i * k + j] + h->value[t * k + j]);
        if (cand > best) {
          best = cand;
          arg = static_cast<int>(i);
        }
      }
      delta[t][j] = best;
      back[t][j] = arg;
    }
  }

  NerPath path;
  path.labels.assign(n, 0);
  double best = kNegInf;
  int arg = 0;
  for (std::size_t j = 0; j < k; ++j) {
    double cand = delta[n - 1][j] + end_->value[j];
    if (cand > best) {
      best = cand;
      arg = static_cast<int>(j);
    }
  }
  path.score = best;
  path.labels[n - 1] = arg;
  for (std::size_t t = n - 1; t > 0; --t)
    path.labels[t - 1] = back[t][path.labels[t]];
  return path;
}

}  // namespace jnlp
