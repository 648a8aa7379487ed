#include <cmath>
#include <vector>

#include "doctest.h"
#include "jnlp/corpus.h"
#include "jnlp/ner_head.h"
#include "jnlp/util.h"
#include "oracles.h"

using namespace jnlp;

namespace {

Vocab labels(std::size_t k) {
  Vocab v(/*with_specials=*/false);
  const char* names[] = {"O", "B-PER", "I-PER", "B-LOC", "I-LOC", "B-ORG"};
  for (std::size_t i = 0; i < k; ++i) v.add(names[i]);
  return v;
}

void fill_random(const TensorPtr& t, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (auto& x : t->value) x = rng.uniform(lo, hi);
}

void zero(const TensorPtr& t) { t->value.assign(t->numel(), 0.0); }

// Pulls h / transitions / start / end into the enumeration oracle's layout.
struct CrfView {
  std::vector<std::vector<double>> h, trans;
  std::vector<double> start, end;
};

CrfView view_of(const TensorPtr& h, const ParamStore& store, std::size_t k) {
  CrfView v;
  std::size_t n = h->rows();
  v.h.assign(n, std::vector<double>(k));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < k; ++j) v.h[t][j] = h->value[t * k + j];
  auto trans = store.get("ner.trans");
  v.trans.assign(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) v.trans[i][j] = trans->value[i * k + j];
  v.start = store.get("ner.start")->value;
  v.end = store.get("ner.end")->value;
  return v;
}

}  // namespace

TEST_CASE("emissions concatenate the encoder and soft-tag inputs") {
  Vocab v = labels(4);
  ParamStore store;
  Rng rng(1);
  NerHead head(4, 100, v, store, rng);
  CHECK(head.label_count() == 4);
  CHECK(store.get("ner.w")->shape == std::vector<std::size_t>{104, 4});

  Graph g;
  auto e = make_tensor({3, 4});
  auto t1 = make_tensor({3, 100});
  fill_random(e, rng);
  fill_random(t1, rng);
  auto h = head.emissions(g, e, t1);
  CHECK(h->shape == std::vector<std::size_t>{3, 4});
}

TEST_CASE("zero emission weights produce zero scores for any input") {
  Vocab v = labels(3);
  ParamStore store;
  Rng rng(2);
  NerHead head(5, 7, v, store, rng);
  zero(store.get("ner.w"));
  zero(store.get("ner.b"));

  Graph g;
  auto e = make_tensor({4, 5});
  auto t1 = make_tensor({4, 7});
  fill_random(e, rng);
  fill_random(t1, rng);
  auto h = head.emissions(g, e, t1);
  for (double x : h->value) CHECK(x == 0.0);
}

TEST_CASE("emission gradients match finite differences") {
  Vocab v = labels(3);
  ParamStore store;
  Rng rng(3);
  NerHead head(4, 6, v, store, rng);

  auto e = make_tensor({2, 4}, /*tracked=*/true);
  auto t1 = make_tensor({2, 6}, /*tracked=*/true);
  fill_random(e, rng);
  fill_random(t1, rng);
  auto probe = make_tensor({2, 3});
  fill_random(probe, rng, 0.5, 1.5);

  double rel = oracle::gradcheck(
      {e, t1, store.get("ner.w"), store.get("ner.b")}, [&](Graph& g) {
        return g.sum(g.mul(head.emissions(g, e, t1), probe));
      });
  CHECK(rel < 1e-4);
}

TEST_CASE("a one-label chain with zero scores has zero negative log likelihood") {
  Vocab v = labels(1);
  ParamStore store;
  Rng rng(4);
  NerHead head(1, 1, v, store, rng);
  zero(store.get("ner.trans"));
  zero(store.get("ner.start"));
  zero(store.get("ner.end"));

  Graph g;
  auto h = make_tensor({1, 1});
  CHECK(head.crf_nll(g, h, {0})->scalar() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("with zero chain scores the loss factorizes into per-token cross-entropies") {
  Vocab v = labels(3);
  ParamStore store;
  Rng rng(5);
  NerHead head(1, 1, v, store, rng);
  zero(store.get("ner.trans"));
  zero(store.get("ner.start"));
  zero(store.get("ner.end"));

  Graph g;
  auto h = make_tensor({4, 3});
  fill_random(h, rng);
  std::vector<int> gold = {2, 0, 1, 1};

  double expect = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    double m = h->value[t * 3];
    for (std::size_t j = 1; j < 3; ++j) m = std::max(m, h->value[t * 3 + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < 3; ++j) z += std::exp(h->value[t * 3 + j] - m);
    expect += m + std::log(z) - h->value[t * 3 + gold[t]];
  }
  CHECK(head.crf_nll(g, h, gold)->scalar() == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("the forward algorithm matches path enumeration on random chains") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t k = 1 + rng.uniform_int(4);
    std::size_t n = 1 + rng.uniform_int(6);
    Vocab v = labels(k);
    ParamStore store;
    Rng init(100 + trial);
    NerHead head(1, 1, v, store, init);
    fill_random(store.get("ner.trans"), rng);
    fill_random(store.get("ner.start"), rng);
    fill_random(store.get("ner.end"), rng);

    auto h = make_tensor({n, k});
    fill_random(h, rng, -2.0, 2.0);
    std::vector<int> gold;
    for (std::size_t t = 0; t < n; ++t) gold.push_back(static_cast<int>(rng.uniform_int(k)));

    CrfView view = view_of(h, store, k);
    auto enumerated = oracle::enumerate_chain(view.h, view.trans, view.start, view.end);
    double gold_score =
        oracle::chain_path_score(view.h, view.trans, view.start, view.end, gold);

    Graph g;
    double nll = head.crf_nll(g, h, gold)->scalar();
    double expect = enumerated.log_z - gold_score;
    CHECK(std::abs(nll - expect) <= 1e-8 * std::max(1.0, std::abs(expect)));
    CHECK(nll >= -1e-12);  // logZ dominates every single path score
  }
}

TEST_CASE("the chain loss gradient matches finite differences") {
  Vocab v = labels(3);
  ParamStore store;
  Rng rng(7);
  NerHead head(2, 3, v, store, rng);
  fill_random(store.get("ner.trans"), rng);
  fill_random(store.get("ner.start"), rng);
  fill_random(store.get("ner.end"), rng);

  auto e = make_tensor({3, 2}, /*tracked=*/true);
  auto t1 = make_tensor({3, 3}, /*tracked=*/true);
  fill_random(e, rng);
  fill_random(t1, rng);
  std::vector<int> gold = {0, 2, 1};

  std::vector<TensorPtr> params = {e,
                                   t1,
                                   store.get("ner.w"),
                                   store.get("ner.b"),
                                   store.get("ner.trans"),
                                   store.get("ner.start"),
                                   store.get("ner.end")};
  double rel = oracle::gradcheck(params, [&](Graph& g) {
    return head.crf_nll(g, head.emissions(g, e, t1), gold);
  });
  CHECK(rel < 1e-4);
}

TEST_CASE("a per-position constant shift moves the partition exactly and keeps the decode") {
  Vocab v = labels(3);
  ParamStore store;
  Rng rng(8);
  NerHead head(1, 1, v, store, rng);
  fill_random(store.get("ner.trans"), rng);
  fill_random(store.get("ner.start"), rng);
  fill_random(store.get("ner.end"), rng);

  auto h = make_tensor({4, 3});
  fill_random(h, rng);
  std::vector<int> gold = {1, 0, 2, 2};

  Graph g1;
  double nll_before = head.crf_nll(g1, h, gold)->scalar();
  NerPath path_before = head.viterbi(h);

  double c = 0.75;
  std::size_t shifted = 2;
  auto h2 = make_tensor({4, 3});
  h2->value = h->value;
  for (std::size_t j = 0; j < 3; ++j) h2->value[shifted * 3 + j] += c;

  Graph g2;
  // logZ and the gold path score shift by the same c, so the NLL is unchanged
  CHECK(head.crf_nll(g2, h2, gold)->scalar() ==
        doctest::Approx(nll_before).epsilon(1e-10));
  NerPath path_after = head.viterbi(h2);
  CHECK(path_after.labels == path_before.labels);
  CHECK(path_after.score == doctest::Approx(path_before.score + c).epsilon(1e-10));
}

TEST_CASE("with zero transitions the decoder reduces to per-token argmax") {
  Vocab v = labels(4);
  ParamStore store;
  Rng rng(9);
  NerHead head(1, 1, v, store, rng);
  zero(store.get("ner.trans"));
  zero(store.get("ner.start"));
  zero(store.get("ner.end"));

  auto h = make_tensor({5, 4});
  fill_random(h, rng);
  NerPath path = head.viterbi(h);
  for (std::size_t t = 0; t < 5; ++t) {
    int arg = 0;
    for (std::size_t j = 1; j < 4; ++j)
      if (h->value[t * 4 + j] > h->value[t * 4 + arg]) arg = static_cast<int>(j);
    CHECK(path.labels[t] == arg);
  }
}

TEST_CASE("score ties resolve to the smallest label id") {
  Vocab v = labels(3);
  ParamStore store;
  Rng rng(10);
  NerHead head(1, 1, v, store, rng);
  zero(store.get("ner.trans"));
  zero(store.get("ner.start"));
  zero(store.get("ner.end"));

  auto h = make_tensor({3, 3});  // all scores equal
  NerPath path = head.viterbi(h);
  CHECK(path.labels == std::vector<int>{0, 0, 0});
  CHECK(path.score == 0.0);
}

TEST_CASE("the decoder finds the enumerated optimum on random chains") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t k = 1 + rng.uniform_int(4);
    std::size_t n = 1 + rng.uniform_int(6);
    Vocab v = labels(k);
    ParamStore store;
    Rng init(200 + trial);
    NerHead head(1, 1, v, store, init);
    fill_random(store.get("ner.trans"), rng);
    fill_random(store.get("ner.start"), rng);
    fill_random(store.get("ner.end"), rng);

    auto h = make_tensor({n, k});
    fill_random(h, rng, -2.0, 2.0);

    CrfView view = view_of(h, store, k);
    auto enumerated = oracle::enumerate_chain(view.h, view.trans, view.start, view.end);
    NerPath path = head.viterbi(h);
    CHECK(path.score == enumerated.best_score);  // identical fold, exact match
    CHECK(path.labels == enumerated.best_path);
    CHECK(oracle::chain_path_score(view.h, view.trans, view.start, view.end,
                                   path.labels) == path.score);
  }
}
