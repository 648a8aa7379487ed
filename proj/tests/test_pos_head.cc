#include <cmath>
#include <vector>

#include "doctest.h"
#include "jnlp/corpus.h"
#include "jnlp/pos_head.h"
#include "jnlp/util.h"
#include "oracles.h"

using namespace jnlp;

namespace {

Vocab tagset3() {
  Vocab v(/*with_specials=*/false);
  v.add("PRON");
  v.add("VERB");
  v.add("NOUN");
  return v;
}

TensorPtr random_rows(std::size_t n, std::size_t d, Rng& rng, bool tracked = false) {
  auto t = make_tensor({n, d}, tracked);
  for (auto& x : t->value) x = rng.uniform(-1.0, 1.0);
  return t;
}

void fill_random(Tensor& t, Rng& rng) {
  for (auto& x : t.value) x = rng.uniform(-0.5, 0.5);
}

}  // namespace

TEST_CASE("zero weights and bias give a uniform tag distribution") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(1);
  PosHead head(8, tags, store, rng);
  store.get("pos.w")->value.assign(store.get("pos.w")->numel(), 0.0);
  store.get("pos.b")->value.assign(store.get("pos.b")->numel(), 0.0);

  Graph g;
  auto e = random_rows(4, 8, rng);
  auto f = head.forward(g, e);
  REQUIRE(f.p->shape == std::vector<std::size_t>{4, 3});
  for (double v : f.p->value) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("distribution rows have the tagset width and sum to one") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(2);
  PosHead head(8, tags, store, rng);
  CHECK(head.tagset_size() == 3);

  Graph g;
  auto e = random_rows(3, 8, rng);
  auto f = head.forward(g, e);
  REQUIRE(f.p->cols() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 3; ++j) row += f.p->value[i * 3 + j];
    CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("strongly peaked logits drive the loss to zero") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(3);
  PosHead head(4, tags, store, rng);

  Graph g;
  auto logits = make_tensor({2, 3});
  std::vector<int> gold = {1, 2};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      logits->value[i * 3 + j] = (static_cast<int>(j) == gold[i]) ? 50.0 : -50.0;
  CHECK(head.loss(g, logits, gold)->scalar() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("uniform logits cost ln K per token") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(4);
  PosHead head(4, tags, store, rng);

  Graph g;
  auto logits = make_tensor({5, 3});  // all zero
  auto loss = head.loss(g, logits, {0, 1, 2, 0, 1});
  CHECK(loss->scalar() == doctest::Approx(5.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("the loss equals an independently computed log loss") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(5);
  PosHead head(4, tags, store, rng);

  Graph g;
  auto logits = random_rows(6, 3, rng);
  std::vector<int> gold;
  for (int i = 0; i < 6; ++i) gold.push_back(static_cast<int>(rng.uniform_int(3)));

  double expect = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    double m = logits->value[i * 3];
    for (std::size_t j = 1; j < 3; ++j) m = std::max(m, logits->value[i * 3 + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < 3; ++j) z += std::exp(logits->value[i * 3 + j] - m);
    expect += m + std::log(z) - logits->value[i * 3 + gold[i]];
  }
  CHECK(head.loss(g, logits, gold)->scalar() == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("a one-hot distribution selects one column of the projection") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(6);
  PosHead head(4, tags, store, rng);

  Graph g;
  auto p = make_tensor({1, 3});
  p->value = {0.0, 1.0, 0.0};  // tag 1
  auto t1 = head.soft_tags(g, p, 1);
  REQUIRE(t1->shape == std::vector<std::size_t>{1, kSoftTagDim});
  auto w1 = store.get("pos.soft1");  // kSoftTagDim x |POS|
  for (std::size_t r = 0; r < kSoftTagDim; ++r)
    CHECK(t1->value[r] == doctest::Approx(w1->value[r * 3 + 1]).epsilon(1e-15));
}

TEST_CASE("a uniform distribution averages the projection columns") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(7);
  PosHead head(4, tags, store, rng);

  Graph g;
  auto p = make_tensor({1, 3});
  p->value = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto t2 = head.soft_tags(g, p, 2);
  auto w2 = store.get("pos.soft2");
  for (std::size_t r = 0; r < kSoftTagDim; ++r) {
    double mean = (w2->value[r * 3] + w2->value[r * 3 + 1] + w2->value[r * 3 + 2]) / 3.0;
    CHECK(t2->value[r] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("soft tags are linear in the distribution") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(8);
  PosHead head(4, tags, store, rng);

  auto p1 = make_tensor({2, 3});
  auto p2 = make_tensor({2, 3});
  fill_random(*p1, rng);
  fill_random(*p2, rng);
  double alpha = 0.3;
  auto blend = make_tensor({2, 3});
  for (std::size_t i = 0; i < 6; ++i)
    blend->value[i] = alpha * p1->value[i] + (1 - alpha) * p2->value[i];

  Graph g;
  auto ta = head.soft_tags(g, p1, 1);
  auto tb = head.soft_tags(g, p2, 1);
  auto tc = head.soft_tags(g, blend, 1);
  for (std::size_t i = 0; i < tc->numel(); ++i)
    CHECK(tc->value[i] ==
          doctest::Approx(alpha * ta->value[i] + (1 - alpha) * tb->value[i]).epsilon(1e-12));
}

TEST_CASE("the two projection matrices are independent parameters") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(9);
  PosHead head(4, tags, store, rng);
  auto w1 = store.get("pos.soft1");
  auto w2 = store.get("pos.soft2");
  CHECK(w1.get() != w2.get());

  // a loss through t(1) leaves W(2) without gradient
  Graph g;
  auto p = random_rows(2, 3, rng, /*tracked=*/false);
  auto loss = g.sum(head.soft_tags(g, p, 1));
  g.backward(loss);
  bool w1_touched = false;
  for (double gr : w1->grad)
    if (gr != 0.0) w1_touched = true;
  CHECK(w1_touched);
  for (double gr : w2->grad) CHECK(gr == 0.0);
}

TEST_CASE("gradients flow through the distribution into the encoder side") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(10);
  PosHead head(4, tags, store, rng);

  auto e = random_rows(2, 4, rng, /*tracked=*/true);
  auto probe = make_tensor({2, kSoftTagDim});
  fill_random(*probe, rng);
  double rel = oracle::gradcheck({e}, [&](Graph& g) {
    auto f = head.forward(g, e);
    return g.sum(g.mul(head.soft_tags(g, f.p, 1), probe));
  });
  CHECK(rel < 1e-4);
}

TEST_CASE("full head gradients match finite differences") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(11);
  PosHead head(4, tags, store, rng);

  auto e = random_rows(3, 4, rng, /*tracked=*/true);
  std::vector<int> gold = {0, 2, 1};
  std::vector<TensorPtr> params = {e, store.get("pos.w"), store.get("pos.b"),
                                   store.get("pos.soft1")};
  auto probe = make_tensor({3, kSoftTagDim});
  fill_random(*probe, rng);
  double rel = oracle::gradcheck(params, [&](Graph& g) {
    auto f = head.forward(g, e);
    auto ce = head.loss(g, f.logits, gold);
    auto soft = g.sum(g.mul(head.soft_tags(g, f.p, 1), probe));
    return g.add(ce, soft);
  });
  CHECK(rel < 1e-4);
}

TEST_CASE("prediction takes the row argmax with smaller-id ties") {
  Vocab tags = tagset3();
  ParamStore store;
  Rng rng(12);
  PosHead head(4, tags, store, rng);

  auto p = make_tensor({3, 3});
  p->value = {0.2, 0.5, 0.3,   // argmax 1
              0.4, 0.4, 0.2,   // tie: smaller id 0
              0.1, 0.1, 0.8};  // argmax 2
  CHECK(head.predict(p) == std::vector<int>{1, 0, 2});
}
