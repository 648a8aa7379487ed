#include "jnlp/model.h"

#include <stdexcept>

namespace jnlp {

JointModel::JointModel(const ModelConfig& config, Vocabs vocabs, BpeTable bpe,
                       std::uint64_t seed)
    : config_(config), vocabs_(std::move(vocabs)), bpe_(std::move(bpe)) {
  Rng rng(seed);
  if (config_.encoder.kind == EncoderKind::DeskScale) {
    encoder_ = std::make_unique<Encoder>(config_.encoder, vocabs_.subword, bpe_, store_, rng);
  } else {
    if (config_.embedding_file.empty())
      throw std::runtime_error("precomputed encoder needs an embedding file");
    encoder_ = std::make_unique<Encoder>(config_.encoder, config_.embedding_file);
  }
  std::size_t d = config_.encoder.dim;
  pos_ = std::make_unique<PosHead>(d, vocabs_.pos, store_, rng);
  ner_ = std::make_unique<NerHead>(d, kSoftTagDim, vocabs_.ner, store_, rng);
  dep_ = std::make_unique<DepHead>(d, kSoftTagDim, vocabs_.deprel, store_, rng);
}

std::vector<int> JointModel::gold_pos_ids(const Sentence& s) const {
  std::vector<int> ids;
  ids.reserve(s.tokens.size());
  for (const auto& t : s.tokens) ids.push_back(vocabs_.pos.encode(t.pos));
  return ids;
}

TensorPtr JointModel::tag_distribution(Graph& g, const TensorPtr& e, bool inference) const {
  auto p = pos_->forward(g, e).p;
  if (inference && config_.hard_tags) {
    auto ids = pos_->predict(p);
    auto onehot = make_tensor(p->shape);
    for (std::size_t i = 0; i < ids.size(); ++i)
      onehot->value[i * p->cols() + ids[i]] = 1.0;
    return onehot;
  }
  return p;
}

TensorPtr JointModel::pos_loss(Graph& g, const Sentence& s) const {
  auto e = encoder_->encode(g, s);
  return pos_->loss(g, pos_->forward(g, e).logits, gold_pos_ids(s));
}

TensorPtr JointModel::ner_loss(Graph& g, const Sentence& s) const {
  auto e = encoder_->encode(g, s);
  auto t1 = pos_->soft_tags(g, tag_distribution(g, e, /*inference=*/false), 1);
  std::vector<int> gold;
  gold.reserve(s.tokens.size());
  for (const auto& t : s.tokens) gold.push_back(vocabs_.ner.encode(t.ner));
  return ner_->crf_nll(g, ner_->emissions(g, e, t1), gold);
}

TensorPtr JointModel::dep_loss(Graph& g, const Sentence& s) const {
  auto e = encoder_->encode(g, s);
  auto t2 = pos_->soft_tags(g, tag_distribution(g, e, /*inference=*/false), 2);
  auto reprs = dep_->reprs(g, e, t2);
  std::vector<int> heads, rels;
  heads.reserve(s.tokens.size());
  rels.reserve(s.tokens.size());
  for (const auto& t : s.tokens) {
    heads.push_back(t.head);
    rels.push_back(vocabs_.deprel.encode(t.deprel));
  }
  auto arc_s = dep_->arc_scores(g, reprs);
  auto gold_label_logits = dep_->label_scores_at(g, reprs, heads);
  return dep_->loss(g, arc_s, gold_label_logits, heads, rels);
}

std::vector<std::string> JointModel::predict_pos(const Sentence& s) const {
  Graph g(/*grad_enabled=*/false);
  auto e = encoder_->encode(g, s);
  auto ids = pos_->predict(pos_->forward(g, e).p);
  std::vector<std::string> tags;
  tags.reserve(ids.size());
  for (int id : ids) tags.push_back(vocabs_.pos.decode(id));
  return tags;
}

std::vector<std::string> JointModel::predict_ner(const Sentence& s) const {
  Graph g(/*grad_enabled=*/false);
  auto e = encoder_->encode(g, s);
  auto t1 = pos_->soft_tags(g, tag_distribution(g, e, /*inference=*/true), 1);
  auto path = ner_->viterbi(ner_->emissions(g, e, t1));
  std::vector<std::string> labels;
  labels.reserve(path.labels.size());
  for (int id : path.labels) labels.push_back(vocabs_.ner.decode(id));
  return labels;
}

std::pair<std::vector<int>, std::vector<std::string>> JointModel::predict_dep(
    const Sentence& s) const {
  Graph g(/*grad_enabled=*/false);
  auto e = encoder_->encode(g, s);
  auto t2 = pos_->soft_tags(g, tag_distribution(g, e, /*inference=*/true), 2);
  auto reprs = dep_->reprs(g, e, t2);
  auto heads = dep_->decode_heads(dep_->arc_scores(g, reprs));
  auto rel_ids = dep_->decode_labels(dep_->label_scores_at(g, reprs, heads));
  std::vector<std::string> rels;
  rels.reserve(rel_ids.size());
  for (int id : rel_ids) rels.push_back(vocabs_.deprel.decode(id));
  return {heads, rels};
}

Sentence JointModel::annotate(const Sentence& s) const {
  Graph g(/*grad_enabled=*/false);
  auto e = encoder_->encode(g, s);
  auto pf = pos_->forward(g, e);
  auto pos_ids = pos_->predict(pf.p);
  auto dist = tag_distribution(g, e, /*inference=*/true);
  auto t1 = pos_->soft_tags(g, dist, 1);
  auto t2 = pos_->soft_tags(g, dist, 2);
  auto path = ner_->viterbi(ner_->emissions(g, e, t1));
  auto reprs = dep_->reprs(g, e, t2);
  auto heads = dep_->decode_heads(dep_->arc_scores(g, reprs));
  auto rel_ids = dep_->decode_labels(dep_->label_scores_at(g, reprs, heads));

  Sentence out = s;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    out.tokens[i].index = static_cast<int>(i) + 1;
    out.tokens[i].pos = vocabs_.pos.decode(pos_ids[i]);
    out.tokens[i].ner = vocabs_.ner.decode(path.labels[i]);
    out.tokens[i].head = heads[i];
    out.tokens[i].deprel = vocabs_.deprel.decode(rel_ids[i]);
  }
  out.mask.pos = out.mask.ner = out.mask.dep = true;
  return out;
}

}  // namespace jnlp
