#include "jnlp/encoder.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "jnlp/util.h"

namespace jnlp {

std::vector<double> sinusoid_position(std::size_t pos, std::size_t dim) {
  std::vector<double> row(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    double exponent = static_cast<double>(2 * (k / 2)) / static_cast<double>(dim);
    double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
    row[k] = (k % 2 == 0) ? std::sin(angle) : std::cos(angle);
  }
  return row;
}

Encoder::Encoder(const EncoderConfig& config, const Vocab& subword_vocab,
                 const BpeTable& bpe, ParamStore& store, Rng& rng)
    : config_(config), subword_vocab_(&subword_vocab), bpe_(&bpe) {
  if (config_.kind != EncoderKind::DeskScale)
    throw std::runtime_error("this constructor builds the desk-scale encoder");
  if (config_.dim == 0) throw std::runtime_error("encoder dim must be positive");

  embeddings_ = store.create("enc.emb", {subword_vocab.size(), config_.dim});
  init_normal(*embeddings_, rng);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    Layer layer;
    std::string prefix = "enc.l" + std::to_string(l) + ".";
    layer.wq = store.create(prefix + "wq", {config_.dim, config_.dim});
    layer.wk = store.create(prefix + "wk", {config_.dim, config_.dim});
    layer.wv = store.create(prefix + "wv", {config_.dim, config_.dim});
    layer.ff_w = store.create(prefix + "ff_w", {config_.dim, config_.dim});
    layer.ff_b = store.create(prefix + "ff_b", {config_.dim});
    init_xavier(*layer.wq, rng);
    init_xavier(*layer.wk, rng);
    init_xavier(*layer.wv, rng);
    init_xavier(*layer.ff_w, rng);
    layers_.push_back(layer);
  }
}

Encoder::Encoder(const EncoderConfig& config, const std::string& embedding_file)
    : config_(config) {
  if (config_.kind != EncoderKind::ExternalPrecomputed)
    throw std::runtime_error("this constructor builds the precomputed encoder");
  external_ = read_embedding_file(embedding_file, config_.dim);
}

SubwordSegmentation Encoder::segment(const Sentence& sentence) const {
  SubwordSegmentation seg;
  for (const auto& tok : sentence.tokens) {
    seg.first_pos.push_back(seg.subword_ids.size());
    if (bpe_ && subword_vocab_) {
      for (const auto& unit : bpe_->apply(tok.form))
        seg.subword_ids.push_back(subword_vocab_->encode(unit));
    } else {
      seg.subword_ids.push_back(0);  // frozen-table mode: one unit per word
    }
  }
  return seg;
}

TensorPtr Encoder::encode(Graph& g, const Sentence& sentence) const {
  if (sentence.tokens.empty()) throw std::runtime_error("encode: empty sentence");
  return config_.kind == EncoderKind::DeskScale ? encode_desk(g, sentence)
                                                : encode_external(g, sentence);
}

TensorPtr Encoder::encode_desk(Graph& g, const Sentence& sentence) const {
  auto seg = segment(sentence);
  std::size_t m = seg.subword_ids.size(), d = config_.dim;

  auto positions = make_tensor({m, d});
  for (std::size_t p = 0; p < m; ++p) {
    auto row = sinusoid_position(p, d);
    std::copy(row.begin(), row.end(), positions->value.begin() + p * d);
  }
  auto x = g.add(g.gather_rows(embeddings_, seg.subword_ids), positions);

  double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (const auto& layer : layers_) {
    auto q = g.matmul(x, layer.wq);
    auto k = g.matmul(x, layer.wk);
    auto v = g.matmul(x, layer.wv);
    auto attn = g.softmax_rows(g.scale(g.matmul(q, k, false, true), inv_sqrt_d));
    x = g.add(x, g.matmul(attn, v));
    x = g.add(x, g.tanh(g.add_rowvec(g.matmul(x, layer.ff_w), layer.ff_b)));
  }

  std::vector<int> first;
  first.reserve(seg.first_pos.size());
  for (auto p : seg.first_pos) first.push_back(static_cast<int>(p));
  return g.gather_rows(x, first);
}

TensorPtr Encoder::encode_external(Graph& g, const Sentence& sentence) const {
  (void)g;
  std::size_t n = sentence.tokens.size(), d = config_.dim;
  auto e = make_tensor({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    auto it = external_.find(sentence.tokens[i].form);
    if (it == external_.end()) continue;  // unseen word keeps a zero row
    std::copy(it->second.begin(), it->second.end(), e->value.begin() + i * d);
  }
  return e;
}

std::map<std::string, std::vector<double>> Encoder::read_embedding_file(
    const std::string& path, std::size_t dim) {
  std::map<std::string, std::vector<double>> table;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto parts = split_ws(line);
    if (parts.size() != dim + 1)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected form + " +
                               std::to_string(dim) + " values");
    std::vector<double> vec(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      try {
        vec[k] = std::stod(parts[k + 1]);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": cannot parse value '" + parts[k + 1] + "'");
      }
    }
    table[parts[0]] = std::move(vec);
  }
  return table;
}

}  // namespace jnlp
