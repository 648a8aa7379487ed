#include "jnlp/dep_head.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace jnlp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Maximum arborescence rooted at node 0 over g[v][u] = score of arc u -> v
// (v in 1..m); -inf marks missing arcs. Greedy selection iterates heads in
// ascending order with a strict comparison, so ties keep the smaller head.
std::vector<int> cle(const std::vector<std::vector<double>>& g) {
  int m = static_cast<int>(g.size()) - 1;
  std::vector<int> best(m + 1, -1);
  for (int v = 1; v <= m; ++v) {
    double bs = kNegInf;
    for (int u = 0; u <= m; ++u) {
      if (u == v) continue;
      if (g[v][u] > bs) {
        bs = g[v][u];
        best[v] = u;
      }
    }
    if (best[v] < 0) throw std::runtime_error("arc scores leave a token headless");
  }

  // Find one cycle in the greedy selection, if any.
  std::vector<int> color(m + 1, 0);
  std::vector<int> cycle;
  for (int s = 1; s <= m && cycle.empty(); ++s) {
    if (color[s]) continue;
    std::vector<int> path;
    int v = s;
    while (v != 0 && color[v] == 0) {
      color[v] = 1;
      path.push_back(v);
      v = best[v];
    }
    if (v != 0 && color[v] == 1) {
      auto it = std::find(path.begin(), path.end(), v);
      cycle.assign(it, path.end());
    }
    for (int u : path) color[u] = 2;
  }
  if (cycle.empty()) return best;

  // Contract the cycle into one supernode and recurse.
  std::vector<bool> in_cycle(m + 1, false);
  for (int v : cycle) in_cycle[v] = true;
  std::vector<int> new_id(m + 1, -1), old_id;
  old_id.push_back(0);
  new_id[0] = 0;
  for (int v = 1; v <= m; ++v) {
    if (in_cycle[v]) continue;
    new_id[v] = static_cast<int>(old_id.size());
    old_id.push_back(v);
  }
  int cyc_id = static_cast<int>(old_id.size());
  int m2 = cyc_id;  // contracted graph has nodes 0..m2, supernode last

  std::vector<std::vector<double>> g2(m2 + 1, std::vector<double>(m2 + 1, kNegInf));
  std::vector<int> enter(m2 + 1, -1);  // cycle node an external arc enters at
  std::vector<int> leave(m2 + 1, -1);  // cycle node an outgoing arc leaves from
  for (int v = 1; v <= m; ++v) {
    for (int u = 0; u <= m; ++u) {
      if (u == v || g[v][u] == kNegInf) continue;
      if (!in_cycle[v] && !in_cycle[u]) {
        g2[new_id[v]][new_id[u]] = g[v][u];
      } else if (in_cycle[v] && !in_cycle[u]) {
        double adjusted = g[v][u] - g[v][best[v]];
        if (adjusted > g2[cyc_id][new_id[u]]) {
          g2[cyc_id][new_id[u]] = adjusted;
          enter[new_id[u]] = v;
        }
      } else if (!in_cycle[v] && in_cycle[u]) {
        if (g[v][u] > g2[new_id[v]][cyc_id]) {
          g2[new_id[v]][cyc_id] = g[v][u];
          leave[new_id[v]] = u;
        }
      }
    }
  }

  auto heads2 = cle(g2);

  std::vector<int> heads(m + 1, -1);
  for (int v = 1; v <= m; ++v) {
    if (in_cycle[v]) continue;
    int h2 = heads2[new_id[v]];
    heads[v] = h2 == cyc_id ? leave[new_id[v]] : old_id[h2];
  }
  int external = heads2[cyc_id];  // the supernode's chosen head (never cyc_id)
  int entry = enter[external];
  for (int v : cycle) heads[v] = (v == entry) ? old_id[external] : best[v];
  return heads;
}

// Ascending-dependent fold, matching the enumeration oracle's rescoring.
double tree_score(const std::vector<std::vector<double>>& g, const std::vector<int>& heads) {
  double s = 0.0;
  for (std::size_t d = 1; d < g.size(); ++d) s += g[d][heads[d]];
  return s;
}

}  // namespace

DepHead::DepHead(std::size_t encoder_dim, std::size_t soft_dim, const Vocab& deprel_vocab,
                 ParamStore& store, Rng& rng)
    : relation_count_(deprel_vocab.size()) {
  if (relation_count_ == 0) throw std::runtime_error("relation vocabulary is empty");
  std::size_t zdim = encoder_dim + soft_dim;
  z0_ = store.create("dep.z0", {1, zdim});
  init_normal(*z0_, rng);
  const char* names[4] = {"dep.arc_h", "dep.arc_d", "dep.lab_h", "dep.lab_d"};
  for (int k = 0; k < 4; ++k) {
    fw_[k] = store.create(std::string(names[k]) + ".w", {zdim, kParserFfnDim});
    fb_[k] = store.create(std::string(names[k]) + ".b", {kParserFfnDim});
    init_xavier(*fw_[k], rng);
  }
  w_arc_ = store.create("dep.w_arc", {kParserFfnDim, kParserFfnDim});
  u_arc_ = store.create("dep.u_arc", {1, kParserFfnDim});
  w_lin_ = store.create("dep.w_lin", {kParserFfnDim, kParserFfnDim});
  w_dist_ = store.create("dep.w_dist", {kParserFfnDim, kParserFfnDim});
  u_rel_ = store.create("dep.u_rel", {relation_count_ * kParserFfnDim, kParserFfnDim});
  w_rel_ = store.create("dep.w_rel", {2 * kParserFfnDim, relation_count_});
  b_rel_ = store.create("dep.b_rel", {relation_count_});
  init_xavier(*w_arc_, rng);
  init_xavier(*u_arc_, rng);
  init_xavier(*w_lin_, rng);
  init_xavier(*w_dist_, rng);
  init_xavier(*u_rel_, rng);
  init_xavier(*w_rel_, rng);
}

ParserReprs DepHead::reprs(Graph& g, const TensorPtr& e, const TensorPtr& t2) const {
  auto z = g.stack_rows({z0_, g.concat_cols(e, t2)});  // (n+1) x (d+soft)
  auto project = [&](int k) {
    return g.relu(g.add_rowvec(g.matmul(z, fw_[k]), fb_[k]));
  };
  ParserReprs r;
  r.arc_h = project(0);
  r.arc_d = project(1);
  r.lab_h = project(2);
  r.lab_d = project(3);
  return r;
}

TensorPtr DepHead::arc_scores(Graph& g, const ParserReprs& r) const {
  std::size_t n = r.arc_h->rows() - 1;
  auto dep = g.slice_rows(r.arc_d, 1, n + 1);  // dependents 1..n

  // biaffine + head bias
  auto s = g.matmul(g.matmul(dep, w_arc_), r.arc_h, false, true);       // n x (n+1)
  auto head_bias = g.reshape(g.matmul(r.arc_h, u_arc_, false, true), {n + 1});
  s = g.add_rowvec(s, head_bias);

  // relative ordering: sgn(h - d) * (dep . W_lin . head)
  auto sign = make_tensor({n, n + 1});
  for (std::size_t d = 1; d <= n; ++d)
    for (std::size_t h = 0; h <= n; ++h)
      sign->value[(d - 1) * (n + 1) + h] = h > d ? 1.0 : (h < d ? -1.0 : 0.0);
  s = g.add(s, g.mul(g.matmul(g.matmul(dep, w_lin_), r.arc_h, false, true), sign));

  // distance: -(ln|h-d| - softplus(dep . W_dist . head))^2; the diagonal gets
  // a placeholder distance, then is masked out below.
  auto log_dist = make_tensor({n, n + 1});
  for (std::size_t d = 1; d <= n; ++d)
    for (std::size_t h = 0; h <= n; ++h) {
      double dist = h == d ? 1.0 : std::abs(static_cast<double>(h) - static_cast<double>(d));
      log_dist->value[(d - 1) * (n + 1) + h] = std::log(dist);
    }
  auto mismatch =
      g.sub(log_dist, g.softplus(g.matmul(g.matmul(dep, w_dist_), r.arc_h, false, true)));
  s = g.sub(s, g.mul(mismatch, mismatch));

  std::vector<std::size_t> diagonal(n);
  for (std::size_t d = 1; d <= n; ++d) diagonal[d - 1] = (d - 1) * (n + 1) + d;
  return g.mask_neg_inf(s, diagonal);
}

TensorPtr DepHead::label_scores_at(Graph& g, const ParserReprs& r,
                                   const std::vector<int>& heads) const {
  std::size_t n = r.lab_d->rows() - 1;
  if (heads.size() != n) throw std::runtime_error("label_scores_at: one head per token");
  for (int h : heads)
    if (h < 0 || static_cast<std::size_t>(h) > n)
      throw std::runtime_error("label_scores_at: head index out of range");

  // One GEMM over the distinct heads gives each head's bilinear panel: the
  // row for head h is lab_h[h] . U_rel laid out as |REL| blocks of 400.
  std::vector<int> distinct;
  std::map<int, std::size_t> slot;
  for (int h : heads)
    if (slot.emplace(h, distinct.size()).second) distinct.push_back(h);
  auto lab_sel = g.gather_rows(r.lab_h, distinct);      // |D| x 400
  auto t_sel = g.matmul(lab_sel, u_rel_, false, true);  // |D| x (|REL|*400)
  std::vector<TensorPtr> rows;
  rows.reserve(n);
  for (std::size_t d = 1; d <= n; ++d) {
    auto hd = g.slice_rows(r.lab_d, d, d + 1);  // 1 x 400
    auto hh = g.slice_rows(r.lab_h, static_cast<std::size_t>(heads[d - 1]),
                           static_cast<std::size_t>(heads[d - 1]) + 1);
    std::size_t s = slot.at(heads[d - 1]);
    auto panel = g.reshape(g.slice_rows(t_sel, s, s + 1),
                           {relation_count_, kParserFfnDim});
    auto bilinear = g.matmul(hd, panel, false, true);               // 1 x |REL|
    auto linear = g.matmul(g.concat_cols(hd, hh), w_rel_);          // 1 x |REL|
    rows.push_back(g.add_rowvec(g.add(bilinear, linear), b_rel_));
  }
  return g.stack_rows(rows);  // n x |REL|
}

TensorPtr DepHead::loss(Graph& g, const TensorPtr& arc_s, const TensorPtr& gold_label_logits,
                        const std::vector<int>& gold_heads,
                        const std::vector<int>& gold_rels) const {
  std::size_t n = arc_s->rows();
  if (gold_heads.size() != n || gold_rels.size() != n)
    throw std::runtime_error("dep loss: gold tree does not match sentence length");
  validate_tree(gold_heads, "dep loss");
  auto arc_ce = g.cross_entropy_rows(arc_s, gold_heads);
  auto rel_ce = g.cross_entropy_rows(gold_label_logits, gold_rels);
  return g.add(arc_ce, rel_ce);
}

std::vector<int> DepHead::decode_heads(const TensorPtr& arc_s) const {
  std::size_t n = arc_s->rows();
  if (arc_s->cols() != n + 1) throw std::runtime_error("decode_heads: bad score shape");

  std::vector<std::vector<double>> g(n + 1, std::vector<double>(n + 1, kNegInf));
  for (std::size_t d = 1; d <= n; ++d)
    for (std::size_t h = 0; h <= n; ++h)
      g[d][h] = arc_s->value[(d - 1) * (n + 1) + h];

  auto heads = cle(g);
  int roots = 0;
  for (std::size_t d = 1; d <= n; ++d)
    if (heads[d] == 0) ++roots;
  if (roots == 1) {
    heads.erase(heads.begin());
    return heads;
  }

  // Multiple root children: force each candidate root child in turn and keep
  // the best rescored tree (ties keep the smaller candidate index).
  std::vector<int> best_heads;
  double best_score = kNegInf;
  for (std::size_t r = 1; r <= n; ++r) {
    auto forced = g;
    for (std::size_t d = 1; d <= n; ++d)
      if (d != r) forced[d][0] = kNegInf;
    auto h = cle(forced);
    double score = tree_score(g, h);
    if (score > best_score) {
      best_score = score;
      best_heads = h;
    }
  }
  best_heads.erase(best_heads.begin());
  return best_heads;
}

std::vector<int> DepHead::decode_labels(const TensorPtr& label_logits) const {
  std::size_t n = label_logits->rows(), r = label_logits->cols();
  std::vector<int> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = label_logits->value[i * r];
    for (std::size_t j = 1; j < r; ++j) {
      if (label_logits->value[i * r + j] > best) {
        best = label_logits->value[i * r + j];
        out[i] = static_cast<int>(j);
      }
    }
  }
  return out;
}

}  // namespace jnlp
