// Independent reference implementations used to validate the real code:
// central finite differences for gradients, exhaustive enumeration for CRF
// partition/Viterbi and for maximum spanning arborescences. Deliberately
// slow and simple; nothing here shares code with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "jnlp/tensor.h"
#include "jnlp/util.h"

namespace oracle {

inline double fd_slot(const std::function<double()>& f, double* slot, double eps) {
  double orig = *slot;
  *slot = orig + eps;
  double fp = f();
  *slot = orig - eps;
  double fm = f();
  *slot = orig;
  return (fp - fm) / (2.0 * eps);
}

// Runs one analytic backward pass, then probes every entry of every tensor in
// `params` with central differences. Returns the max relative error.
inline double gradcheck(const std::vector<jnlp::TensorPtr>& params,
                        const std::function<jnlp::TensorPtr(jnlp::Graph&)>& build,
                        double eps = 1e-5) {
  for (auto& p : params) {
    p->ensure_grad();
    p->zero_grad();
  }
  {
    jnlp::Graph g;
    auto loss = build(g);
    g.backward(loss);
  }
  auto eval = [&]() {
    jnlp::Graph g(/*grad_enabled=*/false);
    return build(g)->scalar();
  };
  double max_rel = 0.0;
  for (auto& p : params) {
    for (std::size_t i = 0; i < p->numel(); ++i) {
      double fd = fd_slot(eval, &p->value[i], eps);
      double an = p->grad[i];
      double denom = std::max({std::abs(fd), std::abs(an), 1e-3});
      max_rel = std::max(max_rel, std::abs(fd - an) / denom);
    }
  }
  return max_rel;
}

// Like gradcheck, but probes at most `cap` entries per tensor (all of them
// when the tensor is small enough), drawn from a deterministic stream. Large
// parameter matrices make exhaustive probing prohibitive; sampling still
// covers every parameter group.
inline double gradcheck_sampled(const std::vector<jnlp::TensorPtr>& params,
                                const std::function<jnlp::TensorPtr(jnlp::Graph&)>& build,
                                std::size_t cap, std::uint64_t seed = 12345,
                                double eps = 1e-5) {
  for (auto& p : params) {
    p->ensure_grad();
    p->zero_grad();
  }
  {
    jnlp::Graph g;
    auto loss = build(g);
    g.backward(loss);
  }
  auto eval = [&]() {
    jnlp::Graph g(/*grad_enabled=*/false);
    return build(g)->scalar();
  };
  jnlp::Rng rng(seed);
  double max_rel = 0.0;
  for (auto& p : params) {
    std::vector<std::size_t> probes;
    if (p->numel() <= cap) {
      for (std::size_t i = 0; i < p->numel(); ++i) probes.push_back(i);
    } else {
      for (std::size_t i = 0; i < cap; ++i) probes.push_back(rng.uniform_int(p->numel()));
    }
    for (std::size_t i : probes) {
      double fd = fd_slot(eval, &p->value[i], eps);
      double an = p->grad[i];
      double denom = std::max({std::abs(fd), std::abs(an), 1e-3});
      max_rel = std::max(max_rel, std::abs(fd - an) / denom);
    }
  }
  return max_rel;
}

// Path score with the same left-fold order the decoder uses:
// s = start[y1] + h[0][y1]; s += trans[y_{t-1}][y_t] + h[t][y_t]; s += end[yn].
inline double chain_path_score(const std::vector<std::vector<double>>& h,
                               const std::vector<std::vector<double>>& trans,
                               const std::vector<double>& start,
                               const std::vector<double>& end,
                               const std::vector<int>& y) {
  double s = start[y[0]] + h[0][y[0]];
  for (std::size_t t = 1; t < y.size(); ++t) s += trans[y[t - 1]][y[t]] + h[t][y[t]];
  return s + end[y.back()];
}

struct ChainEnumeration {
  double log_z;
  std::vector<int> best_path;  // ties broken toward smaller label ids
  double best_score;
};

// Enumerates all K^n label sequences.
inline ChainEnumeration enumerate_chain(const std::vector<std::vector<double>>& h,
                                        const std::vector<std::vector<double>>& trans,
                                        const std::vector<double>& start,
                                        const std::vector<double>& end) {
  std::size_t n = h.size(), k = start.size();
  std::vector<int> y(n, 0);
  std::vector<double> scores;
  ChainEnumeration out;
  out.best_score = -std::numeric_limits<double>::infinity();
  while (true) {
    double s = chain_path_score(h, trans, start, end, y);
    scores.push_back(s);
    if (s > out.best_score) {
      out.best_score = s;
      out.best_path = y;
    }
    std::size_t t = 0;
    while (t < n && ++y[t] == static_cast<int>(k)) y[t++] = 0;
    if (t == n) break;
  }
  double m = *std::max_element(scores.begin(), scores.end());
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - m);
  out.log_z = m + std::log(acc);
  return out;
}

// score[d][h] for dependents d=1..n and heads h=0..n (0 = root). Enumerates
// every head assignment and keeps the spanning arborescences rooted at 0.
struct ArborescenceEnumeration {
  std::vector<int> best_heads;  // index 0 unused
  double best_score;
  bool found;
};

inline ArborescenceEnumeration enumerate_arborescence(
    const std::vector<std::vector<double>>& score) {
  std::size_t n = score.size() - 1;
  std::vector<int> heads(n + 1, 0);
  ArborescenceEnumeration out;
  out.best_score = -std::numeric_limits<double>::infinity();
  out.found = false;

  auto is_tree = [&]() {
    int roots = 0;
    for (std::size_t d = 1; d <= n; ++d)
      if (heads[d] == 0) ++roots;
    if (roots != 1) return false;
    for (std::size_t d = 1; d <= n; ++d) {
      std::size_t cur = d, hops = 0;
      while (cur != 0) {
        cur = static_cast<std::size_t>(heads[cur]);
        if (++hops > n) return false;  // cycle
      }
    }
    return true;
  };

  std::vector<int> pick(n, 0);  // pick[d-1] in 0..n, skipping self
  while (true) {
    bool self = false;
    for (std::size_t d = 1; d <= n; ++d) {
      heads[d] = pick[d - 1];
      if (heads[d] == static_cast<int>(d)) self = true;
    }
    if (!self && is_tree()) {
      double s = 0.0;
      for (std::size_t d = 1; d <= n; ++d) s += score[d][heads[d]];
      if (s > out.best_score) {
        out.best_score = s;
        out.best_heads = heads;
        out.found = true;
      }
    }
    std::size_t t = 0;
    while (t < n && ++pick[t] == static_cast<int>(n + 1)) pick[t++] = 0;
    if (t == n) break;
  }
  return out;
}

}  // namespace oracle
