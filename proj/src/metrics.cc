#include "jnlp/metrics.h"

#include <set>
#include <stdexcept>
#include <tuple>

namespace jnlp {

double pos_accuracy(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& pred) {
  if (gold.size() != pred.size())
    throw std::runtime_error("pos_accuracy: sentence counts differ");
  std::size_t total = 0, correct = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw std::runtime_error("pos_accuracy: token counts differ in sentence " +
                               std::to_string(s + 1));
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      ++total;
      if (gold[s][i] == pred[s][i]) ++correct;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<Span> extract_spans(const std::vector<std::string>& bio) {
  std::vector<Span> spans;
  Span open;
  bool active = false;
  auto close = [&]() {
    if (active) spans.push_back(open);
    active = false;
  };
  for (std::size_t i = 0; i < bio.size(); ++i) {
    const std::string& label = bio[i];
    if (label.size() >= 3 && (label[0] == 'B' || label[0] == 'I') && label[1] == '-') {
      std::string type = label.substr(2);
      bool continues = label[0] == 'I' && active && open.type == type;
      if (continues) {
        open.end = i + 1;
      } else {
        // B-X, or an orphan I-X repaired as a fresh span
        close();
        open = Span{type, i + 1, i + 1};
        active = true;
      }
    } else {
      close();
    }
  }
  close();
  return spans;
}

F1Scores ner_f1(const std::vector<std::vector<std::string>>& gold,
                const std::vector<std::vector<std::string>>& pred) {
  if (gold.size() != pred.size())
    throw std::runtime_error("ner_f1: sentence counts differ");
  std::size_t gold_total = 0, pred_total = 0, matched = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    auto g = extract_spans(gold[s]);
    auto p = extract_spans(pred[s]);
    gold_total += g.size();
    pred_total += p.size();
    std::multiset<std::tuple<std::string, std::size_t, std::size_t>> gset;
    for (const auto& sp : g) gset.insert({sp.type, sp.start, sp.end});
    for (const auto& sp : p) {
      auto it = gset.find({sp.type, sp.start, sp.end});
      if (it != gset.end()) {
        ++matched;
        gset.erase(it);
      }
    }
  }
  F1Scores out;
  if (gold_total == 0 && pred_total == 0) {
    out.precision = out.recall = out.f1 = 1.0;
    return out;
  }
  out.precision = pred_total == 0 ? 0.0 : static_cast<double>(matched) / pred_total;
  out.recall = gold_total == 0 ? 0.0 : static_cast<double>(matched) / gold_total;
  out.f1 = (out.precision + out.recall) == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

AttachmentScores attachment_scores(
    const std::vector<std::vector<int>>& gold_heads,
    const std::vector<std::vector<std::string>>& gold_rels,
    const std::vector<std::vector<int>>& pred_heads,
    const std::vector<std::vector<std::string>>& pred_rels,
    const std::vector<std::vector<std::string>>& gold_pos, bool exclude_punct) {
  if (gold_heads.size() != pred_heads.size() || gold_heads.size() != gold_rels.size() ||
      gold_heads.size() != pred_rels.size())
    throw std::runtime_error("attachment_scores: sentence counts differ");
  if (exclude_punct && gold_pos.size() != gold_heads.size())
    throw std::runtime_error("attachment_scores: punctuation exclusion needs gold POS");

  std::size_t total = 0, head_ok = 0, both_ok = 0;
  for (std::size_t s = 0; s < gold_heads.size(); ++s) {
    std::size_t n = gold_heads[s].size();
    if (pred_heads[s].size() != n || gold_rels[s].size() != n || pred_rels[s].size() != n)
      throw std::runtime_error("attachment_scores: token counts differ in sentence " +
                               std::to_string(s + 1));
    for (std::size_t i = 0; i < n; ++i) {
      if (exclude_punct && gold_pos[s][i] == "CH") continue;
      ++total;
      if (gold_heads[s][i] == pred_heads[s][i]) {
        ++head_ok;
        if (gold_rels[s][i] == pred_rels[s][i]) ++both_ok;
      }
    }
  }
  AttachmentScores out;
  out.counted_tokens = total;
  out.uas = total == 0 ? 1.0 : static_cast<double>(head_ok) / static_cast<double>(total);
  out.las = total == 0 ? 1.0 : static_cast<double>(both_ok) / static_cast<double>(total);
  return out;
}

}  // namespace jnlp
