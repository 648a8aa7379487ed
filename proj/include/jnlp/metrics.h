// Evaluation metrics: token-level POS accuracy, span-level NER F1 over BIO
// labels, and unlabeled/labeled attachment scores.
#pragma once

#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

namespace jnlp {

struct Span {
  std::string type;
  std::size_t start = 0;  // 1-based, inclusive
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
  bool operator<(const Span& o) const {
    return std::tie(start, end, type) < std::tie(o.start, o.end, o.type);
  }
};

struct F1Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct AttachmentScores {
  double uas = 0.0;
  double las = 0.0;
  std::size_t counted_tokens = 0;
};

// Token-level exact match over all sentences; lengths must align.
double pos_accuracy(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& pred);

// Maximal B-X (I-X)* runs; an I-X without an open X span is repaired to B-X.
std::vector<Span> extract_spans(const std::vector<std::string>& bio);

// Micro-averaged exact-span match. Both sides empty corpus-wide scores 1.
F1Scores ner_f1(const std::vector<std::vector<std::string>>& gold,
                const std::vector<std::vector<std::string>>& pred);

// gold/pred per sentence: heads (0 = ROOT) and relations, aligned per token.
// exclude_punct drops tokens whose gold POS tag is "CH".
AttachmentScores attachment_scores(
    const std::vector<std::vector<int>>& gold_heads,
    const std::vector<std::vector<std::string>>& gold_rels,
    const std::vector<std::vector<int>>& pred_heads,
    const std::vector<std::vector<std::string>>& pred_rels,
    const std::vector<std::vector<std::string>>& gold_pos = {},
    bool exclude_punct = false);

}  // namespace jnlp
