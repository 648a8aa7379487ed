// Cross-corpus sentence-leakage auditing, duplicate removal, and POS
// re-splitting so no POS training sentence appears in another task's
// validation or test split. Sentence identity is the exact form sequence.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "jnlp/corpus.h"

namespace jnlp {

// Forms joined by a single space after trimming; annotations ignored.
std::string sentence_key(const Sentence& s);

struct Splits {
  Corpus train, valid, test;
};

struct OverlapEntry {
  std::string source;  // e.g. "ner-valid"
  std::string target;  // e.g. "pos-train"
  std::size_t overlap_count = 0;
  std::size_t source_size = 0;
  double percent = 0.0;  // of source covered by target
  std::vector<std::string> keys;
};

struct LeakageReport {
  std::vector<OverlapEntry> overlaps;
  std::map<std::string, std::size_t> duplicate_groups;  // key -> occurrences (>= 2)
  std::size_t duplicate_extra = 0;  // removable occurrences in POS train

  std::string to_text() const;
  std::string to_json() const;
};

// Reports, for each NER/DEP valid/test split, the fraction of its sentences
// present in POS train, plus duplicate groups within POS train.
LeakageReport audit(const Splits& pos, const Splits& ner, const Splits& dep);

// Keeps the first occurrence of each key, in order.
std::pair<Corpus, std::size_t> deduplicate(const Corpus& corpus);

// POS valid = sentences keyed into (NER-valid ∪ DEP-valid); test analogous;
// a key in both unions goes to test (with a warning via warnings out-param);
// the rest is train. strict errors when a NER/DEP valid/test sentence has no
// POS counterpart.
Splits resplit_pos(const Corpus& pos_all, const Splits& ner, const Splits& dep,
                   bool strict, std::vector<std::string>* warnings = nullptr);

}  // namespace jnlp
