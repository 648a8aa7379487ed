// Column-format corpora (POS, NER, DEP, JOINT schemas), vocabularies, and
// their file round trips. Canonical output is tab-separated; the reader also
// accepts runs of spaces. "_" marks a missing cell, "#" starts a comment.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace jnlp {

struct BpeTable;

enum class Task { POS, NER, DEP, JOINT };

std::string task_name(Task t);

struct AnnotationMask {
  bool pos = false;
  bool ner = false;
  bool dep = false;
};

struct Token {
  int index = 0;     // 1-based
  std::string form;
  std::string pos;   // empty = missing
  std::string ner;   // empty = missing
  int head = -1;     // -1 = missing, 0 = ROOT
  std::string deprel;
};

struct Sentence {
  std::vector<Token> tokens;
  AnnotationMask mask;
  std::size_t size() const { return tokens.size(); }
};

struct Corpus {
  std::vector<Sentence> sentences;
  Task task = Task::JOINT;
  std::size_t size() const { return sentences.size(); }
};

// Bidirectional string<->id map with dense ids. Vocabs with specials reserve
// <unk>=0 and <pad>=1 and encode unknown strings as <unk>; label vocabs have
// no specials and reject unknown strings.
class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kPad = 1;

  explicit Vocab(bool with_specials = false);

  int add(const std::string& s);  // inserts if absent, returns id
  int encode(const std::string& s) const;
  const std::string& decode(int id) const;
  bool contains(const std::string& s) const { return index_.count(s) != 0; }
  bool has_specials() const { return with_specials_; }
  std::size_t size() const { return items_.size(); }

  void save(const std::string& path) const;  // one entry per line
  static Vocab load(const std::string& path, bool with_specials);

 private:
  bool with_specials_;
  std::vector<std::string> items_;
  std::map<std::string, int> index_;
};

struct Vocabs {
  Vocab word{true};
  Vocab pos{false};
  Vocab ner{false};
  Vocab deprel{false};
  Vocab subword{true};
};

// Schemas: POS = form/tag, NER = form/label, DEP = index/form/pos/head/deprel,
// JOINT = index/form/pos/ner/head/deprel. Malformed input errors carry
// path:line. DEP/JOINT sentences must form a single-root tree.
Corpus read_column_file(const std::string& path, Task schema);
void write_column_file(const Corpus& corpus, const std::string& path);

// Word types below min_count map to <unk>; label vocabs keep every observed
// label; ner always contains "O". The subword vocab holds the units the BPE
// table produces on this corpus (characters when no table is given).
Vocabs build_vocabs(const Corpus& corpus, std::size_t min_count,
                    const BpeTable* bpe = nullptr);

// Throws unless heads (heads[i] = head of token i+1; 0 = ROOT) form a tree
// with exactly one root child and no cycles.
void validate_tree(const std::vector<int>& heads, const std::string& context);
bool is_single_root_tree(const std::vector<int>& heads);

}  // namespace jnlp
