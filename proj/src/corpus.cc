#include "jnlp/corpus.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jnlp/bpe.h"
#include "jnlp/util.h"

namespace jnlp {

namespace {

[[noreturn]] void parse_error(const std::string& path, std::size_t line_no,
                              const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

bool valid_bio(const std::string& s) {
  if (s == "O") return true;
  if (s.size() < 3) return false;
  if (s[0] != 'B' && s[0] != 'I') return false;
  return s[1] == '-';
}

AnnotationMask mask_for(Task schema) {
  AnnotationMask m;
  switch (schema) {
    case Task::POS: m.pos = true; break;
    case Task::NER: m.ner = true; break;
    case Task::DEP: m.dep = true; break;
    case Task::JOINT: m.pos = m.ner = m.dep = true; break;
  }
  return m;
}

int parse_int(const std::string& s, const std::string& path, std::size_t line_no,
              const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    parse_error(path, line_no, std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

std::string cell(const std::string& s) { return s == "_" ? "" : s; }

}  // namespace

std::string task_name(Task t) {
  switch (t) {
    case Task::POS: return "pos";
    case Task::NER: return "ner";
    case Task::DEP: return "dep";
    case Task::JOINT: return "joint";
  }
  return "?";
}

Vocab::Vocab(bool with_specials) : with_specials_(with_specials) {
  if (with_specials_) {
    add("<unk>");
    add("<pad>");
  }
}

int Vocab::add(const std::string& s) {
  auto it = index_.find(s);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(items_.size());
  items_.push_back(s);
  index_[s] = id;
  return id;
}

int Vocab::encode(const std::string& s) const {
  auto it = index_.find(s);
  if (it != index_.end()) return it->second;
  if (with_specials_) return kUnk;
  throw std::runtime_error("label not in vocabulary: '" + s + "'");
}

const std::string& Vocab::decode(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= items_.size())
    throw std::runtime_error("vocabulary id out of range: " + std::to_string(id));
  return items_[id];
}

void Vocab::save(const std::string& path) const {
  std::string body;
  for (const auto& s : items_) {
    body += s;
    body += "\n";
  }
  write_text_file(path, body);
}

Vocab Vocab::load(const std::string& path, bool with_specials) {
  Vocab v(false);
  v.with_specials_ = with_specials;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    v.add(line);
  }
  if (with_specials &&
      (v.size() < 2 || v.items_[0] != "<unk>" || v.items_[1] != "<pad>"))
    throw std::runtime_error("vocabulary file lacks specials: " + path);
  return v;
}

bool is_single_root_tree(const std::vector<int>& heads) {
  std::size_t n = heads.size();
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int h = heads[i];
    if (h < 0 || h > static_cast<int>(n)) return false;
    if (h == static_cast<int>(i) + 1) return false;
    if (h == 0) ++roots;
  }
  if (roots != 1) return false;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i + 1, hops = 0;
    while (cur != 0) {
      cur = static_cast<std::size_t>(heads[cur - 1]);
      if (++hops > n) return false;
    }
  }
  return true;
}

void validate_tree(const std::vector<int>& heads, const std::string& context) {
  std::size_t n = heads.size();
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int h = heads[i];
    if (h < 0 || h > static_cast<int>(n))
      throw std::runtime_error(context + ": head index out of range for token " +
                               std::to_string(i + 1));
    if (h == static_cast<int>(i) + 1)
      throw std::runtime_error(context + ": token " + std::to_string(i + 1) +
                               " is its own head");
    if (h == 0) ++roots;
  }
  if (roots != 1)
    throw std::runtime_error(context + ": tree has " + std::to_string(roots) +
                             " root children (need exactly 1)");
  if (!is_single_root_tree(heads))
    throw std::runtime_error(context + ": head cycle detected");
}

Corpus read_column_file(const std::string& path, Task schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  Corpus corpus;
  corpus.task = schema;
  Sentence sent;
  sent.mask = mask_for(schema);
  std::size_t line_no = 0, sent_start = 0;

  auto finish_sentence = [&]() {
    if (sent.tokens.empty()) return;
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      if (sent.tokens[i].index != static_cast<int>(i) + 1)
        parse_error(path, sent_start,
                    "token indices not contiguous from 1 in sentence");
    }
    if (sent.mask.dep) {
      std::vector<int> heads;
      heads.reserve(sent.tokens.size());
      for (const auto& t : sent.tokens) heads.push_back(t.head);
      validate_tree(heads, path + ": sentence at line " + std::to_string(sent_start));
    }
    corpus.sentences.push_back(std::move(sent));
    sent = Sentence{};
    sent.mask = mask_for(schema);
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = trim(line);
    if (stripped.empty()) {
      finish_sentence();
      continue;
    }
    if (stripped[0] == '#') continue;

    auto cols = split_ws(stripped);
    if (sent.tokens.empty()) sent_start = line_no;
    Token tok;
    switch (schema) {
      case Task::POS:
        if (cols.size() != 2) parse_error(path, line_no, "expected 2 columns (form, pos)");
        tok.index = static_cast<int>(sent.tokens.size()) + 1;
        tok.form = cols[0];
        tok.pos = cell(cols[1]);
        break;
      case Task::NER:
        if (cols.size() != 2) parse_error(path, line_no, "expected 2 columns (form, ner)");
        tok.index = static_cast<int>(sent.tokens.size()) + 1;
        tok.form = cols[0];
        tok.ner = cell(cols[1]);
        break;
      case Task::DEP:
        if (cols.size() != 5)
          parse_error(path, line_no, "expected 5 columns (index, form, pos, head, deprel)");
        tok.index = parse_int(cols[0], path, line_no, "token index");
        tok.form = cols[1];
        tok.pos = cell(cols[2]);
        tok.head = cols[3] == "_" ? -1 : parse_int(cols[3], path, line_no, "head index");
        tok.deprel = cell(cols[4]);
        break;
      case Task::JOINT:
        if (cols.size() != 6)
          parse_error(path, line_no,
                      "expected 6 columns (index, form, pos, ner, head, deprel)");
        tok.index = parse_int(cols[0], path, line_no, "token index");
        tok.form = cols[1];
        tok.pos = cell(cols[2]);
        tok.ner = cell(cols[3]);
        tok.head = cols[4] == "_" ? -1 : parse_int(cols[4], path, line_no, "head index");
        tok.deprel = cell(cols[5]);
        break;
    }
    if (!tok.ner.empty() && !valid_bio(tok.ner))
      parse_error(path, line_no, "invalid BIO label: '" + tok.ner + "'");
    if (tok.form.empty()) parse_error(path, line_no, "empty form");
    sent.tokens.push_back(std::move(tok));
  }
  finish_sentence();
  return corpus;
}

void write_column_file(const Corpus& corpus, const std::string& path) {
  std::ostringstream out;
  auto put = [&](const std::string& s) { out << (s.empty() ? "_" : s); };
  for (const auto& sent : corpus.sentences) {
    for (const auto& tok : sent.tokens) {
      switch (corpus.task) {
        case Task::POS:
          put(tok.form);
          out << "\t";
          put(tok.pos);
          break;
        case Task::NER:
          put(tok.form);
          out << "\t";
          put(tok.ner);
          break;
        case Task::DEP:
          out << tok.index << "\t";
          put(tok.form);
          out << "\t";
          put(tok.pos);
          out << "\t";
          if (tok.head < 0) out << "_";
          else out << tok.head;
          out << "\t";
          put(tok.deprel);
          break;
        case Task::JOINT:
          out << tok.index << "\t";
          put(tok.form);
          out << "\t";
          put(tok.pos);
          out << "\t";
          put(tok.ner);
          out << "\t";
          if (tok.head < 0) out << "_";
          else out << tok.head;
          out << "\t";
          put(tok.deprel);
          break;
      }
      out << "\n";
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

Vocabs build_vocabs(const Corpus& corpus, std::size_t min_count, const BpeTable* bpe) {
  if (corpus.sentences.empty()) throw std::runtime_error("build_vocabs: empty corpus");
  Vocabs v;
  v.ner.add("O");

  std::map<std::string, std::size_t> freq;
  for (const auto& sent : corpus.sentences) {
    for (const auto& tok : sent.tokens) {
      ++freq[tok.form];
      if (!tok.pos.empty()) v.pos.add(tok.pos);
      if (!tok.ner.empty()) v.ner.add(tok.ner);
      if (!tok.deprel.empty()) v.deprel.add(tok.deprel);
    }
  }
  for (const auto& [form, count] : freq)
    if (count >= min_count) v.word.add(form);

  BpeTable chars;  // empty table splits into single characters
  const BpeTable& table = bpe ? *bpe : chars;
  for (const auto& [form, count] : freq)
    for (const auto& unit : table.apply(form)) v.subword.add(unit);
  return v;
}

}  // namespace jnlp
