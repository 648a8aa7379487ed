#include "jnlp/leakage.h"

#include <set>
#include <sstream>

#include "jnlp/util.h"

namespace jnlp {

namespace {

std::set<std::string> key_set(const Corpus& c) {
  std::set<std::string> keys;
  for (const auto& s : c.sentences) keys.insert(sentence_key(s));
  return keys;
}

OverlapEntry overlap_of(const std::string& source_name, const Corpus& source,
                        const std::string& target_name,
                        const std::set<std::string>& target_keys) {
  OverlapEntry e;
  e.source = source_name;
  e.target = target_name;
  e.source_size = source.size();
  std::set<std::string> seen;
  std::size_t hits = 0;
  for (const auto& s : source.sentences) {
    auto key = sentence_key(s);
    if (!target_keys.count(key)) continue;
    ++hits;
    if (seen.insert(key).second) e.keys.push_back(key);
  }
  e.overlap_count = e.keys.size();
  e.percent = source.size() == 0
                  ? 0.0
                  : 100.0 * static_cast<double>(hits) / static_cast<double>(source.size());
  return e;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string sentence_key(const Sentence& s) {
  std::vector<std::string> forms;
  forms.reserve(s.tokens.size());
  for (const auto& t : s.tokens) forms.push_back(trim(t.form));
  return join(forms, " ");
}

LeakageReport audit(const Splits& pos, const Splits& ner, const Splits& dep) {
  LeakageReport report;
  auto pos_train_keys = key_set(pos.train);
  report.overlaps.push_back(overlap_of("ner-valid", ner.valid, "pos-train", pos_train_keys));
  report.overlaps.push_back(overlap_of("ner-test", ner.test, "pos-train", pos_train_keys));
  report.overlaps.push_back(overlap_of("dep-valid", dep.valid, "pos-train", pos_train_keys));
  report.overlaps.push_back(overlap_of("dep-test", dep.test, "pos-train", pos_train_keys));

  std::map<std::string, std::size_t> counts;
  for (const auto& s : pos.train.sentences) ++counts[sentence_key(s)];
  for (const auto& [key, count] : counts) {
    if (count >= 2) {
      report.duplicate_groups[key] = count;
      report.duplicate_extra += count - 1;
    }
  }
  return report;
}

std::string LeakageReport::to_text() const {
  std::ostringstream out;
  out << "leakage audit\n";
  for (const auto& e : overlaps) {
    out << "  " << e.source << " in " << e.target << ": " << e.overlap_count << "/"
        << e.source_size << " sentences (";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", e.percent);
    out << buf << "%)\n";
  }
  out << "  duplicate groups in pos-train: " << duplicate_groups.size()
      << " (removable occurrences: " << duplicate_extra << ")\n";
  return out.str();
}

std::string LeakageReport::to_json() const {
  std::ostringstream out;
  out << "{\n  \"overlaps\": [\n";
  for (std::size_t i = 0; i < overlaps.size(); ++i) {
    const auto& e = overlaps[i];
    out << "    {\"source\": \"" << json_escape(e.source) << "\", \"target\": \""
        << json_escape(e.target) << "\", \"count\": " << e.overlap_count
        << ", \"size\": " << e.source_size << ", \"percent\": " << e.percent << "}"
        << (i + 1 < overlaps.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"duplicate_groups\": " << duplicate_groups.size()
      << ",\n  \"duplicate_extra\": " << duplicate_extra << "\n}\n";
  return out.str();
}

std::pair<Corpus, std::size_t> deduplicate(const Corpus& corpus) {
  Corpus out;
  out.task = corpus.task;
  std::set<std::string> seen;
  for (const auto& s : corpus.sentences)
    if (seen.insert(sentence_key(s)).second) out.sentences.push_back(s);
  return {out, corpus.size() - out.size()};
}

Splits resplit_pos(const Corpus& pos_all, const Splits& ner, const Splits& dep,
                   bool strict, std::vector<std::string>* warnings) {
  auto valid_keys = key_set(ner.valid);
  for (const auto& k : key_set(dep.valid)) valid_keys.insert(k);
  auto test_keys = key_set(ner.test);
  for (const auto& k : key_set(dep.test)) test_keys.insert(k);

  Splits out;
  out.train.task = out.valid.task = out.test.task = pos_all.task;
  std::set<std::string> pos_keys;
  for (const auto& s : pos_all.sentences) {
    auto key = sentence_key(s);
    pos_keys.insert(key);
    bool in_valid = valid_keys.count(key) != 0;
    bool in_test = test_keys.count(key) != 0;
    if (in_valid && in_test && warnings)
      warnings->push_back("sentence in both valid and test unions, assigned to test: '" +
                          key + "'");
    if (in_test) out.test.sentences.push_back(s);
    else if (in_valid) out.valid.sentences.push_back(s);
    else out.train.sentences.push_back(s);
  }

  if (strict) {
    auto missing = [&](const Corpus& c, const char* name) {
      for (const auto& s : c.sentences) {
        auto key = sentence_key(s);
        if (!pos_keys.count(key))
          throw std::runtime_error(std::string(name) +
                                   " sentence has no counterpart in the POS corpus: '" +
                                   key + "'");
      }
    };
    missing(ner.valid, "ner-valid");
    missing(ner.test, "ner-test");
    missing(dep.valid, "dep-valid");
    missing(dep.test, "dep-test");
  }
  return out;
}

}  // namespace jnlp
