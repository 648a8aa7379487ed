#include "jnlp/bpe.h"

#include <sstream>
#include <stdexcept>

#include "jnlp/corpus.h"
#include "jnlp/util.h"

namespace jnlp {

namespace {

std::vector<std::string> merge_once(const std::vector<std::string>& units,
                                    const std::pair<std::string, std::string>& pair) {
  std::vector<std::string> out;
  out.reserve(units.size());
  std::size_t i = 0;
  while (i < units.size()) {
    if (i + 1 < units.size() && units[i] == pair.first && units[i + 1] == pair.second) {
      out.push_back(units[i] + units[i + 1]);
      i += 2;
    } else {
      out.push_back(units[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> BpeTable::apply(const std::string& word) const {
  std::vector<std::string> units = utf8_chars(word);
  for (const auto& pair : merges) {
    if (units.size() < 2) break;
    units = merge_once(units, pair);
  }
  return units;
}

void BpeTable::save(const std::string& path) const {
  std::string body;
  for (const auto& [a, b] : merges) body += a + " " + b + "\n";
  write_text_file(path, body);
}

BpeTable BpeTable::load(const std::string& path) {
  BpeTable table;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto parts = split_ws(line);
    if (parts.size() != 2)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": merge line needs exactly 2 units");
    table.merges.emplace_back(parts[0], parts[1]);
  }
  return table;
}

BpeTable train_bpe(const std::map<std::string, std::size_t>& word_freq,
                   std::size_t merges) {
  std::vector<std::pair<std::vector<std::string>, std::size_t>> words;
  words.reserve(word_freq.size());
  for (const auto& [form, count] : word_freq)
    words.emplace_back(utf8_chars(form), count);

  BpeTable table;
  for (std::size_t step = 0; step < merges; ++step) {
    std::map<std::pair<std::string, std::string>, std::size_t> pair_freq;
    for (const auto& [units, count] : words)
      for (std::size_t i = 0; i + 1 < units.size(); ++i)
        pair_freq[{units[i], units[i + 1]}] += count;
    if (pair_freq.empty()) break;

    // Highest frequency wins; ties go to the lexicographically smallest
    // pair, which map iteration order visits first.
    std::pair<std::string, std::string> best;
    std::size_t best_count = 0;
    for (const auto& [pair, count] : pair_freq) {
      if (count > best_count) {
        best = pair;
        best_count = count;
      }
    }
    table.merges.push_back(best);
    for (auto& [units, count] : words)
      if (units.size() >= 2) units = merge_once(units, best);
  }
  return table;
}

BpeTable train_bpe(const Corpus& corpus, std::size_t merges) {
  if (corpus.sentences.empty()) throw std::runtime_error("train_bpe: empty corpus");
  std::map<std::string, std::size_t> freq;
  for (const auto& sent : corpus.sentences)
    for (const auto& tok : sent.tokens) ++freq[tok.form];
  return train_bpe(freq, merges);
}

}  // namespace jnlp
