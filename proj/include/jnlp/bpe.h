// Character-level byte-pair encoding: greedy pair merging learned from word
// frequencies, applied at inference in learned rank order.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace jnlp {

struct Corpus;

struct BpeTable {
  std::vector<std::pair<std::string, std::string>> merges;  // rank order

  // Splits a word into subword units by applying merges in rank order,
  // each left-to-right. Never fails; unseen characters stay single units.
  std::vector<std::string> apply(const std::string& word) const;

  // One space-separated pair per line, rank-ordered.
  void save(const std::string& path) const;
  static BpeTable load(const std::string& path);
};

// Learns `merges` greedy pair merges from token-form frequencies. Frequency
// ties pick the lexicographically smallest pair. Stops early when no pairs
// remain.
BpeTable train_bpe(const Corpus& corpus, std::size_t merges);
BpeTable train_bpe(const std::map<std::string, std::size_t>& word_freq, std::size_t merges);

}  // namespace jnlp
