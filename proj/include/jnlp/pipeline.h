// File-level annotation over a frozen model: one tokenized sentence per
// input line in, six-column annotated output out; plus wall-clock throughput
// measurement.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "jnlp/model.h"

namespace jnlp {

// Input: one sentence per line, words space-separated (compounds joined with
// underscores upstream). Empty lines are skipped with a warning. Output:
// index, form, POS, NER, head, deprel columns, blank line between sentences.
// Returns the number of sentences annotated.
std::size_t annotate_file(const JointModel& model, const std::string& input_file,
                          const std::string& output_file,
                          std::vector<std::string>* warnings = nullptr);

struct BenchResult {
  double sentences_per_second = 0.0;
  double mean_tokens_per_sentence = 0.0;
  std::size_t sentences = 0;
  std::size_t batch_size = 0;
};

// Times full joint annotation (no output written). Empty corpus reports zero
// throughput with a warning.
BenchResult bench(const JointModel& model, const std::string& input_file,
                  std::size_t batch_size,
                  std::vector<std::string>* warnings = nullptr);

}  // namespace jnlp
