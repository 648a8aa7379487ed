#include "jnlp/pipeline.h"

#include <chrono>

#include "jnlp/util.h"

namespace jnlp {

namespace {

// One Sentence per non-empty line; empty lines produce a warning.
std::vector<Sentence> read_tokenized_lines(const std::string& path,
                                           std::vector<std::string>* warnings) {
  std::string text = read_text_file(path);
  std::vector<std::string> lines = split_char(text, '\n');
  // A trailing newline yields one empty final field, not an empty input line.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::vector<Sentence> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> words = split_ws(line);
    if (words.empty()) {
      if (warnings)
        warnings->push_back(path + ":" + std::to_string(i + 1) +
                            ": empty line skipped");
      continue;
    }
    Sentence s;
    for (std::size_t w = 0; w < words.size(); ++w) {
      Token t;
      t.index = static_cast<int>(w + 1);
      t.form = words[w];
      s.tokens.push_back(std::move(t));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::size_t annotate_file(const JointModel& model, const std::string& input_file,
                          const std::string& output_file,
                          std::vector<std::string>* warnings) {
  std::vector<Sentence> inputs = read_tokenized_lines(input_file, warnings);
  Corpus annotated;
  annotated.task = Task::JOINT;
  for (const Sentence& s : inputs)
    annotated.sentences.push_back(model.annotate(s));
  write_column_file(annotated, output_file);
  return annotated.sentences.size();
}

BenchResult bench(const JointModel& model, const std::string& input_file,
                  std::size_t batch_size,
                  std::vector<std::string>* warnings) {
  std::vector<Sentence> inputs = read_tokenized_lines(input_file, warnings);
  BenchResult result;
  result.batch_size = batch_size;
  result.sentences = inputs.size();
  if (inputs.empty()) {
    if (warnings) warnings->push_back("bench: empty corpus, throughput 0");
    return result;
  }

  std::size_t tokens = 0;
  auto start = std::chrono::steady_clock::now();
  for (const Sentence& s : inputs) {
    Sentence a = model.annotate(s);
    tokens += a.tokens.size();
  }
  auto stop = std::chrono::steady_clock::now();
  double seconds = std::chrono::duration<double>(stop - start).count();
  if (seconds <= 0.0) seconds = 1e-9;

  result.sentences_per_second = static_cast<double>(inputs.size()) / seconds;
  result.mean_tokens_per_sentence =
      static_cast<double>(tokens) / static_cast<double>(inputs.size());
  return result;
}

}  // namespace jnlp
