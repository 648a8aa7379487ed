// Checkpoint directory: config + vocab files + BPE merges + parameter
// manifest/payload + validation scores. Load rebuilds an identical model.
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "jnlp/model.h"

namespace jnlp {

struct Scores {
  double pos_acc = 0.0;
  double ner_f1 = 0.0;
  double uas = 0.0;
  double las = 0.0;

  // Selection criterion: unweighted mean of POS accuracy, NER F1, and LAS.
  double average() const { return (pos_acc + ner_f1 + las) / 3.0; }
};

void save_checkpoint(const std::string& dir, const JointModel& model,
                     const Scores* scores = nullptr);
std::unique_ptr<JointModel> load_checkpoint(const std::string& dir);
std::optional<Scores> load_scores(const std::string& dir);

}  // namespace jnlp
