// Joint multi-task training: weighted loss over three task batches per step,
// per-epoch resampling of unequal corpora, best-average-validation checkpoint
// retention, grid search, and multi-seed runs.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "jnlp/checkpoint.h"
#include "jnlp/corpus.h"
#include "jnlp/model.h"
#include "jnlp/optim.h"
#include "jnlp/util.h"

namespace jnlp {

struct TrainConfig {
  double lr = 1e-5;
  double lambda_pos = 0.4;
  double lambda_ner = 0.2;
  std::size_t batch_size = 32;
  std::size_t epochs = 40;
  std::uint64_t seed = 1;
  bool eval_each_epoch = true;  // false: evaluate only after the final epoch
  double clip_norm = 0.0;       // max grad norm; 0 disables clipping
  bool exclude_punct = false;   // attachment scoring option
  std::vector<double> grid_lr;
  std::vector<double> grid_lambda_pos;
  std::vector<double> grid_lambda_ner;

  double lambda_dep() const { return 1.0 - lambda_pos - lambda_ner; }
  // Throws naming the violated constraint.
  void validate() const;
};

struct LossBreakdown {
  double pos = 0.0;
  double ner = 0.0;
  double dep = 0.0;
  double combined = 0.0;  // lambda_pos*pos + lambda_ner*ner + lambda_dep*dep
};

// One step carries one batch of sentence indices per task.
struct ScheduleStep {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> ner;
  std::vector<std::size_t> dep;
};

// ceil(largest / batch_size) steps. The largest corpus is shuffled and
// consumed exactly once (its chunking sets every step's batch size); the
// smaller corpora are shuffled, consumed once, then topped up by uniform
// with-replacement draws so every step carries one batch per task.
std::vector<ScheduleStep> make_epoch_schedule(std::size_t pos_size,
                                              std::size_t ner_size,
                                              std::size_t dep_size,
                                              std::size_t batch_size, Rng& rng);

struct TaskCorpora {
  Corpus pos_train, pos_valid, pos_test;
  Corpus ner_train, ner_valid, ner_test;
  Corpus dep_train, dep_valid, dep_test;
};

// POS accuracy on `pos`, span F1 on `ner`, UAS/LAS on `dep`. An empty corpus
// scores 1 for its metric (vacuous truth), matching the metric contracts.
Scores evaluate_model(const JointModel& model, const Corpus& pos,
                      const Corpus& ner, const Corpus& dep,
                      bool exclude_punct = false);

class Trainer {
 public:
  Trainer(JointModel& model, const TrainConfig& config);

  // Forward + backward over the three batches; gradients are left in the
  // store (weight-scaled, batch-mean-scaled). Zero-weight tasks contribute
  // their loss value but no gradient.
  LossBreakdown accumulate_gradients(
      const std::vector<const Sentence*>& pos_batch,
      const std::vector<const Sentence*>& ner_batch,
      const std::vector<const Sentence*>& dep_batch);

  // accumulate_gradients + finiteness check + optional clip + AdamW step +
  // gradient zeroing.
  LossBreakdown train_step(const std::vector<const Sentence*>& pos_batch,
                           const std::vector<const Sentence*>& ner_batch,
                           const std::vector<const Sentence*>& dep_batch);

  // Runs the full schedule; keeps the parameters of the epoch whose
  // validation average (mean of POS acc, NER F1, LAS) is highest, restores
  // them into the model, and returns that epoch's scores. epochs = 0 returns
  // the initial parameters with their scores. Epoch lines and leakage
  // warnings go to `log` when non-null.
  Scores train(const TaskCorpora& corpora, std::ostream* log = nullptr);

  std::size_t steps_taken() const { return step_; }

 private:
  JointModel& model_;
  TrainConfig config_;
  AdamWConfig opt_;
  Rng rng_;
  std::size_t step_ = 0;

  double task_pass(const std::vector<const Sentence*>& batch,
                   TensorPtr (JointModel::*loss_fn)(Graph&, const Sentence&) const,
                   double weight);
};

using ModelFactory = std::function<std::unique_ptr<JointModel>(std::uint64_t seed)>;

struct GridRow {
  double lr = 0.0;
  double lambda_pos = 0.0;
  double lambda_ner = 0.0;
  Scores scores;
  bool skipped = false;  // invalid weight combination, not run
};

struct GridOutcome {
  std::vector<GridRow> table;  // one row per grid combination, in order
  GridRow best;                // highest validation average among runs
  std::unique_ptr<JointModel> model;  // the winning trained model
};

// Exhaustive product of the grid lists (missing lists fall back to the base
// single value). Combinations violating the weight constraints are skipped
// with a warning row.
GridOutcome grid_search(const TrainConfig& base, const TaskCorpora& corpora,
                        const ModelFactory& factory, std::ostream* log = nullptr);

struct SeedRow {
  std::uint64_t seed = 0;
  Scores scores;  // test-set scores of that seed's best checkpoint
};

struct MultiSeedOutcome {
  std::vector<SeedRow> rows;
  Scores mean;
  Scores stdev;  // population standard deviation per metric
};

MultiSeedOutcome multi_seed(const TrainConfig& base, const TaskCorpora& corpora,
                            const ModelFactory& factory,
                            const std::vector<std::uint64_t>& seeds,
                            std::ostream* log = nullptr);

}  // namespace jnlp
