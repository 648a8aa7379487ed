#include "jnlp/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "jnlp/leakage.h"
#include "jnlp/metrics.h"

namespace jnlp {

void TrainConfig::validate() const {
  if (lambda_pos < 0.0) throw std::runtime_error("lambda_pos must be >= 0");
  if (lambda_ner < 0.0) throw std::runtime_error("lambda_ner must be >= 0");
  if (lambda_pos + lambda_ner > 1.0)
    throw std::runtime_error("lambda_pos + lambda_ner must be <= 1");
  if (batch_size < 1) throw std::runtime_error("batch_size must be >= 1");
  if (lr <= 0.0) throw std::runtime_error("lr must be positive");
  if (clip_norm < 0.0) throw std::runtime_error("clip_norm must be >= 0");
}

std::vector<ScheduleStep> make_epoch_schedule(std::size_t pos_size,
                                              std::size_t ner_size,
                                              std::size_t dep_size,
                                              std::size_t batch_size, Rng& rng) {
  if (pos_size == 0 || ner_size == 0 || dep_size == 0)
    throw std::runtime_error("epoch schedule requires non-empty corpora");
  if (batch_size == 0) throw std::runtime_error("batch_size must be >= 1");

  std::size_t largest = std::max({pos_size, ner_size, dep_size});
  std::size_t steps = (largest + batch_size - 1) / batch_size;

  auto stream = [&](std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    rng.shuffle(v);
    return v;
  };
  std::vector<std::size_t> ps = stream(pos_size);
  std::vector<std::size_t> ns = stream(ner_size);
  std::vector<std::size_t> ds = stream(dep_size);
  std::size_t pi = 0, ni = 0, di = 0;

  auto draw = [&](const std::vector<std::size_t>& s, std::size_t& i,
                  std::size_t n) {
    if (i < s.size()) return s[i++];
    return rng.uniform_int(n);  // top-up with replacement once exhausted
  };

  std::vector<ScheduleStep> schedule(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    std::size_t chunk = std::min(batch_size, largest - t * batch_size);
    ScheduleStep& step = schedule[t];
    for (std::size_t b = 0; b < chunk; ++b) step.pos.push_back(draw(ps, pi, pos_size));
    for (std::size_t b = 0; b < chunk; ++b) step.ner.push_back(draw(ns, ni, ner_size));
    for (std::size_t b = 0; b < chunk; ++b) step.dep.push_back(draw(ds, di, dep_size));
  }
  return schedule;
}

Scores evaluate_model(const JointModel& model, const Corpus& pos,
                      const Corpus& ner, const Corpus& dep,
                      bool exclude_punct) {
  Scores out;

  std::vector<std::vector<std::string>> pos_gold, pos_pred;
  for (const Sentence& s : pos.sentences) {
    std::vector<std::string> gold;
    for (const Token& t : s.tokens) gold.push_back(t.pos);
    pos_gold.push_back(std::move(gold));
    pos_pred.push_back(model.predict_pos(s));
  }
  out.pos_acc = pos_accuracy(pos_gold, pos_pred);

  std::vector<std::vector<std::string>> ner_gold, ner_pred;
  for (const Sentence& s : ner.sentences) {
    std::vector<std::string> gold;
    for (const Token& t : s.tokens) gold.push_back(t.ner);
    ner_gold.push_back(std::move(gold));
    ner_pred.push_back(model.predict_ner(s));
  }
  out.ner_f1 = ner_f1(ner_gold, ner_pred).f1;

  std::vector<std::vector<int>> heads_gold, heads_pred;
  std::vector<std::vector<std::string>> rels_gold, rels_pred, dep_pos;
  for (const Sentence& s : dep.sentences) {
    std::vector<int> gh;
    std::vector<std::string> gr, gp;
    for (const Token& t : s.tokens) {
      gh.push_back(t.head);
      gr.push_back(t.deprel);
      gp.push_back(t.pos);
    }
    heads_gold.push_back(std::move(gh));
    rels_gold.push_back(std::move(gr));
    dep_pos.push_back(std::move(gp));
    auto [ph, pr] = model.predict_dep(s);
    heads_pred.push_back(std::move(ph));
    rels_pred.push_back(std::move(pr));
  }
  AttachmentScores att = attachment_scores(heads_gold, rels_gold, heads_pred,
                                           rels_pred, dep_pos, exclude_punct);
  out.uas = att.uas;
  out.las = att.las;
  return out;
}

Trainer::Trainer(JointModel& model, const TrainConfig& config)
    : model_(model), config_(config), rng_(config.seed) {
  config_.validate();
  opt_.lr = config_.lr;
}

double Trainer::task_pass(
    const std::vector<const Sentence*>& batch,
    TensorPtr (JointModel::*loss_fn)(Graph&, const Sentence&) const,
    double weight) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  double seed = weight / static_cast<double>(batch.size());
  for (const Sentence* s : batch) {
    Graph g;
    TensorPtr loss = (model_.*loss_fn)(g, *s);
    total += loss->scalar();
    if (weight != 0.0) g.backward(loss, seed);
  }
  return total / static_cast<double>(batch.size());
}

LossBreakdown Trainer::accumulate_gradients(
    const std::vector<const Sentence*>& pos_batch,
    const std::vector<const Sentence*>& ner_batch,
    const std::vector<const Sentence*>& dep_batch) {
  LossBreakdown bd;
  bd.pos = task_pass(pos_batch, &JointModel::pos_loss, config_.lambda_pos);
  bd.ner = task_pass(ner_batch, &JointModel::ner_loss, config_.lambda_ner);
  bd.dep = task_pass(dep_batch, &JointModel::dep_loss, config_.lambda_dep());
  bd.combined = config_.lambda_pos * bd.pos + config_.lambda_ner * bd.ner +
                config_.lambda_dep() * bd.dep;
  return bd;
}

LossBreakdown Trainer::train_step(
    const std::vector<const Sentence*>& pos_batch,
    const std::vector<const Sentence*>& ner_batch,
    const std::vector<const Sentence*>& dep_batch) {
  LossBreakdown bd = accumulate_gradients(pos_batch, ner_batch, dep_batch);
  if (!std::isfinite(bd.pos) || !std::isfinite(bd.ner) ||
      !std::isfinite(bd.dep) || !std::isfinite(bd.combined)) {
    std::ostringstream msg;
    msg << "non-finite loss at step " << step_ << ": L_POS=" << bd.pos
        << " L_NER=" << bd.ner << " L_DEP=" << bd.dep;
    throw std::runtime_error(msg.str());
  }
  if (config_.clip_norm > 0.0) model_.store().clip_grad_norm(config_.clip_norm);
  model_.store().adamw_step(opt_);
  model_.store().zero_grad();
  ++step_;
  return bd;
}

namespace {

std::vector<const Sentence*> pick(const Corpus& c,
                                  const std::vector<std::size_t>& indices) {
  std::vector<const Sentence*> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(&c.sentences[i]);
  return out;
}

void warn_leakage(const TaskCorpora& corpora, std::ostream* log) {
  if (!log) return;
  Splits pos{corpora.pos_train, corpora.pos_valid, corpora.pos_test};
  Splits ner{corpora.ner_train, corpora.ner_valid, corpora.ner_test};
  Splits dep{corpora.dep_train, corpora.dep_valid, corpora.dep_test};
  LeakageReport report = audit(pos, ner, dep);
  for (const OverlapEntry& e : report.overlaps) {
    if (e.overlap_count == 0) continue;
    (*log) << "warning: " << e.source << " shares " << e.overlap_count
           << " sentences (" << e.percent << "%) with " << e.target << "\n";
  }
}

}  // namespace

Scores Trainer::train(const TaskCorpora& corpora, std::ostream* log) {
  config_.validate();
  if (corpora.pos_train.sentences.empty() ||
      corpora.ner_train.sentences.empty() ||
      corpora.dep_train.sentences.empty())
    throw std::runtime_error("training requires non-empty POS, NER, and DEP corpora");
  warn_leakage(corpora, log);

  auto evaluate = [&] {
    return evaluate_model(model_, corpora.pos_valid, corpora.ner_valid,
                          corpora.dep_valid, config_.exclude_punct);
  };

  if (config_.epochs == 0) {
    Scores s = evaluate();
    if (log)
      (*log) << "epoch 0 (no training) pos_acc=" << s.pos_acc
             << " ner_f1=" << s.ner_f1 << " las=" << s.las
             << " avg=" << s.average() << "\n";
    return s;
  }

  Scores best;
  double best_avg = -1.0;
  std::vector<std::vector<double>> best_params;
  for (std::size_t epoch = 1; epoch <= config_.epochs; ++epoch) {
    auto schedule = make_epoch_schedule(
        corpora.pos_train.sentences.size(), corpora.ner_train.sentences.size(),
        corpora.dep_train.sentences.size(), config_.batch_size, rng_);
    double ep_pos = 0.0, ep_ner = 0.0, ep_dep = 0.0;
    for (const ScheduleStep& step : schedule) {
      LossBreakdown bd = train_step(pick(corpora.pos_train, step.pos),
                                    pick(corpora.ner_train, step.ner),
                                    pick(corpora.dep_train, step.dep));
      ep_pos += bd.pos;
      ep_ner += bd.ner;
      ep_dep += bd.dep;
    }
    double n = static_cast<double>(schedule.size());
    ep_pos /= n;
    ep_ner /= n;
    ep_dep /= n;

    bool last = epoch == config_.epochs;
    if (config_.eval_each_epoch || last) {
      Scores s = evaluate();
      if (log)
        (*log) << "epoch " << epoch << " L_POS=" << ep_pos << " L_NER=" << ep_ner
               << " L_DEP=" << ep_dep << " pos_acc=" << s.pos_acc
               << " ner_f1=" << s.ner_f1 << " las=" << s.las
               << " avg=" << s.average() << "\n";
      if (s.average() > best_avg) {
        best_avg = s.average();
        best = s;
        best_params = model_.store().snapshot();
      }
    } else if (log) {
      (*log) << "epoch " << epoch << " L_POS=" << ep_pos << " L_NER=" << ep_ner
             << " L_DEP=" << ep_dep << "\n";
    }
  }
  model_.store().restore(best_params);
  return best;
}

GridOutcome grid_search(const TrainConfig& base, const TaskCorpora& corpora,
                        const ModelFactory& factory, std::ostream* log) {
  std::vector<double> lrs = base.grid_lr.empty() ? std::vector<double>{base.lr}
                                                 : base.grid_lr;
  std::vector<double> l1s = base.grid_lambda_pos.empty()
                                ? std::vector<double>{base.lambda_pos}
                                : base.grid_lambda_pos;
  std::vector<double> l2s = base.grid_lambda_ner.empty()
                                ? std::vector<double>{base.lambda_ner}
                                : base.grid_lambda_ner;

  GridOutcome out;
  double best_avg = -1.0;
  for (double lr : lrs)
    for (double l1 : l1s)
      for (double l2 : l2s) {
        GridRow row;
        row.lr = lr;
        row.lambda_pos = l1;
        row.lambda_ner = l2;
        TrainConfig cfg = base;
        cfg.lr = lr;
        cfg.lambda_pos = l1;
        cfg.lambda_ner = l2;
        cfg.grid_lr.clear();
        cfg.grid_lambda_pos.clear();
        cfg.grid_lambda_ner.clear();
        if (l1 < 0.0 || l2 < 0.0 || l1 + l2 > 1.0) {
          row.skipped = true;
          if (log)
            (*log) << "warning: skipping grid point lr=" << lr
                   << " lambda_pos=" << l1 << " lambda_ner=" << l2
                   << " (weights violate lambda_pos + lambda_ner <= 1)\n";
          out.table.push_back(row);
          continue;
        }
        auto model = factory(cfg.seed);
        Trainer trainer(*model, cfg);
        row.scores = trainer.train(corpora, log);
        if (log)
          (*log) << "grid lr=" << lr << " lambda_pos=" << l1
                 << " lambda_ner=" << l2 << " avg=" << row.scores.average()
                 << "\n";
        out.table.push_back(row);
        if (row.scores.average() > best_avg) {
          best_avg = row.scores.average();
          out.best = row;
          out.model = std::move(model);
        }
      }
  if (!out.model) throw std::runtime_error("grid search ran no valid combination");
  return out;
}

MultiSeedOutcome multi_seed(const TrainConfig& base, const TaskCorpora& corpora,
                            const ModelFactory& factory,
                            const std::vector<std::uint64_t>& seeds,
                            std::ostream* log) {
  if (seeds.empty()) throw std::runtime_error("multi_seed requires at least one seed");
  MultiSeedOutcome out;
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = base;
    cfg.seed = seed;
    auto model = factory(seed);
    Trainer trainer(*model, cfg);
    trainer.train(corpora, log);
    SeedRow row;
    row.seed = seed;
    row.scores = evaluate_model(*model, corpora.pos_test, corpora.ner_test,
                                corpora.dep_test, cfg.exclude_punct);
    if (log)
      (*log) << "seed " << seed << " pos_acc=" << row.scores.pos_acc
             << " ner_f1=" << row.scores.ner_f1 << " uas=" << row.scores.uas
             << " las=" << row.scores.las << "\n";
    out.rows.push_back(row);
  }

  double n = static_cast<double>(out.rows.size());
  auto stats = [&](auto field) {
    double mean = 0.0;
    for (const SeedRow& r : out.rows) mean += field(r.scores);
    mean /= n;
    double var = 0.0;
    for (const SeedRow& r : out.rows) {
      double d = field(r.scores) - mean;
      var += d * d;
    }
    return std::pair<double, double>(mean, std::sqrt(var / n));
  };
  auto [pm, ps] = stats([](const Scores& s) { return s.pos_acc; });
  auto [nm, nst] = stats([](const Scores& s) { return s.ner_f1; });
  auto [um, us] = stats([](const Scores& s) { return s.uas; });
  auto [lm, ls] = stats([](const Scores& s) { return s.las; });
  out.mean = Scores{pm, nm, um, lm};
  out.stdev = Scores{ps, nst, us, ls};
  return out;
}

}  // namespace jnlp
