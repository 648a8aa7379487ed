#include "jnlp/cli.h"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jnlp/bpe.h"
#include "jnlp/checkpoint.h"
#include "jnlp/corpus.h"
#include "jnlp/leakage.h"
#include "jnlp/model.h"
#include "jnlp/pipeline.h"
#include "jnlp/trainer.h"
#include "jnlp/util.h"

namespace jnlp {

namespace {

struct CliOptions {
  std::string mode;
  std::string save_dir;
  std::string input_file;
  std::string output_file;

  std::string pos_train, pos_valid, pos_test;
  std::string ner_train, ner_valid, ner_test;
  std::string dep_train, dep_valid, dep_test;
  std::string joint_train, joint_valid, joint_test;

  TrainConfig train;
  std::vector<std::uint64_t> seeds;

  std::size_t dim = 64;
  std::size_t layers = 2;
  std::size_t bpe_merges = 200;
  std::size_t min_count = 1;
  std::string embedding_file;
  bool hard_tags = false;
  bool strict = false;
  bool batch_size_given = false;
};

void append(Corpus& dst, const Corpus& src) {
  dst.sentences.insert(dst.sentences.end(), src.sentences.begin(),
                       src.sentences.end());
}

Corpus load_or_empty(const std::string& path, Task schema) {
  if (path.empty()) return Corpus{{}, schema};
  return read_column_file(path, schema);
}

// Joint files feed all three tasks.
TaskCorpora load_corpora(const CliOptions& o) {
  TaskCorpora c;
  c.pos_train = load_or_empty(o.pos_train, Task::POS);
  c.pos_valid = load_or_empty(o.pos_valid, Task::POS);
  c.pos_test = load_or_empty(o.pos_test, Task::POS);
  c.ner_train = load_or_empty(o.ner_train, Task::NER);
  c.ner_valid = load_or_empty(o.ner_valid, Task::NER);
  c.ner_test = load_or_empty(o.ner_test, Task::NER);
  c.dep_train = load_or_empty(o.dep_train, Task::DEP);
  c.dep_valid = load_or_empty(o.dep_valid, Task::DEP);
  c.dep_test = load_or_empty(o.dep_test, Task::DEP);

  auto spread = [&](const std::string& path, Corpus& pos, Corpus& ner,
                    Corpus& dep) {
    if (path.empty()) return;
    Corpus j = read_column_file(path, Task::JOINT);
    append(pos, j);
    append(ner, j);
    append(dep, j);
  };
  spread(o.joint_train, c.pos_train, c.ner_train, c.dep_train);
  spread(o.joint_valid, c.pos_valid, c.ner_valid, c.dep_valid);
  spread(o.joint_test, c.pos_test, c.ner_test, c.dep_test);
  return c;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void print_scores(std::ostream& out, const std::string& tag, const Scores& s) {
  out << tag << " pos_acc=" << s.pos_acc << " ner_f1=" << s.ner_f1
      << " uas=" << s.uas << " las=" << s.las << " avg=" << s.average()
      << "\n";
}

int do_train(CliOptions& o) {
  require(!o.save_dir.empty() || o.seeds.size() > 1,
          "train mode needs --save_dir");
  if (o.seeds.size() == 1) o.train.seed = o.seeds[0];
  o.train.validate();

  TaskCorpora corpora = load_corpora(o);
  require(!corpora.pos_train.sentences.empty() &&
              !corpora.ner_train.sentences.empty() &&
              !corpora.dep_train.sentences.empty(),
          "train mode needs POS, NER, and DEP training data "
          "(--pos-train/--ner-train/--dep-train or --joint-train)");

  Corpus merged;
  append(merged, corpora.pos_train);
  append(merged, corpora.ner_train);
  append(merged, corpora.dep_train);
  BpeTable bpe = train_bpe(merged, o.bpe_merges);
  Vocabs vocabs = build_vocabs(merged, o.min_count, &bpe);

  ModelConfig mc;
  mc.encoder.kind = o.embedding_file.empty() ? EncoderKind::DeskScale
                                             : EncoderKind::ExternalPrecomputed;
  mc.encoder.dim = o.dim;
  mc.encoder.layers = o.layers;
  mc.hard_tags = o.hard_tags;
  mc.embedding_file = o.embedding_file;

  ModelFactory factory = [mc, vocabs, bpe](std::uint64_t seed) {
    return std::make_unique<JointModel>(mc, vocabs, bpe, seed);
  };

  if (o.seeds.size() > 1) {
    MultiSeedOutcome out =
        multi_seed(o.train, corpora, factory, o.seeds, &std::cerr);
    for (const SeedRow& row : out.rows)
      print_scores(std::cout, "seed " + std::to_string(row.seed), row.scores);
    print_scores(std::cout, "mean", out.mean);
    print_scores(std::cout, "stdev", out.stdev);
    return 0;
  }

  bool grid = !o.train.grid_lr.empty() || !o.train.grid_lambda_pos.empty() ||
              !o.train.grid_lambda_ner.empty();
  if (grid) {
    GridOutcome out = grid_search(o.train, corpora, factory, &std::cerr);
    for (const GridRow& row : out.table) {
      std::cout << "grid lr=" << row.lr << " lambda_pos=" << row.lambda_pos
                << " lambda_ner=" << row.lambda_ner;
      if (row.skipped)
        std::cout << " skipped\n";
      else
        std::cout << " avg=" << row.scores.average() << "\n";
    }
    std::cout << "best lr=" << out.best.lr
              << " lambda_pos=" << out.best.lambda_pos
              << " lambda_ner=" << out.best.lambda_ner << "\n";
    save_checkpoint(o.save_dir, *out.model, &out.best.scores);
    print_scores(std::cout, "valid", out.best.scores);
    return 0;
  }

  std::unique_ptr<JointModel> model = factory(o.train.seed);
  Trainer trainer(*model, o.train);
  Scores scores = trainer.train(corpora, &std::cerr);
  save_checkpoint(o.save_dir, *model, &scores);
  print_scores(std::cout, "valid", scores);
  return 0;
}

int do_eval(const CliOptions& o) {
  require(!o.save_dir.empty(), "eval mode needs --save_dir");
  std::unique_ptr<JointModel> model = load_checkpoint(o.save_dir);
  TaskCorpora c = load_corpora(o);

  bool any = false;
  if (!c.pos_valid.sentences.empty() || !c.ner_valid.sentences.empty() ||
      !c.dep_valid.sentences.empty()) {
    print_scores(std::cout, "valid",
                 evaluate_model(*model, c.pos_valid, c.ner_valid, c.dep_valid,
                                o.train.exclude_punct));
    any = true;
  }
  if (!c.pos_test.sentences.empty() || !c.ner_test.sentences.empty() ||
      !c.dep_test.sentences.empty()) {
    print_scores(std::cout, "test",
                 evaluate_model(*model, c.pos_test, c.ner_test, c.dep_test,
                                o.train.exclude_punct));
    any = true;
  }
  require(any, "eval mode needs at least one valid/test corpus flag");
  return 0;
}

int do_annotate(const CliOptions& o) {
  require(!o.save_dir.empty(), "annotate mode needs --save_dir");
  require(!o.input_file.empty(), "annotate mode needs --input_file");
  require(!o.output_file.empty(), "annotate mode needs --output_file");
  std::unique_ptr<JointModel> model = load_checkpoint(o.save_dir);
  std::vector<std::string> warnings;
  std::size_t n = annotate_file(*model, o.input_file, o.output_file, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "annotated " << n << " sentences\n";
  return 0;
}

int do_audit(const CliOptions& o) {
  TaskCorpora c = load_corpora(o);
  Splits pos{c.pos_train, c.pos_valid, c.pos_test};
  Splits ner{c.ner_train, c.ner_valid, c.ner_test};
  Splits dep{c.dep_train, c.dep_valid, c.dep_test};
  require(!pos.train.sentences.empty() || !pos.valid.sentences.empty() ||
              !pos.test.sentences.empty() || !ner.train.sentences.empty() ||
              !ner.valid.sentences.empty() || !ner.test.sentences.empty() ||
              !dep.train.sentences.empty() || !dep.valid.sentences.empty() ||
              !dep.test.sentences.empty(),
          "audit mode needs at least one corpus path flag");
  LeakageReport report = audit(pos, ner, dep);
  std::cout << report.to_text();
  if (!o.output_file.empty()) write_text_file(o.output_file, report.to_json());
  return 0;
}

int do_resplit(const CliOptions& o) {
  require(!o.save_dir.empty(), "resplit mode needs --save_dir");
  TaskCorpora c = load_corpora(o);
  Corpus pos_all = c.pos_train;
  append(pos_all, c.pos_valid);
  append(pos_all, c.pos_test);
  require(!pos_all.sentences.empty(),
          "resplit mode needs --pos-train or --joint-train");
  Splits ner{c.ner_train, c.ner_valid, c.ner_test};
  Splits dep{c.dep_train, c.dep_valid, c.dep_test};

  std::vector<std::string> warnings;
  Splits out = resplit_pos(pos_all, ner, dep, o.strict, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  std::filesystem::create_directories(o.save_dir);
  write_column_file(out.train, o.save_dir + "/pos-train.txt");
  write_column_file(out.valid, o.save_dir + "/pos-valid.txt");
  write_column_file(out.test, o.save_dir + "/pos-test.txt");
  std::cout << "resplit sizes: train=" << out.train.sentences.size()
            << " valid=" << out.valid.sentences.size()
            << " test=" << out.test.sentences.size() << "\n";
  return 0;
}

int do_bench(const CliOptions& o) {
  require(!o.save_dir.empty(), "bench mode needs --save_dir");
  require(!o.input_file.empty(), "bench mode needs --input_file");
  std::unique_ptr<JointModel> model = load_checkpoint(o.save_dir);
  std::size_t batch = o.batch_size_given ? o.train.batch_size : 8;
  std::vector<std::string> warnings;
  BenchResult r = bench(*model, o.input_file, batch, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "sentences/second: " << r.sentences_per_second << " (batch "
            << r.batch_size << ", mean tokens/sentence "
            << r.mean_tokens_per_sentence << ", " << r.sentences
            << " sentences)\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CliOptions o;
  CLI::App app{"joint POS tagging, named-entity recognition, and dependency parsing"};
  app.add_option("--mode", o.mode, "train|eval|annotate|audit|resplit|bench")
      ->required()
      ->check(CLI::IsMember(
          {"train", "eval", "annotate", "audit", "resplit", "bench"}));
  app.add_option("--save_dir", o.save_dir, "checkpoint directory");
  app.add_option("--input_file", o.input_file,
                 "annotate/bench input: one tokenized sentence per line");
  app.add_option("--output_file", o.output_file, "annotate/audit output file");

  app.add_option("--pos-train", o.pos_train, "POS training corpus");
  app.add_option("--pos-valid", o.pos_valid, "POS validation corpus");
  app.add_option("--pos-test", o.pos_test, "POS test corpus");
  app.add_option("--ner-train", o.ner_train, "NER training corpus");
  app.add_option("--ner-valid", o.ner_valid, "NER validation corpus");
  app.add_option("--ner-test", o.ner_test, "NER test corpus");
  app.add_option("--dep-train", o.dep_train, "dependency training corpus");
  app.add_option("--dep-valid", o.dep_valid, "dependency validation corpus");
  app.add_option("--dep-test", o.dep_test, "dependency test corpus");
  app.add_option("--joint-train", o.joint_train,
                 "six-column corpus feeding all three tasks");
  app.add_option("--joint-valid", o.joint_valid, "six-column validation corpus");
  app.add_option("--joint-test", o.joint_test, "six-column test corpus");

  app.add_option("--lr", o.train.lr, "learning rate");
  app.add_option("--lambda-pos", o.train.lambda_pos, "POS loss weight");
  app.add_option("--lambda-ner", o.train.lambda_ner, "NER loss weight");
  auto* batch_opt =
      app.add_option("--batch-size", o.train.batch_size,
                     "training batch size (bench defaults to 8 instead)");
  app.add_option("--epochs", o.train.epochs, "training epochs");
  app.add_option("--seed", o.train.seed, "random seed");
  app.add_option("--seeds", o.seeds, "run once per seed, report mean and stdev");
  app.add_option("--grid-lr", o.train.grid_lr, "grid-search learning rates");
  app.add_option("--grid-lambda-pos", o.train.grid_lambda_pos,
                 "grid-search POS weights");
  app.add_option("--grid-lambda-ner", o.train.grid_lambda_ner,
                 "grid-search NER weights");
  app.add_flag("--eval-each-epoch,!--no-eval-each-epoch", o.train.eval_each_epoch,
               "evaluate on validation sets after every epoch");
  app.add_option("--clip-norm", o.train.clip_norm,
                 "max gradient norm, 0 disables clipping");
  app.add_flag("--exclude-punct", o.train.exclude_punct,
               "drop punctuation (gold POS CH) from attachment scores");

  app.add_option("--dim", o.dim, "encoder width");
  app.add_option("--layers", o.layers, "encoder self-attention layers");
  app.add_option("--bpe-merges", o.bpe_merges, "subword merge operations");
  app.add_option("--min-count", o.min_count, "word frequency cutoff");
  app.add_option("--embedding-file", o.embedding_file,
                 "frozen per-word vectors; switches the encoder to "
                 "precomputed mode");
  app.add_flag("--hard-tags", o.hard_tags,
               "feed one-hot argmax tags instead of the full distribution at "
               "inference");
  app.add_flag("--strict", o.strict,
               "resplit: error when a NER/DEP sentence has no POS counterpart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  o.batch_size_given = batch_opt->count() > 0;

  try {
    if (o.mode == "train") return do_train(o);
    if (o.mode == "eval") return do_eval(o);
    if (o.mode == "annotate") return do_annotate(o);
    if (o.mode == "audit") return do_audit(o);
    if (o.mode == "resplit") return do_resplit(o);
    return do_bench(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace jnlp
