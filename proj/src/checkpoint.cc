#include "jnlp/checkpoint.h"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "jnlp/util.h"

namespace jnlp {

namespace fs = std::filesystem;
using nlohmann::json;

void save_checkpoint(const std::string& dir, const JointModel& model,
                     const Scores* scores) {
  fs::create_directories(dir);
  const auto& cfg = model.config();

  json config;
  config["encoder_kind"] =
      cfg.encoder.kind == EncoderKind::DeskScale ? "desk" : "precomputed";
  config["dim"] = cfg.encoder.dim;
  config["layers"] = cfg.encoder.layers;
  config["soft_dim"] = kSoftTagDim;
  config["hard_tags"] = cfg.hard_tags;
  write_text_file(dir + "/config.json", config.dump(2) + "\n");

  model.vocabs().word.save(dir + "/vocab_word.txt");
  model.vocabs().pos.save(dir + "/vocab_pos.txt");
  model.vocabs().ner.save(dir + "/vocab_ner.txt");
  model.vocabs().deprel.save(dir + "/vocab_deprel.txt");
  model.vocabs().subword.save(dir + "/vocab_subword.txt");
  model.bpe().save(dir + "/merges.txt");
  model.store().save(dir + "/params.manifest", dir + "/params.bin");

  if (cfg.encoder.kind == EncoderKind::ExternalPrecomputed) {
    fs::path src(cfg.embedding_file), dst(dir + "/embeddings.txt");
    if (!fs::exists(dst) || !fs::equivalent(src, dst))
      fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
  }

  if (scores) {
    json s;
    s["pos_acc"] = scores->pos_acc;
    s["ner_f1"] = scores->ner_f1;
    s["uas"] = scores->uas;
    s["las"] = scores->las;
    s["average"] = scores->average();
    write_text_file(dir + "/scores.json", s.dump(2) + "\n");
  }
}

std::unique_ptr<JointModel> load_checkpoint(const std::string& dir) {
  if (!fs::exists(dir + "/config.json"))
    throw std::runtime_error("no checkpoint found in " + dir);
  json config = json::parse(read_text_file(dir + "/config.json"));

  ModelConfig cfg;
  std::string kind = config.at("encoder_kind").get<std::string>();
  if (kind == "desk") cfg.encoder.kind = EncoderKind::DeskScale;
  else if (kind == "precomputed") cfg.encoder.kind = EncoderKind::ExternalPrecomputed;
  else throw std::runtime_error("unknown encoder kind in checkpoint: " + kind);
  cfg.encoder.dim = config.at("dim").get<std::size_t>();
  cfg.encoder.layers = config.at("layers").get<std::size_t>();
  cfg.hard_tags = config.at("hard_tags").get<bool>();
  if (cfg.encoder.kind == EncoderKind::ExternalPrecomputed)
    cfg.embedding_file = dir + "/embeddings.txt";

  Vocabs vocabs;
  vocabs.word = Vocab::load(dir + "/vocab_word.txt", /*with_specials=*/true);
  vocabs.pos = Vocab::load(dir + "/vocab_pos.txt", /*with_specials=*/false);
  vocabs.ner = Vocab::load(dir + "/vocab_ner.txt", /*with_specials=*/false);
  vocabs.deprel = Vocab::load(dir + "/vocab_deprel.txt", /*with_specials=*/false);
  vocabs.subword = Vocab::load(dir + "/vocab_subword.txt", /*with_specials=*/true);
  auto bpe = BpeTable::load(dir + "/merges.txt");

  auto model = std::make_unique<JointModel>(cfg, std::move(vocabs), std::move(bpe),
                                            /*seed=*/0);
  model->store().load(dir + "/params.manifest", dir + "/params.bin");
  return model;
}

std::optional<Scores> load_scores(const std::string& dir) {
  if (!fs::exists(dir + "/scores.json")) return std::nullopt;
  json s = json::parse(read_text_file(dir + "/scores.json"));
  Scores out;
  out.pos_acc = s.at("pos_acc").get<double>();
  out.ner_f1 = s.at("ner_f1").get<double>();
  out.uas = s.at("uas").get<double>();
  out.las = s.at("las").get<double>();
  return out;
}

}  // namespace jnlp
