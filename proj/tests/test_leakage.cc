#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "jnlp/corpus.h"
#include "jnlp/leakage.h"

using namespace jnlp;

namespace {

Sentence sent(const std::vector<std::string>& forms) {
  Sentence s;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i + 1);
    t.form = forms[i];
    t.pos = "N";
    s.tokens.push_back(t);
  }
  s.mask.pos = true;
  return s;
}

Sentence numbered(int id) { return sent({"w" + std::to_string(id), "end"}); }

Corpus corpus_of(const std::vector<Sentence>& sentences) {
  Corpus c;
  c.task = Task::POS;
  c.sentences = sentences;
  return c;
}

const OverlapEntry& find_overlap(const LeakageReport& r, const std::string& source) {
  for (const auto& e : r.overlaps)
    if (e.source == source) return e;
  REQUIRE(false);
  return r.overlaps.front();
}

}  // namespace

TEST_CASE("sentence identity ignores annotations") {
  Sentence a = sent({"Đây", "là", "Hà_Nội"});
  Sentence b = sent({"Đây", "là", "Hà_Nội"});
  b.tokens[0].pos = "X";
  b.tokens[2].ner = "B-LOC";
  CHECK(sentence_key(a) == sentence_key(b));
  CHECK(sentence_key(a) == "Đây là Hà_Nội");
  CHECK(sentence_key(sent({"Đây", "là"})) != sentence_key(sent({"Đây", "làX"})));
}

TEST_CASE("planting ninety percent of a test split in the training data is reported") {
  std::vector<Sentence> ner_test;
  for (int i = 0; i < 10; ++i) ner_test.push_back(numbered(i));
  std::vector<Sentence> pos_train;
  for (int i = 0; i < 9; ++i) pos_train.push_back(numbered(i));  // 0..8 leak
  pos_train.push_back(numbered(100));

  Splits pos{corpus_of(pos_train), {}, {}};
  Splits ner{{}, {}, corpus_of(ner_test)};
  Splits dep;
  LeakageReport r = audit(pos, ner, dep);
  const OverlapEntry& e = find_overlap(r, "ner-test");
  CHECK(e.target == "pos-train");
  CHECK(e.overlap_count == 9);
  CHECK(e.source_size == 10);
  CHECK(e.percent == doctest::Approx(90.0));
  CHECK(e.keys.size() == 9);
  CHECK(r.to_text().find("90.00%") != std::string::npos);
}

TEST_CASE("disjoint corpora produce zero overlaps and no duplicates") {
  Splits pos{corpus_of({numbered(1), numbered(2)}), corpus_of({numbered(3)}), {}};
  Splits ner{corpus_of({numbered(4)}), corpus_of({numbered(5)}), corpus_of({numbered(6)})};
  Splits dep{corpus_of({numbered(7)}), corpus_of({numbered(8)}), corpus_of({numbered(9)})};
  LeakageReport r = audit(pos, ner, dep);
  for (const auto& e : r.overlaps) {
    CHECK(e.overlap_count == 0);
    CHECK(e.percent == 0.0);
  }
  CHECK(r.duplicate_groups.empty());
  CHECK(r.duplicate_extra == 0);
}

TEST_CASE("a sentence appearing twice in the training data forms one duplicate group") {
  Splits pos{corpus_of({numbered(1), numbered(2), numbered(1)}), {}, {}};
  LeakageReport r = audit(pos, {}, {});
  REQUIRE(r.duplicate_groups.size() == 1);
  CHECK(r.duplicate_groups.begin()->second == 2);
  CHECK(r.duplicate_extra == 1);
}

TEST_CASE("five hundred ninety-four planted duplicates are all removed") {
  std::vector<Sentence> sentences;
  for (int i = 0; i < 2000; ++i) sentences.push_back(numbered(i));
  // plant exactly 594 extra occurrences of existing sentences
  for (int i = 0; i < 594; ++i) sentences.push_back(numbered(i % 200));
  Corpus c = corpus_of(sentences);
  auto [clean, removed] = deduplicate(c);
  CHECK(removed == 594);
  CHECK(clean.size() == 2000);
}

TEST_CASE("deduplication keeps first occurrences in order and is idempotent") {
  Corpus c = corpus_of({numbered(5), numbered(1), numbered(5), numbered(2), numbered(1)});
  auto [clean, removed] = deduplicate(c);
  CHECK(removed == 2);
  REQUIRE(clean.size() == 3);
  CHECK(sentence_key(clean.sentences[0]) == sentence_key(numbered(5)));
  CHECK(sentence_key(clean.sentences[1]) == sentence_key(numbered(1)));
  CHECK(sentence_key(clean.sentences[2]) == sentence_key(numbered(2)));
  auto [again, removed2] = deduplicate(clean);
  CHECK(removed2 == 0);
  CHECK(again.size() == clean.size());
}

TEST_CASE("a duplicate-free corpus is returned unchanged") {
  Corpus c = corpus_of({numbered(1), numbered(2), numbered(3)});
  auto [clean, removed] = deduplicate(c);
  CHECK(removed == 0);
  CHECK(clean.size() == 3);
}

TEST_CASE("three copies of one sentence cost two removals") {
  Corpus c = corpus_of({numbered(1), numbered(1), numbered(1)});
  auto [clean, removed] = deduplicate(c);
  CHECK(removed == 2);
  CHECK(clean.size() == 1);
}

TEST_CASE("validation sentences of the other tasks are pulled into the new validation split") {
  std::vector<Sentence> pos_all;
  for (int i = 0; i < 10; ++i) pos_all.push_back(numbered(i));
  // NER valid matches pos sentences 0,1; DEP valid matches 2; disjoint sets
  Splits ner{{}, corpus_of({numbered(0), numbered(1)}), {}};
  Splits dep{{}, corpus_of({numbered(2)}), {}};
  Splits out = resplit_pos(corpus_of(pos_all), ner, dep, /*strict=*/false);
  CHECK(out.valid.size() == 3);
  CHECK(out.test.size() == 0);
  CHECK(out.train.size() == 7);
}

TEST_CASE("with no other-task validation or test data everything stays in training") {
  std::vector<Sentence> pos_all;
  for (int i = 0; i < 5; ++i) pos_all.push_back(numbered(i));
  Splits out = resplit_pos(corpus_of(pos_all), {}, {}, /*strict=*/false);
  CHECK(out.valid.size() == 0);
  CHECK(out.test.size() == 0);
  CHECK(out.train.size() == 5);
}

TEST_CASE("resplit outputs partition the corpus and silence the audit") {
  std::vector<Sentence> pos_all;
  for (int i = 0; i < 40; ++i) pos_all.push_back(numbered(i));
  Splits ner{corpus_of({numbered(50)}),
             corpus_of({numbered(0), numbered(1)}),
             corpus_of({numbered(2), numbered(3)})};
  Splits dep{corpus_of({numbered(60)}),
             corpus_of({numbered(4)}),
             corpus_of({numbered(5), numbered(3)})};  // 3 shared with ner-test
  Splits out = resplit_pos(corpus_of(pos_all), ner, dep, /*strict=*/false);

  CHECK(out.train.size() + out.valid.size() + out.test.size() == 40);
  std::set<std::string> train_keys, valid_keys, test_keys;
  for (const auto& s : out.train.sentences) train_keys.insert(sentence_key(s));
  for (const auto& s : out.valid.sentences) valid_keys.insert(sentence_key(s));
  for (const auto& s : out.test.sentences) test_keys.insert(sentence_key(s));
  for (const auto& k : valid_keys) CHECK(train_keys.count(k) == 0);
  for (const auto& k : test_keys) {
    CHECK(train_keys.count(k) == 0);
    CHECK(valid_keys.count(k) == 0);
  }

  LeakageReport after = audit(out, ner, dep);
  for (const auto& e : after.overlaps) CHECK(e.percent == 0.0);
}

TEST_CASE("a sentence in both validation and test unions goes to test with a warning") {
  std::vector<Sentence> pos_all = {numbered(0), numbered(1)};
  Splits ner{{}, corpus_of({numbered(0)}), corpus_of({numbered(0)})};
  std::vector<std::string> warnings;
  Splits out = resplit_pos(corpus_of(pos_all), ner, {}, /*strict=*/false, &warnings);
  CHECK(out.test.size() == 1);
  CHECK(out.valid.size() == 0);
  CHECK(out.train.size() == 1);
  CHECK(!warnings.empty());
}

TEST_CASE("strict mode rejects evaluation sentences without a tagging counterpart") {
  Splits ner{{}, corpus_of({numbered(99)}), {}};
  Corpus pos_all = corpus_of({numbered(0)});
  CHECK_THROWS(resplit_pos(pos_all, ner, {}, /*strict=*/true));
  CHECK_NOTHROW(resplit_pos(pos_all, ner, {}, /*strict=*/false));
}

TEST_CASE("the machine-readable report mirrors the overlap entries") {
  std::vector<Sentence> pos_train = {numbered(0)};
  Splits pos{corpus_of(pos_train), {}, {}};
  Splits ner{{}, corpus_of({numbered(0)}), {}};
  LeakageReport r = audit(pos, ner, {});
  std::string json = r.to_json();
  CHECK(json.find("\"source\": \"ner-valid\"") != std::string::npos);
  CHECK(json.find("\"percent\": 100") != std::string::npos);
  CHECK(json.find("\"duplicate_extra\": 0") != std::string::npos);
}
