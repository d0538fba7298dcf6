#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "clintime/crf.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace clintime::crf;

// ---- templates ----

TEST_CASE("single-cell template parses") {
  auto t = parse_template_line("U07:%x[0,2]");
  CHECK(t.id == "U07");
  REQUIRE(t.cells.size() == 1);
  CHECK(t.cells[0].rowOffset == 0);
  CHECK(t.cells[0].columnIndex == 2);
}

TEST_CASE("combined template parses all cells") {
  auto t = parse_template_line("U18:%x[0,1]/%x[0,2]/%x[0,4]");
  CHECK(t.id == "U18");
  REQUIRE(t.cells.size() == 3);
  CHECK(t.cells[1].columnIndex == 2);
  CHECK(t.cells[2].columnIndex == 4);
}

TEST_CASE("negative row offsets parse") {
  auto t = parse_template_line("U00:%x[-2,1]");
  CHECK(t.cells[0].rowOffset == -2);
}

TEST_CASE("malformed templates raise syntax errors") {
  CHECK_THROWS_AS(parse_template_line("U01:%x[0,1"), TemplateSyntaxError);
  CHECK_THROWS_AS(parse_template_line("U01:%y[0,1]"), TemplateSyntaxError);
  CHECK_THROWS_AS(parse_template_line("U01:%x[zero,1]"), TemplateSyntaxError);
  CHECK_THROWS_AS(parse_template_line("no-colon"), TemplateSyntaxError);
}

TEST_CASE("template file body skips comments, blanks and the B line") {
  auto ts = parse_templates("# header\n\nU00:%x[0,1]\nB\nU01:%x[1,1]\n");
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].id == "U00");
  CHECK(ts[1].id == "U01");
}

namespace {

FeatureMatrix matrix_of(const std::vector<std::vector<std::string>>& attrs) {
  // prepend the position column
  FeatureMatrix m;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    row.insert(row.end(), attrs[i].begin(), attrs[i].end());
    m.rows.push_back(row);
  }
  return m;
}

}  // namespace

TEST_CASE("out-of-range rows resolve to boundary sentinels") {
  auto m = matrix_of({{"alpha"}, {"beta"}});
  auto ts = parse_templates("U00:%x[-2,1]\nU01:%x[-1,1]\nU02:%x[0,1]\nU03:%x[1,1]\nU04:%x[2,1]\n");
  auto feats = expand_features(m, ts);
  REQUIRE(feats.size() == 2);
  CHECK(feats[0] == std::vector<std::string>{"U00:_B-2", "U01:_B-1", "U02:alpha", "U03:beta",
                                             "U04:_B+1"});
  CHECK(feats[1] == std::vector<std::string>{"U00:_B-1", "U01:alpha", "U02:beta", "U03:_B+1",
                                             "U04:_B+2"});
}

TEST_CASE("combined cells join with slashes") {
  auto m = matrix_of({{"Monday", "Weekday", "UpperInitial"}});
  auto ts = parse_templates("U18:%x[0,1]/%x[0,2]/%x[0,3]\n");
  auto feats = expand_features(m, ts);
  CHECK(feats[0] == std::vector<std::string>{"U18:Monday/Weekday/UpperInitial"});
}

TEST_CASE("referencing a missing column fails loudly") {
  auto m = matrix_of({{"only-one-attr"}});
  auto ts = parse_templates("U00:%x[0,9]\n");
  CHECK_THROWS_AS(expand_features(m, ts), ColumnOutOfRange);
}

// ---- label schemas ----

TEST_CASE("schema label sets") {
  LabelSchema io{SchemaKind::IO, ""};
  LabelSchema bio{SchemaKind::BIO, ""};
  LabelSchema wbio{SchemaKind::WBIO, ""};
  CHECK(io.labels() == std::vector<std::string>{"I", "O"});
  CHECK(bio.labels() == std::vector<std::string>{"B", "I", "O"});
  CHECK(wbio.labels() == std::vector<std::string>{"B", "I", "O", "W"});
}

TEST_CASE("BIO transition constraints") {
  LabelSchema bio{SchemaKind::BIO, ""};
  CHECK(bio.valid_start("B"));
  CHECK(bio.valid_start("O"));
  CHECK_FALSE(bio.valid_start("I"));
  CHECK(bio.valid_transition("B", "I"));
  CHECK(bio.valid_transition("I", "I"));
  CHECK_FALSE(bio.valid_transition("O", "I"));
}

TEST_CASE("WBIO constraints: W is single-token, B needs a following I") {
  LabelSchema w{SchemaKind::WBIO, ""};
  CHECK_FALSE(w.valid_transition("W", "I"));
  CHECK(w.valid_transition("W", "B"));
  CHECK(w.valid_transition("B", "I"));
  CHECK_FALSE(w.valid_transition("B", "O"));  // single tokens are W, not bare B
  CHECK_FALSE(w.valid_end("B"));
  CHECK(w.valid_end("W"));
}

TEST_CASE("encode/decode round-trips random mention sets in all schemas") {
  std::mt19937 rng(99);
  for (SchemaKind kind : {SchemaKind::IO, SchemaKind::BIO, SchemaKind::WBIO}) {
    LabelSchema schema{kind, ""};
    for (int iter = 0; iter < 200; ++iter) {
      std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
      // random disjoint mentions; IO additionally needs a gap between them
      std::vector<TokenRange> mentions;
      std::size_t pos = 0;
      while (pos < n) {
        std::size_t len = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        if (std::uniform_int_distribution<int>(0, 1)(rng) && pos + len <= n) {
          mentions.push_back({pos, pos + len});
          pos += len + 1;  // gap keeps adjacent mentions distinguishable
        } else {
          ++pos;
        }
      }
      auto seq = encode_labels(mentions, n, schema);
      REQUIRE(schema.valid_sequence(seq));
      CHECK(decode_labels(seq, schema) == mentions);
    }
  }
}

TEST_CASE("overlapping mentions cannot be encoded") {
  LabelSchema bio{SchemaKind::BIO, ""};
  CHECK_THROWS_AS(encode_labels({{0, 3}, {2, 4}}, 5, bio), OverlappingMentions);
}

TEST_CASE("WBIO encodes single-token mentions as W") {
  LabelSchema w{SchemaKind::WBIO, ""};
  auto seq = encode_labels({{1, 2}, {3, 5}}, 5, w);
  CHECK(seq == std::vector<std::string>{"O", "W", "O", "B", "I"});
}

// ---- objective / training ----

namespace {

std::vector<FeatureTemplate> toy_templates() {
  return parse_templates("U00:%x[0,1]\nU01:%x[-1,1]\n");
}

std::vector<TrainingSentence> random_training(std::mt19937& rng, const LabelSchema& schema,
                                              int nSentences, std::size_t nTokens) {
  std::uniform_int_distribution<int> letter(0, 5);
  std::vector<TrainingSentence> data;
  for (int s = 0; s < nSentences; ++s) {
    TrainingSentence ts;
    std::vector<std::vector<std::string>> attrs;
    for (std::size_t t = 0; t < nTokens; ++t)
      attrs.push_back({std::string(1, static_cast<char>('a' + letter(rng)))});
    ts.x = matrix_of(attrs);
    // random schema-valid gold labels via mention sampling
    std::vector<TokenRange> mentions;
    std::size_t pos = 0;
    while (pos < nTokens) {
      std::size_t len = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
      if (std::uniform_int_distribution<int>(0, 1)(rng) && pos + len <= nTokens) {
        mentions.push_back({pos, pos + len});
        pos += len + 1;
      } else {
        ++pos;
      }
    }
    ts.y = encode_labels(mentions, nTokens, schema);
    data.push_back(std::move(ts));
  }
  return data;
}

}  // namespace

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937 rng(4242);
  LabelSchema bio{SchemaKind::BIO, ""};
  auto data = random_training(rng, bio, 3, 5);
  Objective obj(data, toy_templates(), bio, 1.0);
  std::normal_distribution<double> normal(0.0, 0.5);
  for (int v = 0; v < 5; ++v) {
    std::vector<double> w(obj.dimension());
    for (auto& x : w) x = normal(rng);
    CHECK(oracles::gradient_rel_error(obj, w) < 1e-4);
  }
}

TEST_CASE("viterbi equals exhaustive enumeration on random models") {
  std::mt19937 rng(31337);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int iter = 0; iter < 100; ++iter) {
    SchemaKind kind = std::vector<SchemaKind>{SchemaKind::IO, SchemaKind::BIO,
                                              SchemaKind::WBIO}[iter % 3];
    LabelSchema schema{kind, ""};
    auto labels = schema.labels();
    std::map<std::string, int> fidx;
    int next = 0;
    for (char c = 'a'; c <= 'f'; ++c) {
      fidx["U00:" + std::string(1, c)] = next++;
      fidx["U01:" + std::string(1, c)] = next++;
    }
    fidx["U01:_B-1"] = next++;
    std::vector<double> w(fidx.size() * labels.size() + labels.size() * labels.size());
    for (auto& x : w) x = normal(rng);
    CrfModel model(labels, fidx, w, toy_templates(), schema, {});
    model.set_hard_constrained(false);

    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    // distinct tokens: repeated tokens allow exact score ties between
    // different label sequences (identical weight multisets)
    std::string alphabet = "abcdef";
    std::shuffle(alphabet.begin(), alphabet.end(), rng);
    std::vector<std::vector<std::string>> attrs;
    for (std::size_t t = 0; t < n; ++t) attrs.push_back({std::string(1, alphabet[t])});
    auto m = matrix_of(attrs);
    REQUIRE(model.decode(m) == oracles::brute_force_best_sequence(model, m));
  }
}

TEST_CASE("sequence probabilities sum to one") {
  std::mt19937 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabelSchema bio{SchemaKind::BIO, ""};
  auto labels = bio.labels();
  std::map<std::string, int> fidx{{"U00:a", 0}, {"U00:b", 1}, {"U01:a", 2}, {"U01:b", 3},
                                  {"U01:_B-1", 4}};
  std::vector<double> w(fidx.size() * 3 + 9);
  for (auto& x : w) x = normal(rng);
  CrfModel model(labels, fidx, w, toy_templates(), bio, {});
  auto m = matrix_of({{"a"}, {"b"}, {"a"}});
  double total = 0;
  std::vector<std::string> y(3);
  for (const auto& a : labels)
    for (const auto& b : labels)
      for (const auto& c : labels) {
        y = {a, b, c};
        total += std::exp(model.sequence_log_prob(m, y));
      }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("training fits a separable toy problem") {
  // tokens 'd' are always inside a mention, everything else is outside
  std::vector<TrainingSentence> data;
  LabelSchema bio{SchemaKind::BIO, ""};
  for (int s = 0; s < 8; ++s) {
    std::vector<std::vector<std::string>> attrs;
    std::vector<TokenRange> mentions;
    for (std::size_t t = 0; t < 6; ++t) {
      bool hit = (t + static_cast<std::size_t>(s)) % 3 == 0;
      attrs.push_back({hit ? "d" : "x"});
      if (hit) mentions.push_back({t, t + 1});
    }
    TrainingSentence ts;
    ts.x = matrix_of(attrs);
    ts.y = encode_labels(mentions, 6, bio);
    data.push_back(std::move(ts));
  }
  Hyper hy;
  hy.maxIterations = 200;
  auto model = train(data, bio, toy_templates(), hy);
  for (const auto& ts : data) CHECK(model.decode(ts.x) == ts.y);
}

TEST_CASE("hard-constrained decoding never emits invalid sequences") {
  std::mt19937 rng(77);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int iter = 0; iter < 100; ++iter) {
    LabelSchema wbio{SchemaKind::WBIO, ""};
    auto labels = wbio.labels();
    std::map<std::string, int> fidx{{"U00:a", 0}, {"U00:b", 1}};
    std::vector<double> w(fidx.size() * 4 + 16);
    for (auto& x : w) x = normal(rng);
    CrfModel model(labels, fidx, w, parse_templates("U00:%x[0,1]\n"), wbio, {});
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
    std::vector<std::vector<std::string>> attrs;
    for (std::size_t t = 0; t < n; ++t)
      attrs.push_back({std::uniform_int_distribution<int>(0, 1)(rng) ? "a" : "b"});
    auto m = matrix_of(attrs);
    CHECK(wbio.valid_sequence(model.decode(m)));
  }
}

TEST_CASE("model save/load round-trips weights and behavior") {
  std::mt19937 rng(123);
  LabelSchema bio{SchemaKind::BIO, ""};
  auto data = random_training(rng, bio, 4, 5);
  Hyper hy;
  hy.maxIterations = 50;
  auto model = train(data, bio, toy_templates(), hy);
  std::stringstream buf;
  model.save(buf);
  auto back = CrfModel::load(buf);
  CHECK(back.weights() == model.weights());
  CHECK(back.labels() == model.labels());
  for (const auto& ts : data) CHECK(back.decode(ts.x) == model.decode(ts.x));
}

TEST_CASE("invalid gold labels are rejected") {
  LabelSchema io{SchemaKind::IO, ""};
  TrainingSentence ts;
  ts.x = matrix_of({{"a"}});
  ts.y = {"B"};  // not an IO label
  CHECK_THROWS_AS(Objective({ts}, toy_templates(), io, 1.0), InvalidGoldLabel);
}

TEST_CASE("read_training parses tab-separated sentences") {
  std::istringstream in(
      "severe\tJJ\tB\n"
      "ache\tNN\tI\n"
      "\n"
      "fine\tJJ\tO\n");
  auto data = read_training(in);
  REQUIRE(data.size() == 2);
  CHECK(data[0].x.size() == 2);
  CHECK(data[0].x.rows[0][0] == "0");       // position column
  CHECK(data[0].x.rows[0][1] == "severe");  // attributes follow
  CHECK(data[0].y == std::vector<std::string>{"B", "I"});
  CHECK(data[1].y == std::vector<std::string>{"O"});
}
