#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "clintime/stringsim.hpp"
#include "test_util.hpp"

using namespace clintime::strsim;

TEST_CASE("jaro similarity on classic reference pairs") {
  CHECK(jaro("MARTHA", "MARHTA") == doctest::Approx(0.944444).epsilon(1e-4));
  CHECK(jaro("DWAYNE", "DUANE") == doctest::Approx(0.822222).epsilon(1e-4));
  CHECK(jaro("DIXON", "DICKSONX") == doctest::Approx(0.766667).epsilon(1e-4));
  CHECK(jaro("", "") == 1.0);
  CHECK(jaro("abc", "") == 0.0);
  CHECK(jaro("abc", "xyz") == 0.0);
}

TEST_CASE("jaro-winkler prefix boost on reference pairs") {
  CHECK(jaro_winkler("MARTHA", "MARHTA") == doctest::Approx(0.9611).epsilon(1e-4));
  CHECK(jaro_winkler("DWAYNE", "DUANE") == doctest::Approx(0.84).epsilon(1e-4));
  CHECK(jaro_winkler("DIXON", "DICKSONX") == doctest::Approx(0.813333).epsilon(1e-4));
}

TEST_CASE("jaro-winkler is symmetric and bounded on random pairs") {
  std::mt19937 rng(8);
  for (int i = 0; i < 5000; ++i) {
    std::string a = testutil::random_word(rng, 0, 10);
    std::string b = testutil::random_word(rng, 0, 10);
    double ab = jaro_winkler(a, b);
    double ba = jaro_winkler(b, a);
    REQUIRE(ab == doctest::Approx(ba).epsilon(1e-12));
    REQUIRE(ab >= 0.0);
    REQUIRE(ab <= 1.0);
    REQUIRE(jaro_winkler(a, a) == 1.0);
  }
}

TEST_CASE("tf-idf stats count document frequencies of unique tokens") {
  auto stats = build_stats({"chest pain", "chest tightness", "fever"});
  CHECK(stats.docCount == 3);
  CHECK(stats.tokenDocFreq.at("chest") == 2);
  CHECK(stats.tokenDocFreq.at("fever") == 1);
  CHECK_THROWS_AS(build_stats({}), EmptyCorpus);
}

TEST_CASE("soft tfidf identity is exactly one") {
  auto stats = build_stats({"chest pain", "severe chest pain", "fever", "headache"});
  CHECK(soft_tfidf("chest pain", "chest pain", stats) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(soft_tfidf("severe chest pain", "severe chest pain", stats) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // case-insensitive tokenization
  CHECK(soft_tfidf("Chest Pain", "chest pain", stats) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("soft tfidf stays within [0,1] over 10k fuzz pairs") {
  std::mt19937 rng(4711);
  std::vector<std::string> corpus;
  for (int i = 0; i < 60; ++i)
    corpus.push_back(testutil::random_word(rng, 2, 7) + " " + testutil::random_word(rng, 2, 7));
  auto stats = build_stats(corpus);
  std::uniform_int_distribution<int> nw(1, 4);
  auto phrase = [&]() {
    std::string p;
    int n = nw(rng);
    for (int i = 0; i < n; ++i) {
      if (i) p += " ";
      p += testutil::random_word(rng, 1, 8);
    }
    return p;
  };
  for (int i = 0; i < 10000; ++i) {
    std::string a = phrase(), b = phrase();
    double s = soft_tfidf(a, b, stats);
    REQUIRE(s >= 0.0);
    REQUIRE(s <= 1.0);
    REQUIRE(s == doctest::Approx(soft_tfidf(b, a, stats)).epsilon(1e-12));
  }
}

TEST_CASE("soft tfidf rewards near-identical token variants") {
  auto stats = build_stats({"swelling of the leg", "facial swelling", "chest pain",
                            "abdominal pain", "fever"});
  double near = soft_tfidf("facial swelling", "facial swellings", stats);
  double far = soft_tfidf("facial swelling", "chest pain", stats);
  CHECK(near > 0.8);
  CHECK(far < 0.5);
}

TEST_CASE("soft tfidf matches a reference computation on a hand-set corpus") {
  // corpus of 4 docs; query tokens all exact matches so the inner metric is 1
  auto stats = build_stats({"a b", "a c", "b c", "d"});
  // weights: w(tok) = (log(tf)+1) * log(N/df), L2-normalized per string
  auto w = [&](const std::string& tok) {
    return std::log(4.0 / stats.tokenDocFreq.at(tok));  // tf always 1 here
  };
  double wa = w("a"), wb = w("b"), wc = w("c");
  double na = std::sqrt(wa * wa + wb * wb);  // "a b"
  double nb = std::sqrt(wa * wa + wc * wc);  // "a c"
  double expected = (wa / na) * (wa / nb);   // only the shared token matches
  CHECK(soft_tfidf("a b", "a c", stats) == doctest::Approx(expected).epsilon(1e-9));
}
