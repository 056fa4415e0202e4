// Copyright 2026 The ecdetect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "doctest.h"

namespace {

using namespace ecd::features;
using Strings = std::vector<std::string>;

std::map<std::string, double> by_term(const TfidfModel& m, const FeatureVector& fv) {
  std::map<std::string, double> out;
  for (const auto& [term, idx] : m.vocabulary) {
    for (const auto& [k, w] : fv.entries) {
      if (k == idx) out[term] = w;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tokenizer") {
  CHECK(tokenize("Hello, World!  (ok)") == Strings{"hello", "world", "ok"});
  CHECK(tokenize("__START__ Hi") == Strings{"__START__", "hi"});
  CHECK(tokenize("--- ... !!") == Strings{});
  CHECK(tokenize("don't e-mail") == Strings{"don't", "e-mail"});
}

TEST_CASE("n-grams") {
  const Strings abc{"a", "b", "c"};
  CHECK(extract_ngrams(abc, 1) == Strings{"a", "b", "c"});
  CHECK(extract_ngrams(abc, 2) == Strings{"a", "b", "c", "a b", "b c"});
}

TEST_CASE("context inputs") {
  const Strings s{"first one", "second one"};
  CHECK(make_input(s, 0, true) == "__START__ first one");
  CHECK(make_input(s, 1, true) == "first one second one");
  CHECK(make_input(s, 1, false) == "second one");
  CHECK_THROWS_AS(make_input(s, 2, false), ecd::Error);

  std::vector<ecd::corpus::Sentence> sentences(2);
  sentences[0].text = "A.";
  sentences[1].text = "B.";
  CHECK(make_input(sentences, 0, true) == "__START__ A.");
}

TEST_CASE("idf values") {
  const Strings docs{"x a", "x b", "x c a"};
  const auto m = fit_tfidf(docs, 1, 1);
  CHECK(m.idf[m.vocabulary.at("x")] == doctest::Approx(1.0));
  CHECK(m.idf[m.vocabulary.at("b")] == doctest::Approx(std::log(2.0) + 1.0));
  CHECK(m.idf[m.vocabulary.at("b")] == doctest::Approx(1.6931).epsilon(1e-4));
  CHECK(m.idf[m.vocabulary.at("a")] == doctest::Approx(std::log(4.0 / 3.0) + 1.0));

  const auto pruned = fit_tfidf(docs, 1);
  CHECK(pruned.vocabulary.count("x") == 1);
  CHECK(pruned.vocabulary.count("a") == 1);
  CHECK(pruned.vocabulary.count("b") == 0);

  CHECK_THROWS_AS(fit_tfidf(Strings{}, 1), ecd::Error);
  CHECK_THROWS_AS(fit_tfidf(docs, 3), ecd::Error);
}

TEST_CASE("bigram vocabulary includes unigrams") {
  const Strings docs{"a b c", "a b c"};
  const auto m = fit_tfidf(docs, 2);
  CHECK(m.size() == 5);
  for (const char* term : {"a", "b", "c", "a b", "b c"}) CHECK(m.vocabulary.count(term) == 1);
}

TEST_CASE("transform normalisation") {
  const Strings docs{"red blue", "red blue", "green"};
  const auto m = fit_tfidf(docs, 1);
  const auto one = transform(m, "red");
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].second == doctest::Approx(1.0));

  CHECK(transform(m, "purple orange").empty());

  const auto two = transform(m, "red blue");
  REQUIRE(two.entries.size() == 2);
  CHECK(two.entries[0].second == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(two.entries[1].second == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("unit norm and order independence") {
  std::mt19937 rng(17);
  const Strings vocab{"ad", "promo", "code", "show", "guest", "story", "talk", "music"};
  Strings docs;
  for (int d = 0; d < 60; ++d) {
    std::string text;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 6); k < n; ++k) {
      text += vocab[rng() % vocab.size()] + " ";
    }
    docs.push_back(text);
  }
  for (int ngram : {1, 2}) {
    const auto m = fit_tfidf(docs, ngram);
    Strings shuffled = docs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto m2 = fit_tfidf(shuffled, ngram);
    for (const auto& text : docs) {
      const auto fv = transform(m, text);
      CHECK((fv.empty() || std::abs(fv.norm() - 1.0) < 1e-9));
      for (const auto& [k, w] : fv.entries) CHECK(w != 0.0);
      const auto a = by_term(m, fv);
      const auto b = by_term(m2, transform(m2, text));
      REQUIRE(a.size() == b.size());
      for (const auto& [term, w] : a) CHECK(b.at(term) == doctest::Approx(w).epsilon(1e-15));
    }
  }
}

TEST_CASE("tf-idf model round-trips through JSON") {
  const Strings docs{"a b", "a b c", "c d", "d a"};
  const auto m = fit_tfidf(docs, 2);
  const auto back = tfidf_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.vocabulary == m.vocabulary);
  CHECK(back.idf == m.idf);
  CHECK(back.doc_count == 4);
  auto bad = to_json(m);
  bad["version"] = 99;
  CHECK_THROWS_AS(tfidf_from_json(bad), ecd::Error);
}
