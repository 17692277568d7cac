#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hallugauge/baselines.hpp"
#include "hallugauge/probmetrics.hpp"

using namespace hg;

namespace {

Example make_example() {
  Example ex;
  ex.id = "e";
  ex.prompt = "What is the capital of France?";
  ex.completion = "Paris is the capital.";
  return ex;
}

}  // namespace

TEST_CASE("geval rating parser takes the first 1-5 integer") {
  CHECK(parse_geval_rating("4") == 4);
  CHECK(parse_geval_rating("Rating: 5.") == 5);
  CHECK(parse_geval_rating("I give it a 3 out of 5") == 3);
  CHECK(parse_geval_rating("scored 10 then 2") == 2);  // 10 is not on the scale
  CHECK(parse_geval_rating("no rating here") == std::nullopt);
  CHECK(parse_geval_rating("0 or 7 or 9") == std::nullopt);
}

TEST_CASE("geval sampled mode averages parseable ratings") {
  MockProvider mock;
  mock.add_generate_texts("Paris is the capital.", {"4", "4", "5", "3", "4"});
  GEvalConfig cfg;
  cfg.samples = 5;
  // mean rating 4.0 -> hallucination score (6-4)/5 = 0.4
  CHECK(geval_score(make_example(), cfg, mock) == doctest::Approx(0.4));
}

TEST_CASE("geval sampled score is invariant under permutation of ratings") {
  GEvalConfig cfg;
  cfg.samples = 5;
  std::vector<std::string> ratings = {"1", "5", "3", "2", "4"};
  std::vector<double> scores;
  for (int perm = 0; perm < 3; ++perm) {
    std::mt19937 rng(perm);
    std::shuffle(ratings.begin(), ratings.end(), rng);
    MockProvider mock;
    mock.add_generate_texts("Paris is the capital.", ratings);
    scores.push_back(geval_score(make_example(), cfg, mock));
  }
  CHECK(scores[0] == doctest::Approx(scores[1]));
  CHECK(scores[1] == doctest::Approx(scores[2]));
}

TEST_CASE("geval weighted mode uses digit-token probabilities") {
  MockProvider mock;
  MockResponse resp;
  Completion c;
  c.text = "5";
  TopTokenDistribution d;
  d.position = 0;
  d.observed = {{"5", 0.9}, {"4", 0.1}};
  d.sampled_token_prob = 0.9;
  c.token_distributions = {d};
  resp.completions = {c};
  mock.add_generate_rule("Paris is the capital.", {resp});

  GEvalConfig cfg;
  cfg.use_token_probs = true;
  // weighted rating 4.9 -> (6-4.9)/5 = 0.22
  CHECK(geval_score(make_example(), cfg, mock) == doctest::Approx(0.22));
}

TEST_CASE("geval unparseable samples are dropped; all-unparseable is an error") {
  GEvalConfig cfg;
  cfg.samples = 3;
  MockProvider partial;
  partial.add_generate_texts("Paris is the capital.", {"hmm", "4", "nope"});
  CHECK(geval_score(make_example(), cfg, partial) == doctest::Approx(0.4));

  MockProvider none;
  none.add_generate_texts("Paris is the capital.", {"hmm", "nope", "???"});
  CHECK_THROWS_WITH_AS(geval_score(make_example(), cfg, none),
                       doctest::Contains("unparseable"), Error);
}

TEST_CASE("geval mapped score is strictly decreasing in rating and in [0.2, 1]") {
  for (int r = 1; r < 5; ++r)
    CHECK(geval_rating_to_score(r + 1) < geval_rating_to_score(r));
  CHECK(geval_rating_to_score(5) == doctest::Approx(0.2));
  CHECK(geval_rating_to_score(1) == doctest::Approx(1.0));
}

TEST_CASE("gptscore delegates to perplexity over score_text") {
  MockProvider mock;
  mock.add_score_rule("Paris is the capital.",
                      {{"Paris", -std::log(2.0)}, {"capital", -std::log(2.0)}});
  GPTScoreConfig cfg;
  cfg.instruction_prefix = "Write a factually accurate answer.";
  CHECK(gptscore(make_example(), cfg, mock) == doctest::Approx(2.0));

  // Byte-identical with composing the pieces by hand.
  auto tokens = mock.score_text(gptscore_context(make_example(), cfg),
                                *make_example().completion, cfg.probability_model);
  std::vector<double> lps;
  for (const auto& [t, lp] : tokens) lps.push_back(lp);
  CHECK(gptscore(make_example(), cfg, mock) == perplexity(lps));
}

TEST_CASE("gptscore with context-independent mock is prefix-invariant") {
  MockProvider mock;  // default scoring depends only on the continuation tokens
  GPTScoreConfig a;
  a.instruction_prefix = "Prefix one.";
  GPTScoreConfig b;
  b.instruction_prefix = "A totally different instruction.";
  CHECK(gptscore(make_example(), a, mock) == gptscore(make_example(), b, mock));
}

TEST_CASE("gptscore error paths") {
  MockProvider mock;
  GPTScoreConfig cfg;
  cfg.instruction_prefix = "Prefix.";
  Example ex = make_example();
  ex.completion = "";
  CHECK_THROWS_AS(gptscore(ex, cfg, mock), ValidationError);

  GPTScoreConfig empty;
  empty.instruction_prefix = "";
  CHECK_THROWS_AS(gptscore(make_example(), empty, mock), ValidationError);

  MockProvider chat_only;
  chat_only.set_chat_only(true);
  CHECK_THROWS_AS(gptscore(make_example(), cfg, chat_only), CapabilityError);
}

TEST_CASE("closed-domain gptscore context embeds the documents") {
  Example ex = make_example();
  ex.documents = {"doc one", "doc two"};
  GPTScoreConfig cfg;
  cfg.instruction_prefix = "Answer from the documents.";
  std::string ctx = gptscore_context(ex, cfg);
  CHECK(ctx.find("doc one") != std::string::npos);
  CHECK(ctx.find("Document 2") != std::string::npos);
}

TEST_CASE("nli_score is a declared but unimplemented extension point") {
  CHECK_THROWS_AS(nli_score("premise", "hypothesis"), CapabilityError);
}
