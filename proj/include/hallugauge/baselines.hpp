#pragma once

#include <string>

#include "hallugauge/core.hpp"
#include "hallugauge/provider.hpp"

namespace hg {

struct GEvalConfig {
  int samples = 20;
  std::string judge_model = "gpt-3.5-turbo";
  bool use_token_probs = false;
  double temperature = 1.0;
  std::string prompt_dir;  // empty = built-in guideline template
};

struct GPTScoreConfig {
  std::string instruction_prefix;
  std::string probability_model = "text-curie-001";
};

// First integer 1..5 found in the response; nullopt when none.
std::optional<int> parse_geval_rating(const std::string& raw);

// Maps a 1..5 quality rating to a hallucination score, (6 - r) / 5.
double geval_rating_to_score(double rating);

// Judge-LLM 1-5 rating: probability-weighted over digit tokens when the
// endpoint exposes them, sample-averaged otherwise. Returned on the
// hallucination scale (higher = worse).
double geval_score(const Example& ex, const GEvalConfig& cfg, Provider& provider);

// Perplexity of the completion under an instruction-prefixed context.
double gptscore(const Example& ex, const GPTScoreConfig& cfg, Provider& provider);

// Builds the GPTScore context: prefix, then the prompt, then numbered
// documents when present.
std::string gptscore_context(const Example& ex, const GPTScoreConfig& cfg);

// Extension point for NLI-entailment scoring; no model ships with this
// project, so calling it reports a capability error.
double nli_score(const std::string& premise, const std::string& hypothesis);

}  // namespace hg
