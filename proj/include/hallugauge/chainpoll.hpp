#pragma once

#include <string>
#include <vector>

#include "hallugauge/core.hpp"
#include "hallugauge/provider.hpp"

namespace hg {

enum class JudgeMode { Correctness, Adherence };
enum class CoTStyle { DetailedCoT, VanillaCoT };
enum class UnparseablePolicy { ExcludeFromDenominator, CountAsNo };

struct ChainPollConfig {
  JudgeMode mode = JudgeMode::Correctness;
  CoTStyle style = CoTStyle::DetailedCoT;
  int polls = 5;
  std::string judge_model = "gpt-3.5-turbo";
  double temperature = 1.0;
  UnparseablePolicy unparseable_policy = UnparseablePolicy::ExcludeFromDenominator;
  std::string prompt_dir;  // empty = built-in templates
  int max_tokens = 1024;
};

enum class Verdict { Yes, No, Unparseable };

struct PollResult {
  Verdict verdict = Verdict::Unparseable;
  std::string explanation;
  std::string raw;
};

struct ChainPollOutcome {
  double score = 0.0;
  std::vector<PollResult> polls;
  int parseable_count = 0;
};

// Every poll failed to parse under ExcludeFromDenominator.
class AllUnparseableError : public Error {
 public:
  using Error::Error;
};

// Joins documents as "Document 1:\n..." blocks.
std::string render_documents(const std::vector<std::string>& docs);

// Renders the judge prompt. Adherence embeds every document, numbered.
std::vector<Message> build_judge_prompt(const Example& ex, JudgeMode mode,
                                        CoTStyle style,
                                        const std::string& prompt_dir = "");

// Scans for the last `Answer: yes|no` line (case-insensitive, punctuation
// tolerated); everything above it is the explanation.
PollResult parse_verdict(const std::string& raw);

// Pure aggregation over already-parsed polls.
ChainPollOutcome aggregate_polls(const std::vector<PollResult>& polls,
                                 UnparseablePolicy policy);

// One batch request of cfg.polls samples, parsed and aggregated.
ChainPollOutcome chainpoll_score(const Example& ex, const ChainPollConfig& cfg,
                                 Provider& provider);

MetricResult chainpoll_metric_result(const Example& ex, const ChainPollConfig& cfg,
                                     const ChainPollOutcome& outcome);

std::string to_string(Verdict v);

}  // namespace hg
