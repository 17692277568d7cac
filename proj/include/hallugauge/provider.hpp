#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hallugauge/core.hpp"

namespace hg {

// Retryable transport-level failure (timeouts, 429, 5xx).
class TransportError : public Error {
 public:
  using Error::Error;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

// Endpoint cannot do what was asked (no logprobs, chat-only scoring, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

struct Message {
  std::string role;
  std::string content;
};

struct CompletionRequest {
  std::string model;
  std::vector<Message> messages;
  int n_samples = 1;
  double temperature = 1.0;
  int max_tokens = 512;
  bool want_logprobs = false;
  int top_logprobs = 0;  // API ceiling is 6

  void validate() const;
};

// Per-position top-M token probabilities as an API exposes them.
struct TopTokenDistribution {
  int position = 0;
  std::vector<std::pair<std::string, double>> observed;  // (token, prob), M <= 6
  double sampled_token_prob = 0.0;

  void validate() const;
};

struct Completion {
  std::string text;
  std::vector<TopTokenDistribution> token_distributions;
};

struct CompletionBatch {
  CompletionRequest request;
  std::vector<Completion> completions;
};

using TokenLogprobs = std::vector<std::pair<std::string, double>>;

class Provider {
 public:
  virtual ~Provider() = default;

  // Exactly n_samples completions, in order.
  virtual CompletionBatch generate(const CompletionRequest& req) = 0;

  // Logprob of each token of `continuation` given `context` (echo scoring).
  virtual TokenLogprobs score_text(const std::string& context,
                                   const std::string& continuation,
                                   const std::string& model) = 0;

  // Top-M distributions at each position of `continuation` given `context`.
  virtual std::vector<TopTokenDistribution> score_distributions(
      const std::string& context, const std::string& continuation,
      const std::string& model) = 0;

  virtual std::vector<std::vector<double>> embed(
      const std::string& model, const std::vector<std::string>& inputs) = 0;
};

struct RetryPolicy {
  int budget = 3;            // max retries after the first attempt
  int base_delay_ms = 500;   // exponential backoff with full jitter
  bool sleep = true;         // tests disable real sleeping
};

// Runs fn, retrying on TransportError per the policy. Other exceptions
// propagate immediately. Writes the retry count if asked.
void with_retries(const RetryPolicy& policy, const std::function<void()>& fn,
                  int* retries_out = nullptr, unsigned jitter_seed = 0);

struct BatchOutcome {
  bool ok = false;
  CompletionBatch batch;
  std::string error;
};

// Runs all requests with at most max_in_flight outstanding at once.
// Result i always corresponds to reqs[i]; per-request failures are values.
std::vector<BatchOutcome> generate_many(Provider& provider,
                                        const std::vector<CompletionRequest>& reqs,
                                        int max_in_flight);

// ---------------------------------------------------------------------------
// OpenAI-compatible HTTP provider.

struct HttpProviderConfig {
  std::string base_url;   // e.g. https://api.openai.com
  std::string api_key;
  RetryPolicy retry;
  int timeout_seconds = 120;
};

class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig cfg);
  CompletionBatch generate(const CompletionRequest& req) override;
  TokenLogprobs score_text(const std::string& context, const std::string& continuation,
                           const std::string& model) override;
  std::vector<TopTokenDistribution> score_distributions(
      const std::string& context, const std::string& continuation,
      const std::string& model) override;
  std::vector<std::vector<double>> embed(
      const std::string& model, const std::vector<std::string>& inputs) override;

 private:
  std::string post_json(const std::string& path, const std::string& body);
  HttpProviderConfig cfg_;
};

// ---------------------------------------------------------------------------
// Deterministic scripted mock. Rules match on a substring of the request's
// concatenated message text (or the continuation, for scoring); each match
// consumes the rule's next response, so repeated polls of one prompt can be
// scripted to diverge. Unmatched requests fall back to echoing the last user
// message.

struct MockResponse {
  std::vector<Completion> completions;
  int fail_transient = 0;      // raise TransportError this many times first
  bool fail_permanent = false; // always raise TransportError
};

class MockProvider : public Provider {
 public:
  MockProvider() = default;

  void add_generate_rule(const std::string& match_substring,
                         std::vector<MockResponse> responses);
  // Convenience: one response whose completions are plain texts.
  void add_generate_texts(const std::string& match_substring,
                          std::vector<std::string> texts);
  void add_score_rule(const std::string& match_substring, TokenLogprobs tokens);
  void add_distribution_rule(const std::string& match_substring,
                             std::vector<TopTokenDistribution> dists);
  void add_embedding(const std::string& text, std::vector<double> vec);
  void set_chat_only(bool v) { chat_only_ = v; }
  void set_supports_logprobs(bool v) { supports_logprobs_ = v; }

  // Script file: JSON with generate / score_text / distributions / embeddings
  // sections (see docs in README).
  static std::shared_ptr<MockProvider> from_script_file(const std::string& path);

  CompletionBatch generate(const CompletionRequest& req) override;
  TokenLogprobs score_text(const std::string& context, const std::string& continuation,
                           const std::string& model) override;
  std::vector<TopTokenDistribution> score_distributions(
      const std::string& context, const std::string& continuation,
      const std::string& model) override;
  std::vector<std::vector<double>> embed(
      const std::string& model, const std::vector<std::string>& inputs) override;

 private:
  struct GenerateRule {
    std::string match;
    std::vector<MockResponse> responses;
    size_t next = 0;
    int transient_left = -1;  // initialized per response
  };
  struct ScoreRule {
    std::string match;
    TokenLogprobs tokens;
  };
  struct DistRule {
    std::string match;
    std::vector<TopTokenDistribution> dists;
  };

  std::mutex mu_;
  std::vector<GenerateRule> generate_rules_;
  std::vector<ScoreRule> score_rules_;
  std::vector<DistRule> dist_rules_;
  std::map<std::string, std::vector<double>> embeddings_;
  bool chat_only_ = false;
  bool supports_logprobs_ = true;
};

// ---------------------------------------------------------------------------
// Fixture recording / replay at the provider boundary. Fixtures are one JSON
// file per (request fingerprint, sequence number) under a directory; replay
// needs no network and reproduces responses bit-for-bit.

class RecordingProvider : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::string fixture_dir);
  CompletionBatch generate(const CompletionRequest& req) override;
  TokenLogprobs score_text(const std::string& context, const std::string& continuation,
                           const std::string& model) override;
  std::vector<TopTokenDistribution> score_distributions(
      const std::string& context, const std::string& continuation,
      const std::string& model) override;
  std::vector<std::vector<double>> embed(
      const std::string& model, const std::vector<std::string>& inputs) override;

 private:
  std::string next_path(const std::string& key);
  std::shared_ptr<Provider> inner_;
  std::string dir_;
  std::mutex mu_;
  std::map<std::string, int> seq_;
};

class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(std::string fixture_dir);
  CompletionBatch generate(const CompletionRequest& req) override;
  TokenLogprobs score_text(const std::string& context, const std::string& continuation,
                           const std::string& model) override;
  std::vector<TopTokenDistribution> score_distributions(
      const std::string& context, const std::string& continuation,
      const std::string& model) override;
  std::vector<std::vector<double>> embed(
      const std::string& model, const std::vector<std::string>& inputs) override;

 private:
  std::string next_path(const std::string& key);
  std::string dir_;
  std::mutex mu_;
  std::map<std::string, int> seq_;
};

// Stable fingerprint of a request, shared by recording and replay.
std::string fingerprint_generate(const CompletionRequest& req);
std::string fingerprint_score(const std::string& kind, const std::string& context,
                              const std::string& continuation, const std::string& model);

}  // namespace hg
