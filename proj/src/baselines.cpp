#include "hallugauge/baselines.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hallugauge/chainpoll.hpp"
#include "hallugauge/probmetrics.hpp"

namespace hg {

namespace {

constexpr const char* kGevalTemplate = R"(You will be shown a question and the response an AI assistant gave to it. Rate the factual quality of the response on a scale from 1 to 5, using these guidelines:

5 - fully accurate, every claim is correct and grounded.
4 - mostly accurate with at most a trivial imprecision.
3 - a mix of accurate and inaccurate material.
2 - mostly inaccurate or unsupported.
1 - almost entirely fabricated or wrong.

Question:
{question}

Response:
{completion}

Reply with the rating.)";

std::string load_geval_template(const std::string& prompt_dir) {
  if (!prompt_dir.empty()) {
    std::ifstream in(std::filesystem::path(prompt_dir) / "geval.txt");
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }
  }
  return kGevalTemplate;
}

std::string render_geval_prompt(const Example& ex, const GEvalConfig& cfg) {
  std::string body = load_geval_template(cfg.prompt_dir);
  auto replace = [&](const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = body.find(from, pos)) != std::string::npos) {
      body.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace("{question}", ex.prompt);
  replace("{completion}", *ex.completion);
  replace("{documents}", render_documents(ex.documents));
  return body;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\n\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\n\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::optional<int> parse_geval_rating(const std::string& raw) {
  for (size_t i = 0; i < raw.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(raw[i]))) continue;
    // Skip multi-digit numbers; the scale is single-digit.
    if (i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i + 1]))) {
      while (i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i + 1])))
        ++i;
      continue;
    }
    int d = raw[i] - '0';
    if (d >= 1 && d <= 5) return d;
  }
  return std::nullopt;
}

double geval_rating_to_score(double rating) { return (6.0 - rating) / 5.0; }

double geval_score(const Example& ex, const GEvalConfig& cfg, Provider& provider) {
  validate_example(ex, Requirement::NeedsCompletion);
  if (cfg.samples < 1) throw ValidationError("samples must be >= 1");
  std::vector<Message> messages = {{"user", render_geval_prompt(ex, cfg)}};

  if (cfg.use_token_probs) {
    CompletionRequest req;
    req.model = cfg.judge_model;
    req.messages = messages;
    req.n_samples = 1;
    req.temperature = cfg.temperature;
    req.max_tokens = 4;
    req.want_logprobs = true;
    req.top_logprobs = 6;
    try {
      CompletionBatch batch = provider.generate(req);
      const auto& dists = batch.completions.at(0).token_distributions;
      if (!dists.empty()) {
        double weighted = 0, mass = 0;
        for (const auto& [tok, p] : dists.front().observed) {
          std::string t = trim(tok);
          if (t.size() == 1 && t[0] >= '1' && t[0] <= '5') {
            weighted += (t[0] - '0') * p;
            mass += p;
          }
        }
        if (mass > 0) return geval_rating_to_score(weighted / mass);
      }
    } catch (const CapabilityError&) {
      // fall through to sampling
    }
  }

  CompletionRequest req;
  req.model = cfg.judge_model;
  req.messages = messages;
  req.n_samples = cfg.samples;
  req.temperature = cfg.temperature;
  req.max_tokens = 16;
  CompletionBatch batch = provider.generate(req);
  double sum = 0;
  int parsed = 0;
  for (const auto& c : batch.completions) {
    if (auto r = parse_geval_rating(c.text)) {
      sum += *r;
      ++parsed;
    }
  }
  if (parsed == 0) throw Error("every G-Eval sample was unparseable");
  return geval_rating_to_score(sum / parsed);
}

std::string gptscore_context(const Example& ex, const GPTScoreConfig& cfg) {
  if (cfg.instruction_prefix.empty())
    throw ValidationError("GPTScore instruction prefix is empty");
  std::string ctx = cfg.instruction_prefix + "\n\n" + ex.prompt;
  if (!ex.documents.empty()) ctx += "\n\n" + render_documents(ex.documents);
  return ctx + "\n\n";
}

double gptscore(const Example& ex, const GPTScoreConfig& cfg, Provider& provider) {
  validate_example(ex, Requirement::NeedsCompletion);
  auto tokens = provider.score_text(gptscore_context(ex, cfg), *ex.completion,
                                    cfg.probability_model);
  std::vector<double> logprobs;
  for (const auto& [tok, lp] : tokens) logprobs.push_back(lp);
  return perplexity(logprobs);
}

double nli_score(const std::string& premise, const std::string& hypothesis) {
  (void)premise;
  (void)hypothesis;
  throw CapabilityError(
      "NLI scoring is an extension point; no entailment model ships with this build");
}

}  // namespace hg
