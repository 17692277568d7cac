#include "hallugauge/chainpoll.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace hg {

namespace {

constexpr const char* kCorrectnessDetailed = R"(You will be shown a question and the response an AI assistant gave to it. Decide whether the response contains hallucination(s): claims that are inaccurate or not grounded in reality.

Question:
{question}

Response:
{completion}

Work through the response systematically:
1. List every factual claim the response makes.
2. Check each claim against your knowledge of the world and state whether it is accurate.
3. Note any claim that is inaccurate or unsupported.

Write out this claim-by-claim analysis first. Then, on a final line by itself, answer the question "Does the response contain hallucination(s)?" in exactly the form `Answer: yes` or `Answer: no`.)";

constexpr const char* kCorrectnessVanilla = R"(You will be shown a question and the response an AI assistant gave to it. Decide whether the response contains hallucination(s): claims that are inaccurate or not grounded in reality.

Question:
{question}

Response:
{completion}

Think step by step. Then, on a final line by itself, answer in exactly the form `Answer: yes` or `Answer: no`.)";

constexpr const char* kAdherenceDetailed = R"(You will be shown a set of reference documents, a question, and the response an AI assistant gave using those documents. Decide whether the response contains hallucination(s): claims that are not supported by the documents.

Documents:
{documents}

Question:
{question}

Response:
{completion}

Work through the response systematically:
1. List every claim the response makes.
2. For each claim, check whether it is supported by the numbered documents, citing the relevant document.
3. Note any claim the documents do not support.

Write out this claim-by-claim analysis first. Then, on a final line by itself, answer the question "Does the response contain hallucination(s)?" in exactly the form `Answer: yes` or `Answer: no`.)";

constexpr const char* kAdherenceVanilla = R"(You will be shown a set of reference documents, a question, and the response an AI assistant gave using those documents. Decide whether the response contains hallucination(s): claims that are not supported by the documents.

Documents:
{documents}

Question:
{question}

Response:
{completion}

Think step by step. Then, on a final line by itself, answer in exactly the form `Answer: yes` or `Answer: no`.)";

std::string template_name(JudgeMode mode, CoTStyle style) {
  std::string name = mode == JudgeMode::Correctness ? "correctness" : "adherence";
  name += style == CoTStyle::DetailedCoT ? "_detailed" : "_vanilla";
  return name + ".txt";
}

std::string builtin_template(JudgeMode mode, CoTStyle style) {
  if (mode == JudgeMode::Correctness)
    return style == CoTStyle::DetailedCoT ? kCorrectnessDetailed : kCorrectnessVanilla;
  return style == CoTStyle::DetailedCoT ? kAdherenceDetailed : kAdherenceVanilla;
}

std::string load_template(JudgeMode mode, CoTStyle style, const std::string& prompt_dir) {
  if (!prompt_dir.empty()) {
    std::filesystem::path p = std::filesystem::path(prompt_dir) / template_name(mode, style);
    std::ifstream in(p);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }
  }
  return builtin_template(mode, style);
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string render_documents(const std::vector<std::string>& docs) {
  std::string out;
  for (size_t i = 0; i < docs.size(); ++i) {
    out += "Document " + std::to_string(i + 1) + ":\n" + docs[i];
    if (i + 1 < docs.size()) out += "\n\n";
  }
  return out;
}

std::vector<Message> build_judge_prompt(const Example& ex, JudgeMode mode,
                                        CoTStyle style, const std::string& prompt_dir) {
  validate_example(ex, Requirement::NeedsCompletion);
  if (mode == JudgeMode::Adherence)
    validate_example(ex, Requirement::NeedsDocuments);
  std::string body = load_template(mode, style, prompt_dir);
  replace_all(body, "{question}", ex.prompt);
  replace_all(body, "{completion}", *ex.completion);
  if (mode == JudgeMode::Adherence)
    replace_all(body, "{documents}", render_documents(ex.documents));
  return {{"user", body}};
}

PollResult parse_verdict(const std::string& raw) {
  static const std::regex answer_re(
      R"(^[\s[:punct:]]*answer[\s[:punct:]]+(yes|no)[\s[:punct:]]*$)",
      std::regex::icase);
  PollResult out;
  out.raw = raw;

  size_t match_begin = std::string::npos;
  std::smatch best;
  size_t pos = 0;
  while (pos <= raw.size()) {
    size_t eol = raw.find('\n', pos);
    std::string line = raw.substr(pos, eol == std::string::npos ? std::string::npos
                                                                : eol - pos);
    std::smatch m;
    if (std::regex_match(line, m, answer_re)) {
      match_begin = pos;
      best = m;
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }

  if (match_begin == std::string::npos) {
    out.verdict = Verdict::Unparseable;
    out.explanation = raw;
    return out;
  }
  std::string ans = best[1].str();
  for (auto& c : ans) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  out.verdict = ans == "yes" ? Verdict::Yes : Verdict::No;
  out.explanation = raw.substr(0, match_begin);
  while (!out.explanation.empty() &&
         (out.explanation.back() == '\n' || out.explanation.back() == '\r'))
    out.explanation.pop_back();
  return out;
}

ChainPollOutcome aggregate_polls(const std::vector<PollResult>& polls,
                                 UnparseablePolicy policy) {
  ChainPollOutcome out;
  out.polls = polls;
  int yes = 0;
  for (const auto& p : polls) {
    if (p.verdict != Verdict::Unparseable) ++out.parseable_count;
    if (p.verdict == Verdict::Yes) ++yes;
  }
  int denom = policy == UnparseablePolicy::ExcludeFromDenominator
                  ? out.parseable_count
                  : static_cast<int>(polls.size());
  if (denom == 0)
    throw AllUnparseableError("every poll was unparseable; no verdict available");
  out.score = static_cast<double>(yes) / denom;
  return out;
}

ChainPollOutcome chainpoll_score(const Example& ex, const ChainPollConfig& cfg,
                                 Provider& provider) {
  if (cfg.polls < 1) throw ValidationError("polls must be >= 1");
  auto messages = build_judge_prompt(ex, cfg.mode, cfg.style, cfg.prompt_dir);

  CompletionRequest req;
  req.model = cfg.judge_model;
  req.messages = messages;
  req.n_samples = cfg.polls;
  req.temperature = cfg.temperature;
  req.max_tokens = cfg.max_tokens;

  CompletionBatch batch = provider.generate(req);
  std::vector<PollResult> polls;
  polls.reserve(batch.completions.size());
  for (const auto& c : batch.completions) polls.push_back(parse_verdict(c.text));
  return aggregate_polls(polls, cfg.unparseable_policy);
}

MetricResult chainpoll_metric_result(const Example& ex, const ChainPollConfig& cfg,
                                     const ChainPollOutcome& outcome) {
  MetricResult r;
  r.example_id = ex.id;
  r.metric = cfg.mode == JudgeMode::Correctness ? "chainpoll-correctness"
                                                : "chainpoll-adherence";
  r.score = outcome.score;
  for (const auto& p : outcome.polls) {
    r.explanations.push_back(p.explanation);
    r.polls.push_back({to_string(p.verdict), p.explanation});
  }
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unparseable: return "unparseable";
  }
  return "unparseable";
}

}  // namespace hg
