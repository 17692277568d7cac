#include "hallugauge/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "hallugauge/chainpoll.hpp"

namespace hg {

void AnnotationConfig::validate() const {
  if (f1_threshold < 0 || f1_threshold >= 1)
    throw ValidationError("f1_threshold must be in [0, 1)");
}

JudgeAnnotation judge_annotate(const Example& ex, const AnnotationConfig& cfg,
                               Provider& provider) {
  cfg.validate();
  validate_example(ex, Requirement::NeedsCompletion);
  ChainPollConfig poll_cfg;
  poll_cfg.mode = ex.documents.empty() ? JudgeMode::Correctness : JudgeMode::Adherence;
  poll_cfg.style = CoTStyle::DetailedCoT;
  poll_cfg.polls = 1;
  poll_cfg.judge_model = cfg.judge_model;
  poll_cfg.temperature = 0.0;
  poll_cfg.prompt_dir = cfg.prompt_dir;

  auto messages = build_judge_prompt(ex, poll_cfg.mode, poll_cfg.style, cfg.prompt_dir);
  CompletionRequest req;
  req.model = poll_cfg.judge_model;
  req.messages = messages;
  req.n_samples = 1;
  req.temperature = poll_cfg.temperature;
  req.max_tokens = poll_cfg.max_tokens;
  CompletionBatch batch = provider.generate(req);

  PollResult poll = parse_verdict(batch.completions.at(0).text);
  if (poll.verdict == Verdict::Unparseable)
    throw Error("judge verdict unparseable for example '" + ex.id +
                "'; refusing to guess a label");
  return {poll.verdict == Verdict::Yes, poll.explanation};
}

std::vector<std::string> normalized_bag(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && current != "a" && current != "an" && current != "the")
      out.push_back(current);
    current.clear();
  };
  for (char c : text) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80)
      current += static_cast<char>(std::tolower(uc));
    else
      flush();
  }
  flush();
  return out;
}

namespace {

double bag_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) return 0.0;
  std::map<std::string, int> gold_counts;
  for (const auto& t : gold) gold_counts[t]++;
  int overlap = 0;
  for (const auto& t : pred) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      ++overlap;
      --it->second;
    }
  }
  if (overlap == 0) return 0.0;
  double precision = static_cast<double>(overlap) / pred.size();
  double recall = static_cast<double>(overlap) / gold.size();
  return 2 * precision * recall / (precision + recall);
}

}  // namespace

F1Label f1_label(const std::string& prediction,
                 const std::vector<std::string>& gold_answers,
                 const AnnotationConfig& cfg) {
  cfg.validate();
  if (gold_answers.empty()) throw ValidationError("no gold answers");
  auto pred_bag = normalized_bag(prediction);
  double best = 0.0;
  for (const auto& gold : gold_answers)
    best = std::max(best, bag_f1(pred_bag, normalized_bag(gold)));
  return {best, best <= cfg.f1_threshold};
}

}  // namespace hg
