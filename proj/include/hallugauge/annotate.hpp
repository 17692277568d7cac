#pragma once

#include <string>
#include <vector>

#include "hallugauge/core.hpp"
#include "hallugauge/provider.hpp"

namespace hg {

struct AnnotationConfig {
  std::string judge_model = "gpt-4";
  double f1_threshold = 0.0;  // hallucinated iff f1 <= threshold
  std::string prompt_dir;

  void validate() const;
};

struct JudgeAnnotation {
  bool label = false;  // true = hallucinated
  std::string explanation;
};

// Single-poll strong-model judgment; an unparseable verdict is an error
// rather than a guess.
JudgeAnnotation judge_annotate(const Example& ex, const AnnotationConfig& cfg,
                               Provider& provider);

struct F1Label {
  double f1 = 0.0;
  bool label = false;
};

// Bag-of-words F1 against each gold answer (max taken), with the standard
// extractive-QA normalization: lowercase, strip punctuation, collapse
// whitespace, drop a/an/the. Multiset intersection.
F1Label f1_label(const std::string& prediction,
                 const std::vector<std::string>& gold_answers,
                 const AnnotationConfig& cfg);

// Normalized token bag used by f1_label; exposed for tests.
std::vector<std::string> normalized_bag(const std::string& text);

}  // namespace hg
