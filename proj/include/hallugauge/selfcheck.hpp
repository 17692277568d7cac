#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hallugauge/core.hpp"
#include "hallugauge/provider.hpp"

namespace hg {

enum class SentenceAggregation { Mean, Max };

struct SelfCheckConfig {
  int n_samples = 20;
  double sample_temperature = 1.0;
  SentenceAggregation sentence_aggregation = SentenceAggregation::Mean;
  std::string sample_model = "gpt-3.5-turbo";
  int max_tokens = 512;
  std::string embedding_model = "text-embedding-3-small";
};

// Laplace add-one unigram model over lowercased word tokens.
struct UnigramModel {
  std::set<std::string> vocab;
  std::map<std::string, long> counts;
  long total = 0;

  double probability(const std::string& token) const;
};

// Rule-based split on .?! followed by whitespace/end, with an abbreviation
// guard. Joining the sentences with the dropped separators reconstructs the
// input exactly.
std::vector<std::string> split_sentences(const std::string& text);

// Lowercase, split on whitespace and punctuation.
std::vector<std::string> word_tokens(const std::string& text);

UnigramModel fit_unigram(const std::vector<std::string>& samples,
                         const std::set<std::string>& extra_vocab);

// Pure scoring half of selfcheck_ngram, reusable on recorded samples.
double selfcheck_ngram_score(const std::vector<std::string>& samples,
                             const std::string& completion,
                             SentenceAggregation aggregation);

double selfcheck_ngram(const Example& ex, const SelfCheckConfig& cfg,
                       Provider& provider);

// backend(sentence, sample_sentence) -> similarity in [0,1].
using SentenceSimilarity =
    std::function<double(const std::string&, const std::string&)>;

double selfcheck_similarity_score(const std::vector<std::string>& samples,
                                  const std::string& completion,
                                  const SentenceSimilarity& backend);

double selfcheck_similarity(const Example& ex, const SelfCheckConfig& cfg,
                            Provider& provider, const SentenceSimilarity& backend);

// Default backend: cosine similarity of provider embeddings mapped to [0,1].
SentenceSimilarity embedding_similarity_backend(Provider& provider,
                                                const std::string& model);

// Draws cfg.n_samples completions of ex.prompt in one batch.
std::vector<std::string> draw_samples(const Example& ex, const SelfCheckConfig& cfg,
                                      Provider& provider);

}  // namespace hg
