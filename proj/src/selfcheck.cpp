#include "hallugauge/selfcheck.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

namespace hg {

namespace {

const char* kAbbreviations[] = {"e.g.", "i.e.", "etc.", "dr.", "mr.", "mrs.",
                                "ms.",  "prof.", "st.", "vs.", "no.", "fig.",
                                "al.",  "jr.",   "sr.", "inc.", "cf."};

bool ends_with_abbreviation(const std::string& text, size_t dot_pos) {
  for (const char* abbr : kAbbreviations) {
    size_t len = std::strlen(abbr);
    if (dot_pos + 1 < len) continue;
    size_t start = dot_pos + 1 - len;
    bool match = true;
    for (size_t i = 0; i < len; ++i) {
      char a = static_cast<char>(std::tolower(static_cast<unsigned char>(text[start + i])));
      if (a != abbr[i]) { match = false; break; }
    }
    if (!match) continue;
    // Word boundary before the abbreviation.
    if (start == 0 || std::isspace(static_cast<unsigned char>(text[start - 1])))
      return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    bool at_end = i + 1 == text.size();
    bool before_space =
        !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (!at_end && !before_space) continue;
    if (c == '.' && ends_with_abbreviation(text, i)) continue;
    std::string sentence = text.substr(start, i + 1 - start);
    // Leading whitespace belongs to the separator, not the sentence.
    size_t first = sentence.find_first_not_of(" \t\n\r");
    if (first != std::string::npos) out.push_back(sentence.substr(first));
    start = i + 1;
  }
  if (start < text.size()) {
    std::string tail = text.substr(start);
    size_t first = tail.find_first_not_of(" \t\n\r");
    if (first != std::string::npos) out.push_back(tail.substr(first));
  }
  return out;
}

std::vector<std::string> word_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      current += static_cast<char>(std::tolower(uc));
    } else if (!current.empty()) {
      out.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

double UnigramModel::probability(const std::string& token) const {
  if (!vocab.count(token))
    throw ValidationError("token outside unigram vocabulary: " + token);
  auto it = counts.find(token);
  long c = it == counts.end() ? 0 : it->second;
  return static_cast<double>(c + 1) /
         static_cast<double>(total + static_cast<long>(vocab.size()));
}

UnigramModel fit_unigram(const std::vector<std::string>& samples,
                         const std::set<std::string>& extra_vocab) {
  if (samples.empty()) throw ValidationError("no samples to fit a unigram model on");
  UnigramModel m;
  m.vocab = extra_vocab;
  for (const auto& s : samples) {
    for (const auto& tok : word_tokens(s)) {
      m.vocab.insert(tok);
      m.counts[tok]++;
      m.total++;
    }
  }
  return m;
}

double selfcheck_ngram_score(const std::vector<std::string>& samples,
                             const std::string& completion,
                             SentenceAggregation aggregation) {
  auto completion_tokens = word_tokens(completion);
  if (completion_tokens.empty())
    throw ValidationError("completion tokenizes to zero tokens");
  std::set<std::string> extra(completion_tokens.begin(), completion_tokens.end());
  UnigramModel model = fit_unigram(samples, extra);

  std::vector<double> sentence_scores;
  for (const auto& sentence : split_sentences(completion)) {
    auto toks = word_tokens(sentence);
    if (toks.empty()) continue;
    double sum = 0;
    for (const auto& t : toks) sum += -std::log(model.probability(t));
    sentence_scores.push_back(sum / toks.size());
  }
  if (sentence_scores.empty())
    throw ValidationError("completion has no scoreable sentences");
  if (aggregation == SentenceAggregation::Max)
    return *std::max_element(sentence_scores.begin(), sentence_scores.end());
  double sum = 0;
  for (double s : sentence_scores) sum += s;
  return sum / sentence_scores.size();
}

std::vector<std::string> draw_samples(const Example& ex, const SelfCheckConfig& cfg,
                                      Provider& provider) {
  if (cfg.n_samples < 1) throw ValidationError("n_samples must be >= 1");
  CompletionRequest req;
  req.model = cfg.sample_model;
  req.messages = {{"user", ex.prompt}};
  req.n_samples = cfg.n_samples;
  req.temperature = cfg.sample_temperature;
  req.max_tokens = cfg.max_tokens;
  CompletionBatch batch = provider.generate(req);
  std::vector<std::string> out;
  for (const auto& c : batch.completions) out.push_back(c.text);
  return out;
}

double selfcheck_ngram(const Example& ex, const SelfCheckConfig& cfg,
                       Provider& provider) {
  validate_example(ex, Requirement::NeedsCompletion);
  auto samples = draw_samples(ex, cfg, provider);
  return selfcheck_ngram_score(samples, *ex.completion, cfg.sentence_aggregation);
}

double selfcheck_similarity_score(const std::vector<std::string>& samples,
                                  const std::string& completion,
                                  const SentenceSimilarity& backend) {
  auto sentences = split_sentences(completion);
  if (sentences.empty()) throw ValidationError("completion has no sentences");
  if (samples.empty()) throw ValidationError("no samples");

  double total = 0;
  for (const auto& s : sentences) {
    double agreement_sum = 0;
    for (const auto& sample : samples) {
      auto sample_sentences = split_sentences(sample);
      double best = 0;
      for (const auto& ss : sample_sentences) {
        double sim = backend(s, ss);
        if (sim < 0 || sim > 1)
          throw ValidationError("similarity backend returned a value outside [0,1]");
        best = std::max(best, sim);
      }
      agreement_sum += best;
    }
    total += 1.0 - agreement_sum / samples.size();
  }
  return total / sentences.size();
}

double selfcheck_similarity(const Example& ex, const SelfCheckConfig& cfg,
                            Provider& provider, const SentenceSimilarity& backend) {
  validate_example(ex, Requirement::NeedsCompletion);
  auto samples = draw_samples(ex, cfg, provider);
  return selfcheck_similarity_score(samples, *ex.completion, backend);
}

SentenceSimilarity embedding_similarity_backend(Provider& provider,
                                                const std::string& model) {
  return [&provider, model](const std::string& a, const std::string& b) {
    auto vecs = provider.embed(model, {a, b});
    const auto& u = vecs.at(0);
    const auto& v = vecs.at(1);
    if (u.size() != v.size() || u.empty())
      throw ValidationError("embedding dimension mismatch");
    double dot = 0, nu = 0, nv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
      dot += u[i] * v[i];
      nu += u[i] * u[i];
      nv += v[i] * v[i];
    }
    if (nu == 0 || nv == 0) return 0.5;  // cosine undefined; map 0 to midpoint
    double cosine = dot / (std::sqrt(nu) * std::sqrt(nv));
    return std::clamp((cosine + 1.0) / 2.0, 0.0, 1.0);
  };
}

}  // namespace hg
