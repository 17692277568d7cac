#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hg {

// Base error for anything the library reports to callers.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class DomainKind { Open, Closed };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& s);

// One evaluation unit: a prompt, an optional completion to be judged, and
// whatever ground-truth material the dataset carries.
struct Example {
  std::string id;
  std::string prompt;
  std::vector<std::string> documents;            // empty = open-domain
  std::optional<std::string> completion;
  std::vector<std::string> gold_answers;
  std::optional<bool> label;                     // true = hallucinated
  std::optional<double> f1;                      // filled by rule-based annotation
};

struct Dataset {
  std::string name;
  DomainKind domain_kind = DomainKind::Open;
  std::vector<Example> examples;
};

struct PollRecord {
  std::string verdict;      // "yes" | "no" | "unparseable"
  std::string explanation;
};

// Scalar metric output. Convention: larger score = more likely hallucinated.
struct MetricResult {
  std::string example_id;
  std::string metric;
  double score = 0.0;
  std::vector<std::string> explanations;
  std::vector<PollRecord> polls;
};

enum class Requirement { NeedsCompletion, NeedsDocuments, NeedsGold, NeedsLabel };

// Throws ValidationError when the required field is absent or empty.
void validate_example(const Example& ex, Requirement req);

// Line-delimited JSON dataset I/O. Order of examples follows file order.
Dataset load_dataset(const std::string& path,
                     std::optional<DomainKind> expected_kind = std::nullopt,
                     const std::string& name = "");
void write_dataset(const Dataset& ds, const std::string& path);

// Results files: one JSON record per line. Scores must be finite.
void write_results(const std::vector<MetricResult>& results, const std::string& path);
std::vector<MetricResult> load_results(const std::string& path);

}  // namespace hg
