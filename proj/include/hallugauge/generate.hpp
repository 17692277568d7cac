#pragma once

#include <string>
#include <vector>

#include "hallugauge/core.hpp"
#include "hallugauge/provider.hpp"

namespace hg {

struct TaskTemplate {
  std::string name;
  std::string body;  // contains {question}, optionally {documents}
  std::string completion_model = "gpt-3.5-turbo";
  double temperature = 0.7;
  int max_tokens = 512;

  void validate() const;
};

// Built-in templates: "qa" (open) and "rag" (closed).
TaskTemplate builtin_template(const std::string& name);

std::vector<Message> render(const TaskTemplate& tmpl, const Example& ex);

struct GenerationFailure {
  std::string example_id;
  std::string error;
};

struct GenerationResult {
  Dataset dataset;  // completions filled where generation succeeded
  std::vector<GenerationFailure> failures;
};

GenerationResult generate_completions(const Dataset& ds, const TaskTemplate& tmpl,
                                      Provider& provider, int max_in_flight,
                                      bool overwrite = false);

}  // namespace hg
