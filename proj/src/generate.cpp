#include "hallugauge/generate.hpp"

#include "hallugauge/chainpoll.hpp"

namespace hg {

void TaskTemplate::validate() const {
  if (body.find("{question}") == std::string::npos)
    throw ValidationError("template '" + name + "' is missing the {question} placeholder");
}

TaskTemplate builtin_template(const std::string& name) {
  TaskTemplate t;
  t.name = name;
  if (name == "qa") {
    t.body = "Answer the question.\n\n{question}";
  } else if (name == "rag") {
    t.body = "Answer the question, using the documents.\n\n{question}\n\n{documents}";
  } else {
    throw ValidationError("unknown template '" + name + "' (built-ins: qa, rag)");
  }
  return t;
}

std::vector<Message> render(const TaskTemplate& tmpl, const Example& ex) {
  tmpl.validate();
  std::string body = tmpl.body;
  bool wants_documents = body.find("{documents}") != std::string::npos;
  if (wants_documents && ex.documents.empty())
    throw ValidationError("template '" + tmpl.name + "' needs documents but example '" +
                          ex.id + "' has none");
  auto replace = [&](const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = body.find(from, pos)) != std::string::npos) {
      body.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace("{question}", ex.prompt);
  if (wants_documents) replace("{documents}", render_documents(ex.documents));
  return {{"user", body}};
}

GenerationResult generate_completions(const Dataset& ds, const TaskTemplate& tmpl,
                                      Provider& provider, int max_in_flight,
                                      bool overwrite) {
  if (!overwrite)
    for (const auto& ex : ds.examples)
      if (ex.completion)
        throw ValidationError("example '" + ex.id +
                              "' already has a completion; pass overwrite to regenerate");

  std::vector<CompletionRequest> reqs;
  reqs.reserve(ds.examples.size());
  for (const auto& ex : ds.examples) {
    CompletionRequest req;
    req.model = tmpl.completion_model;
    req.messages = render(tmpl, ex);
    req.n_samples = 1;
    req.temperature = tmpl.temperature;
    req.max_tokens = tmpl.max_tokens;
    reqs.push_back(std::move(req));
  }

  auto outcomes = generate_many(provider, reqs, max_in_flight);
  GenerationResult result;
  result.dataset = ds;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].ok)
      result.dataset.examples[i].completion = outcomes[i].batch.completions.at(0).text;
    else
      result.failures.push_back({ds.examples[i].id, outcomes[i].error});
  }
  return result;
}

}  // namespace hg
