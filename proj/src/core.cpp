#include "hallugauge/core.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace hg {

using nlohmann::json;

std::string to_string(DomainKind kind) {
  return kind == DomainKind::Open ? "open" : "closed";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "open") return DomainKind::Open;
  if (s == "closed") return DomainKind::Closed;
  throw ValidationError("unknown domain kind: '" + s + "' (expected open|closed)");
}

void validate_example(const Example& ex, Requirement req) {
  switch (req) {
    case Requirement::NeedsCompletion:
      if (!ex.completion || ex.completion->empty())
        throw ValidationError("example '" + ex.id + "' has no completion");
      return;
    case Requirement::NeedsDocuments:
      if (ex.documents.empty())
        throw ValidationError("example '" + ex.id + "' has no documents");
      return;
    case Requirement::NeedsGold:
      if (ex.gold_answers.empty())
        throw ValidationError("example '" + ex.id + "' has no gold answers");
      return;
    case Requirement::NeedsLabel:
      if (!ex.label)
        throw ValidationError("example '" + ex.id + "' has no label");
      return;
  }
  throw ValidationError("unknown requirement");
}

namespace {

std::string require_string(const json& rec, const char* field, size_t line_no) {
  if (!rec.contains(field))
    throw ValidationError("line " + std::to_string(line_no) + ": missing field '" +
                          field + "'");
  if (!rec.at(field).is_string())
    throw ValidationError("line " + std::to_string(line_no) + ": field '" + field +
                          "' must be a string");
  return rec.at(field).get<std::string>();
}

Example parse_example(const json& rec, size_t line_no) {
  Example ex;
  ex.id = require_string(rec, "id", line_no);
  if (ex.id.empty())
    throw ValidationError("line " + std::to_string(line_no) + ": empty id");
  ex.prompt = require_string(rec, "prompt", line_no);
  if (rec.contains("documents")) {
    for (const auto& d : rec.at("documents"))
      ex.documents.push_back(d.get<std::string>());
  }
  if (rec.contains("completion") && !rec.at("completion").is_null())
    ex.completion = rec.at("completion").get<std::string>();
  if (rec.contains("gold_answers")) {
    for (const auto& g : rec.at("gold_answers"))
      ex.gold_answers.push_back(g.get<std::string>());
  }
  if (rec.contains("label") && !rec.at("label").is_null()) {
    int v = rec.at("label").get<int>();
    if (v != 0 && v != 1)
      throw ValidationError("line " + std::to_string(line_no) + ": label must be 0 or 1");
    ex.label = (v == 1);
  }
  if (rec.contains("f1") && !rec.at("f1").is_null())
    ex.f1 = rec.at("f1").get<double>();
  return ex;
}

json example_to_json(const Example& ex) {
  json rec;
  rec["id"] = ex.id;
  rec["prompt"] = ex.prompt;
  if (!ex.documents.empty()) rec["documents"] = ex.documents;
  if (ex.completion) rec["completion"] = *ex.completion;
  if (!ex.gold_answers.empty()) rec["gold_answers"] = ex.gold_answers;
  if (ex.label) rec["label"] = *ex.label ? 1 : 0;
  if (ex.f1) rec["f1"] = *ex.f1;
  return rec;
}

}  // namespace

Dataset load_dataset(const std::string& path, std::optional<DomainKind> expected_kind,
                     const std::string& name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  Dataset ds;
  ds.name = name.empty() ? path : name;
  ds.domain_kind = expected_kind.value_or(DomainKind::Open);
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": malformed record: " +
                            e.what());
    }
    Example ex = parse_example(rec, line_no);
    if (!seen.insert(ex.id).second)
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate id '" +
                            ex.id + "'");
    if (expected_kind == DomainKind::Closed && ex.documents.empty())
      throw ValidationError("line " + std::to_string(line_no) + ": example '" + ex.id +
                            "' in a closed-domain dataset has no documents");
    ds.examples.push_back(std::move(ex));
  }
  if (ds.examples.empty()) throw ValidationError("dataset is empty: " + path);
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& ex : ds.examples) out << example_to_json(ex).dump() << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_results(const std::vector<MetricResult>& results, const std::string& path) {
  for (const auto& r : results) {
    if (!std::isfinite(r.score))
      throw ValidationError("non-finite score for example '" + r.example_id +
                            "' metric '" + r.metric + "'");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& r : results) {
    json rec;
    rec["id"] = r.example_id;
    rec["metric"] = r.metric;
    rec["score"] = r.score;
    if (!r.explanations.empty()) rec["explanations"] = r.explanations;
    if (!r.polls.empty()) {
      json polls = json::array();
      for (const auto& p : r.polls)
        polls.push_back({{"verdict", p.verdict}, {"explanation", p.explanation}});
      rec["polls"] = polls;
    }
    out << rec.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<MetricResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file: " + path);
  std::vector<MetricResult> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": malformed record: " +
                            e.what());
    }
    MetricResult r;
    r.example_id = rec.at("id").get<std::string>();
    r.metric = rec.at("metric").get<std::string>();
    r.score = rec.at("score").get<double>();
    if (rec.contains("explanations"))
      for (const auto& e : rec.at("explanations"))
        r.explanations.push_back(e.get<std::string>());
    if (rec.contains("polls"))
      for (const auto& p : rec.at("polls"))
        r.polls.push_back({p.at("verdict").get<std::string>(),
                           p.at("explanation").get<std::string>()});
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hg
