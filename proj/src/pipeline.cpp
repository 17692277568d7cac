#include "hallugauge/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "hallugauge/annotate.hpp"
#include "hallugauge/baselines.hpp"
#include "hallugauge/chainpoll.hpp"
#include "hallugauge/eval.hpp"
#include "hallugauge/generate.hpp"
#include "hallugauge/probmetrics.hpp"
#include "hallugauge/selfcheck.hpp"

namespace hg {

using nlohmann::json;

std::shared_ptr<Provider> make_provider(const ProviderSpec& spec, bool record,
                                        bool replay) {
  std::shared_ptr<Provider> base;
  if (replay) {
    if (spec.fixtures_dir.empty())
      throw ValidationError("replay needs --fixtures <dir>");
    return std::make_shared<ReplayProvider>(spec.fixtures_dir);
  }
  if (!spec.mock_script.empty()) {
    base = MockProvider::from_script_file(spec.mock_script);
  } else if (spec.use_mock) {
    base = std::make_shared<MockProvider>();
  } else {
    if (spec.base_url.empty())
      throw ValidationError(
          "no provider configured: pass --base-url (or set HALLUGAUGE_BASE_URL), or "
          "use --mock / --mock-script for offline runs");
    HttpProviderConfig cfg;
    cfg.base_url = spec.base_url;
    cfg.api_key = spec.api_key;
    cfg.retry.budget = spec.retry_budget;
    cfg.retry.base_delay_ms = spec.retry_base_delay_ms;
    base = std::make_shared<HttpProvider>(cfg);
  }
  if (record) {
    if (spec.fixtures_dir.empty())
      throw ValidationError("record needs --fixtures <dir>");
    return std::make_shared<RecordingProvider>(base, spec.fixtures_dir);
  }
  return base;
}

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? v : fallback;
}

const std::set<std::string> kMetrics = {
    "chainpoll-correctness", "chainpoll-adherence", "geval",
    "gptscore",              "selfcheck-ngram",     "selfcheck-similarity",
    "max-pseudo-entropy",    "ppl5",                "perplexity",
    "uncertainty"};

struct ScoreOpts {
  std::string dataset_path;
  std::string domain = "open";
  std::string metric;
  std::string out = "results.jsonl";
  std::string report_out;
  std::string prompt_dir;
  int max_in_flight = 4;

  // chainpoll
  int polls = 5;
  std::string judge_model = "gpt-3.5-turbo";
  double temperature = 1.0;
  std::string style = "detailed";
  std::string unparseable_policy = "exclude";

  // geval
  int geval_samples = 20;
  bool geval_token_probs = false;

  // gptscore / probability metrics
  std::string gptscore_prefix;
  std::string probability_model = "text-curie-001";

  // selfcheck
  int selfcheck_samples = 20;
  std::string sample_model = "gpt-3.5-turbo";
  std::string embedding_model = "text-embedding-3-small";

  // uncertainty calibration
  double cal_scale = 1.0;
  double cal_shift = 2.302585092994046;
};

void validate_score_opts(const ScoreOpts& o) {
  if (!kMetrics.count(o.metric)) {
    std::string all;
    for (const auto& m : kMetrics) all += m + " ";
    throw ValidationError("unknown metric '" + o.metric + "'; known: " + all);
  }
  if (o.metric == "chainpoll-adherence" && o.domain != "closed")
    throw ValidationError(
        "chainpoll-adherence requires a closed-domain dataset (--domain closed)");
}

std::string default_gptscore_prefix(const std::string& domain) {
  if (domain == "closed")
    return "Write an answer to the question that is fully supported by the "
           "provided documents.";
  return "Write a factually accurate answer to the question.";
}

// Scores every example; per-example failures are collected, not fatal.
struct ScoreRun {
  std::vector<MetricResult> results;
  std::vector<std::pair<std::string, std::string>> failures;  // (id, error)
};

ScoreRun score_chainpoll(const Dataset& ds, const ScoreOpts& o, Provider& provider) {
  ChainPollConfig cfg;
  cfg.mode = o.metric == "chainpoll-adherence" ? JudgeMode::Adherence
                                               : JudgeMode::Correctness;
  cfg.style = o.style == "vanilla" ? CoTStyle::VanillaCoT : CoTStyle::DetailedCoT;
  cfg.polls = o.polls;
  cfg.judge_model = o.judge_model;
  cfg.temperature = o.temperature;
  cfg.unparseable_policy = o.unparseable_policy == "count-as-no"
                               ? UnparseablePolicy::CountAsNo
                               : UnparseablePolicy::ExcludeFromDenominator;
  cfg.prompt_dir = o.prompt_dir;

  // One batch request per example, scheduled through generate_many so
  // max_in_flight bounds the concurrency.
  std::vector<CompletionRequest> reqs;
  std::vector<size_t> req_example;
  for (size_t i = 0; i < ds.examples.size(); ++i) {
    const auto& ex = ds.examples[i];
    CompletionRequest req;
    req.model = cfg.judge_model;
    req.messages = build_judge_prompt(ex, cfg.mode, cfg.style, cfg.prompt_dir);
    req.n_samples = cfg.polls;
    req.temperature = cfg.temperature;
    req.max_tokens = cfg.max_tokens;
    reqs.push_back(std::move(req));
    req_example.push_back(i);
  }
  auto outcomes = generate_many(provider, reqs, o.max_in_flight);

  ScoreRun run;
  for (size_t r = 0; r < outcomes.size(); ++r) {
    const auto& ex = ds.examples[req_example[r]];
    if (!outcomes[r].ok) {
      run.failures.emplace_back(ex.id, outcomes[r].error);
      continue;
    }
    try {
      std::vector<PollResult> polls;
      for (const auto& c : outcomes[r].batch.completions)
        polls.push_back(parse_verdict(c.text));
      ChainPollOutcome outcome = aggregate_polls(polls, cfg.unparseable_policy);
      run.results.push_back(chainpoll_metric_result(ex, cfg, outcome));
    } catch (const std::exception& e) {
      run.failures.emplace_back(ex.id, e.what());
    }
  }
  return run;
}

ScoreRun score_generic(const Dataset& ds, const ScoreOpts& o, Provider& provider) {
  ScoreRun run;
  for (const auto& ex : ds.examples) {
    try {
      validate_example(ex, Requirement::NeedsCompletion);
      MetricResult r;
      r.example_id = ex.id;
      r.metric = o.metric;
      if (o.metric == "geval") {
        GEvalConfig cfg;
        cfg.samples = o.geval_samples;
        cfg.judge_model = o.judge_model;
        cfg.use_token_probs = o.geval_token_probs;
        cfg.prompt_dir = o.prompt_dir;
        r.score = geval_score(ex, cfg, provider);
      } else if (o.metric == "gptscore") {
        GPTScoreConfig cfg;
        cfg.instruction_prefix =
            o.gptscore_prefix.empty() ? default_gptscore_prefix(o.domain)
                                      : o.gptscore_prefix;
        cfg.probability_model = o.probability_model;
        r.score = gptscore(ex, cfg, provider);
      } else if (o.metric == "selfcheck-ngram" || o.metric == "selfcheck-similarity") {
        SelfCheckConfig cfg;
        cfg.n_samples = o.selfcheck_samples;
        cfg.sample_model = o.sample_model;
        cfg.embedding_model = o.embedding_model;
        if (o.metric == "selfcheck-ngram") {
          r.score = selfcheck_ngram(ex, cfg, provider);
        } else {
          auto backend = embedding_similarity_backend(provider, cfg.embedding_model);
          r.score = selfcheck_similarity(ex, cfg, provider, backend);
        }
      } else if (o.metric == "perplexity") {
        auto tokens = provider.score_text(ex.prompt, *ex.completion, o.probability_model);
        std::vector<double> lps;
        for (const auto& [tok, lp] : tokens) lps.push_back(lp);
        r.score = perplexity(lps);
      } else {
        // max-pseudo-entropy, ppl5, uncertainty: need top-M distributions.
        auto dists =
            provider.score_distributions(ex.prompt, *ex.completion, o.probability_model);
        if (o.metric == "ppl5") {
          double best = 0;
          for (const auto& d : dists) best = std::max(best, ppl5_entropy(d));
          r.score = best;
        } else {
          double pe = sequence_max_pseudo_entropy(dists);
          r.score = o.metric == "uncertainty"
                        ? uncertainty_score(pe, {o.cal_scale, o.cal_shift})
                        : pe;
        }
      }
      run.results.push_back(std::move(r));
    } catch (const std::exception& e) {
      run.failures.emplace_back(ex.id, e.what());
    }
  }
  return run;
}

ScoreRun score_dataset(const Dataset& ds, const ScoreOpts& o, Provider& provider) {
  if (o.metric.rfind("chainpoll", 0) == 0) return score_chainpoll(ds, o, provider);
  return score_generic(ds, o, provider);
}

ScoredLabels join_scores_with_labels(const Dataset& ds,
                                     const std::vector<MetricResult>& results) {
  std::map<std::string, bool> labels;
  for (const auto& ex : ds.examples) {
    if (!ex.label)
      throw ValidationError("example '" + ex.id + "' has no label; annotate first");
    labels[ex.id] = *ex.label;
  }
  ScoredLabels out;
  for (const auto& r : results) {
    auto it = labels.find(r.example_id);
    if (it == labels.end())
      throw ValidationError("result for unknown example id '" + r.example_id + "'");
    out.pairs.emplace_back(r.score, it->second);
  }
  return out;
}

struct RunRef {
  std::string name;
  std::string dataset_path;
  std::string results_path;
};

RunRef parse_run_ref(const std::string& arg) {
  RunRef ref;
  std::string rest = arg;
  auto eq = rest.find('=');
  if (eq != std::string::npos) {
    ref.name = rest.substr(0, eq);
    rest = rest.substr(eq + 1);
  }
  auto colon = rest.find(':');
  if (colon == std::string::npos)
    throw ValidationError("--run expects dataset.jsonl:results.jsonl, got '" + arg + "'");
  ref.dataset_path = rest.substr(0, colon);
  ref.results_path = rest.substr(colon + 1);
  if (ref.name.empty())
    ref.name = std::filesystem::path(ref.dataset_path).stem().string();
  return ref;
}

EvalReport report_from_runs(const std::vector<std::string>& run_args) {
  std::map<std::pair<std::string, std::string>, ScoredLabels> runs;
  for (const auto& arg : run_args) {
    RunRef ref = parse_run_ref(arg);
    Dataset ds = load_dataset(ref.dataset_path, std::nullopt, ref.name);
    auto results = load_results(ref.results_path);
    std::map<std::string, std::vector<MetricResult>> by_metric;
    for (const auto& r : results) by_metric[r.metric].push_back(r);
    for (const auto& [metric, rs] : by_metric)
      runs[{ref.name, metric}] = join_scores_with_labels(ds, rs);
  }
  return build_report(runs);
}

void print_report(const EvalReport& report) {
  for (const auto& [dataset, metrics] : report.per_dataset)
    for (const auto& [metric, a] : metrics)
      std::cout << dataset << "\t" << metric << "\tauroc=" << a << "\n";
  for (const auto& [metric, a] : report.aggregate)
    std::cout << "aggregate\t" << metric << "\tauroc=" << a << "\n";
}

void apply_config_file(const std::string& path, ScoreOpts& o, ProviderSpec& spec) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config parse error: " + std::string(e.what()));
  }
  if (cfg.contains("provider")) {
    const auto& p = cfg.at("provider");
    spec.base_url = p.value("base_url", spec.base_url);
    spec.retry_budget = p.value("retry_budget", spec.retry_budget);
    spec.retry_base_delay_ms = p.value("retry_base_delay_ms", spec.retry_base_delay_ms);
    o.max_in_flight = p.value("max_in_flight", o.max_in_flight);
  }
  if (cfg.contains("models")) {
    const auto& m = cfg.at("models");
    o.judge_model = m.value("judge", o.judge_model);
    o.sample_model = m.value("completion", o.sample_model);
    o.probability_model = m.value("probability", o.probability_model);
    o.embedding_model = m.value("embedding", o.embedding_model);
  }
  if (cfg.contains("chainpoll")) {
    const auto& c = cfg.at("chainpoll");
    o.polls = c.value("polls", o.polls);
    o.temperature = c.value("temperature", o.temperature);
    o.style = c.value("style", o.style);
    o.unparseable_policy = c.value("unparseable_policy", o.unparseable_policy);
  }
  o.prompt_dir = cfg.value("prompt_dir", o.prompt_dir);
}

void add_provider_flags(CLI::App* cmd, ProviderSpec& spec) {
  cmd->add_option("--base-url", spec.base_url, "OpenAI-compatible endpoint base URL");
  cmd->add_flag("--mock", spec.use_mock, "use the offline mock provider");
  cmd->add_option("--mock-script", spec.mock_script, "mock script JSON file");
  cmd->add_option("--fixtures", spec.fixtures_dir, "fixture directory for record/replay");
  cmd->add_option("--retry-budget", spec.retry_budget, "max retries per request");
}

int run_score_like(const ScoreOpts& opts_in, const ProviderSpec& spec, bool record,
                   bool replay) {
  ScoreOpts o = opts_in;
  validate_score_opts(o);
  DomainKind kind = domain_kind_from_string(o.domain);
  Dataset ds = load_dataset(o.dataset_path, kind);

  auto provider = make_provider(spec, record, replay);
  ScoreRun run = score_dataset(ds, o, *provider);
  write_results(run.results, o.out);
  std::cout << "wrote " << run.results.size() << " results to " << o.out << "\n";
  for (const auto& [id, err] : run.failures)
    std::cerr << "failed: " << id << ": " << err << "\n";

  if (!o.report_out.empty()) {
    std::map<std::pair<std::string, std::string>, ScoredLabels> runs;
    runs[{ds.name, o.metric}] = join_scores_with_labels(ds, run.results);
    EvalReport report = build_report(runs);
    write_report(report, o.report_out);
    print_report(report);
  }
  return run.failures.empty() ? 0 : 2;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"hallugauge: hallucination metrics for LLM completions"};
  app.require_subcommand(1);

  ProviderSpec spec;
  spec.base_url = env_or("HALLUGAUGE_BASE_URL", "");
  spec.api_key = env_or("HALLUGAUGE_API_KEY", "");

  ScoreOpts score_opts;
  std::string config_path;

  auto add_score_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration JSON file");
    cmd->add_option("--dataset", score_opts.dataset_path, "dataset JSONL file")
        ->required();
    cmd->add_option("--domain", score_opts.domain, "open|closed")
        ->check(CLI::IsMember({"open", "closed"}));
    cmd->add_option("--metric", score_opts.metric, "metric name")->required();
    cmd->add_option("--out", score_opts.out, "results output file");
    cmd->add_option("--report-out", score_opts.report_out,
                    "also evaluate against labels and write a report here");
    cmd->add_option("--prompt-dir", score_opts.prompt_dir, "prompt template overrides");
    cmd->add_option("--max-in-flight", score_opts.max_in_flight,
                    "max concurrent requests");
    cmd->add_option("--polls", score_opts.polls, "ChainPoll poll count");
    cmd->add_option("--judge-model", score_opts.judge_model, "judge model");
    cmd->add_option("--temperature", score_opts.temperature, "judge temperature");
    cmd->add_option("--style", score_opts.style, "detailed|vanilla")
        ->check(CLI::IsMember({"detailed", "vanilla"}));
    cmd->add_option("--unparseable-policy", score_opts.unparseable_policy,
                    "exclude|count-as-no")
        ->check(CLI::IsMember({"exclude", "count-as-no"}));
    cmd->add_option("--geval-samples", score_opts.geval_samples, "G-Eval sample count");
    cmd->add_flag("--geval-token-probs", score_opts.geval_token_probs,
                  "use digit-token probabilities for G-Eval");
    cmd->add_option("--gptscore-prefix", score_opts.gptscore_prefix,
                    "GPTScore instruction prefix");
    cmd->add_option("--probability-model", score_opts.probability_model,
                    "model for logprob scoring");
    cmd->add_option("--selfcheck-samples", score_opts.selfcheck_samples,
                    "SelfCheck resample count");
    cmd->add_option("--sample-model", score_opts.sample_model, "resampling model");
    cmd->add_option("--embedding-model", score_opts.embedding_model, "embedding model");
    cmd->add_option("--cal-scale", score_opts.cal_scale, "uncertainty expit scale");
    cmd->add_option("--cal-shift", score_opts.cal_shift, "uncertainty expit shift");
    add_provider_flags(cmd, spec);
  };

  CLI::App* score = app.add_subcommand("score", "score a dataset with one metric");
  add_score_flags(score);
  CLI::App* record = app.add_subcommand(
      "record", "score while capturing provider traffic to --fixtures");
  add_score_flags(record);
  CLI::App* replay = app.add_subcommand(
      "replay", "score offline, answering every request from --fixtures");
  add_score_flags(replay);

  // generate
  std::string gen_dataset, gen_template = "qa", gen_out, gen_model = "gpt-3.5-turbo";
  double gen_temperature = 0.7;
  int gen_max_tokens = 512, gen_in_flight = 4;
  bool gen_overwrite = false;
  CLI::App* gen = app.add_subcommand("generate", "fill in completions for a dataset");
  gen->add_option("--dataset", gen_dataset)->required();
  gen->add_option("--template", gen_template, "task template name (qa|rag)");
  gen->add_option("--out", gen_out)->required();
  gen->add_option("--model", gen_model);
  gen->add_option("--temperature", gen_temperature);
  gen->add_option("--max-tokens", gen_max_tokens);
  gen->add_option("--max-in-flight", gen_in_flight);
  gen->add_flag("--overwrite", gen_overwrite);
  add_provider_flags(gen, spec);

  // annotate
  std::string ann_dataset, ann_out, ann_method = "f1", ann_judge = "gpt-4",
              ann_prompt_dir;
  double ann_threshold = 0.0;
  CLI::App* ann = app.add_subcommand("annotate", "fill in ground-truth labels");
  ann->add_option("--dataset", ann_dataset)->required();
  ann->add_option("--out", ann_out)->required();
  ann->add_option("--method", ann_method, "f1|judge")
      ->check(CLI::IsMember({"f1", "judge"}));
  ann->add_option("--judge-model", ann_judge);
  ann->add_option("--f1-threshold", ann_threshold);
  ann->add_option("--prompt-dir", ann_prompt_dir);
  add_provider_flags(ann, spec);

  // eval / report
  std::vector<std::string> run_args;
  std::string report_out_dir;
  CLI::App* eval_cmd = app.add_subcommand("eval", "AUROC per run, printed");
  eval_cmd->add_option("--run", run_args, "name=dataset.jsonl:results.jsonl")
      ->required();
  CLI::App* report_cmd =
      app.add_subcommand("report", "full report: summary JSON + curve CSVs");
  report_cmd->add_option("--run", run_args, "name=dataset.jsonl:results.jsonl")
      ->required();
  report_cmd->add_option("--out", report_out_dir, "report output directory")
      ->required();

  // calibrate
  std::string cal_dataset, cal_results;
  CLI::App* cal = app.add_subcommand(
      "calibrate", "fit uncertainty expit constants on a labeled run");
  cal->add_option("--dataset", cal_dataset, "labeled dataset JSONL")->required();
  cal->add_option("--results", cal_results, "pseudo-entropy results JSONL")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, score_opts, spec);

    if (score->parsed()) return run_score_like(score_opts, spec, false, false);
    if (record->parsed()) return run_score_like(score_opts, spec, true, false);
    if (replay->parsed()) return run_score_like(score_opts, spec, false, true);

    if (gen->parsed()) {
      Dataset ds = load_dataset(gen_dataset);
      TaskTemplate tmpl = builtin_template(gen_template);
      tmpl.completion_model = gen_model;
      tmpl.temperature = gen_temperature;
      tmpl.max_tokens = gen_max_tokens;
      auto provider = make_provider(spec, false, false);
      auto result = generate_completions(ds, tmpl, *provider, gen_in_flight,
                                         gen_overwrite);
      write_dataset(result.dataset, gen_out);
      for (const auto& f : result.failures)
        std::cerr << "failed: " << f.example_id << ": " << f.error << "\n";
      std::cout << "wrote " << result.dataset.examples.size() << " examples to "
                << gen_out << "\n";
      return result.failures.empty() ? 0 : 2;
    }

    if (ann->parsed()) {
      Dataset ds = load_dataset(ann_dataset);
      AnnotationConfig cfg;
      cfg.judge_model = ann_judge;
      cfg.f1_threshold = ann_threshold;
      cfg.prompt_dir = ann_prompt_dir;
      cfg.validate();
      if (ann_method == "f1") {
        for (auto& ex : ds.examples) {
          validate_example(ex, Requirement::NeedsCompletion);
          validate_example(ex, Requirement::NeedsGold);
          F1Label fl = f1_label(*ex.completion, ex.gold_answers, cfg);
          ex.label = fl.label;
          ex.f1 = fl.f1;
        }
      } else {
        auto provider = make_provider(spec, false, false);
        for (auto& ex : ds.examples) {
          JudgeAnnotation a = judge_annotate(ex, cfg, *provider);
          ex.label = a.label;
        }
      }
      write_dataset(ds, ann_out);
      std::cout << "annotated " << ds.examples.size() << " examples to " << ann_out
                << "\n";
      return 0;
    }

    if (eval_cmd->parsed()) {
      print_report(report_from_runs(run_args));
      return 0;
    }
    if (report_cmd->parsed()) {
      EvalReport report = report_from_runs(run_args);
      write_report(report, report_out_dir);
      print_report(report);
      std::cout << "report written to " << report_out_dir << "\n";
      return 0;
    }

    if (cal->parsed()) {
      Dataset ds = load_dataset(cal_dataset);
      auto results = load_results(cal_results);
      std::map<std::string, bool> labels;
      for (const auto& ex : ds.examples) {
        if (!ex.label)
          throw ValidationError("example '" + ex.id + "' has no label");
        labels[ex.id] = *ex.label;
      }
      std::vector<double> pe;
      std::vector<bool> lab;
      for (const auto& r : results) {
        auto it = labels.find(r.example_id);
        if (it == labels.end()) continue;
        pe.push_back(r.score);
        lab.push_back(it->second);
      }
      UncertaintyCalibration fitted = calibrate_uncertainty(pe, lab);
      json j;
      j["scale"] = fitted.scale;
      j["shift"] = fitted.shift;
      std::cout << j.dump() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "no subcommand executed\n";
  return 1;
}

}  // namespace hg
