#include "hallugauge/provider.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace hg {

using nlohmann::json;

void CompletionRequest::validate() const {
  if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
  if (temperature < 0) throw ValidationError("temperature must be >= 0");
  if (top_logprobs < 0 || top_logprobs > 6)
    throw ValidationError("top_logprobs must be in [0, 6]");
  if (max_tokens < 1) throw ValidationError("max_tokens must be >= 1");
}

void TopTokenDistribution::validate() const {
  if (observed.empty()) throw ValidationError("token distribution has no entries");
  double sum = 0;
  for (const auto& [tok, p] : observed) {
    if (p <= 0 || p > 1)
      throw ValidationError("token probability out of (0,1]: " + tok);
    sum += p;
  }
  if (sum > 1 + 1e-9)
    throw ValidationError("observed probabilities sum above 1: " + std::to_string(sum));
}

void with_retries(const RetryPolicy& policy, const std::function<void()>& fn,
                  int* retries_out, unsigned jitter_seed) {
  std::mt19937 rng(jitter_seed ? jitter_seed : std::random_device{}());
  int retries = 0;
  for (;;) {
    try {
      fn();
      if (retries_out) *retries_out = retries;
      return;
    } catch (const TransportError&) {
      if (retries >= policy.budget) {
        if (retries_out) *retries_out = retries;
        throw;
      }
      double cap = policy.base_delay_ms * std::pow(2.0, retries);
      std::uniform_real_distribution<double> jitter(0.0, cap);
      if (policy.sleep)
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<long>(jitter(rng))));
      ++retries;
    }
  }
}

std::vector<BatchOutcome> generate_many(Provider& provider,
                                        const std::vector<CompletionRequest>& reqs,
                                        int max_in_flight) {
  if (max_in_flight < 1) throw ValidationError("max_in_flight must be >= 1");
  std::vector<BatchOutcome> out(reqs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= reqs.size()) return;
      try {
        out[i].batch = provider.generate(reqs[i]);
        out[i].ok = true;
      } catch (const std::exception& e) {
        out[i].ok = false;
        out[i].error = e.what();
      }
    }
  };
  size_t n_workers = std::min<size_t>(max_in_flight, reqs.size());
  std::vector<std::thread> threads;
  for (size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// HTTP provider

namespace {

// Splits "https://host:port/prefix" into client target and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto slash = base_url.find('/', host_start);
  if (slash == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

}  // namespace

HttpProvider::HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.base_url.empty()) throw ValidationError("provider base URL is empty");
}

std::string HttpProvider::post_json(const std::string& path, const std::string& body) {
  auto [target, prefix] = split_base_url(cfg_.base_url);
  std::string response_body;
  auto attempt = [&] {
    httplib::Client cli(target);
    cli.set_read_timeout(cfg_.timeout_seconds, 0);
    cli.set_connection_timeout(10, 0);
    httplib::Headers headers;
    if (!cfg_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    auto res = cli.Post(prefix + path, headers, body, "application/json");
    if (!res)
      throw TransportError("transport failure contacting " + cfg_.base_url + path +
                           ": " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
      throw AuthError("authentication failed (" + std::to_string(res->status) +
                      "): " + res->body);
    if (res->status == 429 || res->status >= 500)
      throw TransportError("retryable status " + std::to_string(res->status) + ": " +
                           res->body);
    if (res->status >= 400)
      throw Error("request failed (" + std::to_string(res->status) + "): " + res->body);
    response_body = res->body;
  };
  with_retries(cfg_.retry, attempt);
  return response_body;
}

CompletionBatch HttpProvider::generate(const CompletionRequest& req) {
  req.validate();
  json body;
  body["model"] = req.model;
  body["messages"] = json::array();
  for (const auto& m : req.messages)
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["n"] = req.n_samples;
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  if (req.want_logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = req.top_logprobs > 0 ? req.top_logprobs : 5;
  }

  json resp = json::parse(post_json("/v1/chat/completions", body.dump()));
  CompletionBatch batch;
  batch.request = req;
  for (const auto& choice : resp.at("choices")) {
    Completion c;
    c.text = choice.at("message").at("content").get<std::string>();
    if (req.want_logprobs) {
      if (!choice.contains("logprobs") || choice.at("logprobs").is_null())
        throw CapabilityError("endpoint returned no logprobs for model " + req.model);
      int pos = 0;
      for (const auto& tok : choice.at("logprobs").at("content")) {
        TopTokenDistribution d;
        d.position = pos++;
        d.sampled_token_prob = std::exp(tok.at("logprob").get<double>());
        for (const auto& top : tok.at("top_logprobs"))
          d.observed.emplace_back(top.at("token").get<std::string>(),
                                  std::exp(top.at("logprob").get<double>()));
        if (d.observed.empty())
          d.observed.emplace_back(tok.at("token").get<std::string>(),
                                  d.sampled_token_prob);
        c.token_distributions.push_back(std::move(d));
      }
    }
    batch.completions.push_back(std::move(c));
  }
  if (static_cast<int>(batch.completions.size()) != req.n_samples)
    throw Error("endpoint returned " + std::to_string(batch.completions.size()) +
                " completions, expected " + std::to_string(req.n_samples));
  return batch;
}

namespace {

json echo_score_request(const std::string& context, const std::string& continuation,
                        const std::string& model) {
  json body;
  body["model"] = model;
  body["prompt"] = context + continuation;
  body["max_tokens"] = 0;
  body["echo"] = true;
  body["logprobs"] = 1;
  return body;
}

// Tokens belonging to the continuation are the trailing ones whose
// concatenation covers it.
size_t continuation_start(const std::vector<std::string>& tokens,
                          const std::string& continuation) {
  size_t len = 0;
  size_t i = tokens.size();
  while (i > 0 && len < continuation.size()) {
    --i;
    len += tokens[i].size();
  }
  return i;
}

}  // namespace

TokenLogprobs HttpProvider::score_text(const std::string& context,
                                       const std::string& continuation,
                                       const std::string& model) {
  if (continuation.empty()) throw ValidationError("empty continuation");
  json body = echo_score_request(context, continuation, model);
  json resp;
  try {
    resp = json::parse(post_json("/v1/completions", body.dump()));
  } catch (const Error& e) {
    throw CapabilityError(std::string("endpoint cannot echo-score text (use a "
                                      "completions-style model): ") +
                          e.what());
  }
  const auto& lp = resp.at("choices").at(0).at("logprobs");
  std::vector<std::string> tokens;
  for (const auto& t : lp.at("tokens")) tokens.push_back(t.get<std::string>());
  std::vector<double> logprobs;
  for (const auto& l : lp.at("token_logprobs"))
    logprobs.push_back(l.is_null() ? 0.0 : l.get<double>());
  TokenLogprobs out;
  for (size_t i = continuation_start(tokens, continuation); i < tokens.size(); ++i)
    out.emplace_back(tokens[i], logprobs[i]);
  if (out.empty()) throw CapabilityError("endpoint returned no continuation tokens");
  return out;
}

std::vector<TopTokenDistribution> HttpProvider::score_distributions(
    const std::string& context, const std::string& continuation,
    const std::string& model) {
  if (continuation.empty()) throw ValidationError("empty continuation");
  json body = echo_score_request(context, continuation, model);
  body["logprobs"] = 5;
  json resp;
  try {
    resp = json::parse(post_json("/v1/completions", body.dump()));
  } catch (const Error& e) {
    throw CapabilityError(std::string("endpoint cannot echo-score text (use a "
                                      "completions-style model): ") +
                          e.what());
  }
  const auto& lp = resp.at("choices").at(0).at("logprobs");
  std::vector<std::string> tokens;
  for (const auto& t : lp.at("tokens")) tokens.push_back(t.get<std::string>());
  size_t start = continuation_start(tokens, continuation);
  std::vector<TopTokenDistribution> out;
  int pos = 0;
  for (size_t i = start; i < tokens.size(); ++i) {
    TopTokenDistribution d;
    d.position = pos++;
    const auto& lt = lp.at("token_logprobs").at(i);
    d.sampled_token_prob = lt.is_null() ? 1.0 : std::exp(lt.get<double>());
    const auto& top = lp.at("top_logprobs").at(i);
    if (!top.is_null())
      for (auto it = top.begin(); it != top.end(); ++it)
        d.observed.emplace_back(it.key(), std::exp(it.value().get<double>()));
    bool sampled_seen = false;
    for (const auto& [tok, p] : d.observed)
      if (tok == tokens[i]) sampled_seen = true;
    if (!sampled_seen && !lt.is_null())
      d.observed.emplace_back(tokens[i], d.sampled_token_prob);
    if (d.observed.empty()) continue;
    out.push_back(std::move(d));
  }
  if (out.empty()) throw CapabilityError("endpoint returned no token distributions");
  return out;
}

std::vector<std::vector<double>> HttpProvider::embed(
    const std::string& model, const std::vector<std::string>& inputs) {
  json body;
  body["model"] = model;
  body["input"] = inputs;
  json resp = json::parse(post_json("/v1/embeddings", body.dump()));
  std::vector<std::vector<double>> out(inputs.size());
  for (const auto& item : resp.at("data")) {
    size_t idx = item.at("index").get<size_t>();
    out.at(idx) = item.at("embedding").get<std::vector<double>>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mock provider

namespace {

std::string request_text(const CompletionRequest& req) {
  std::string all;
  for (const auto& m : req.messages) all += m.content + "\n";
  return all;
}

std::string last_user_content(const CompletionRequest& req) {
  for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it)
    if (it->role == "user") return it->content;
  return req.messages.empty() ? "" : req.messages.back().content;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void MockProvider::add_generate_rule(const std::string& match_substring,
                                     std::vector<MockResponse> responses) {
  std::lock_guard<std::mutex> lk(mu_);
  generate_rules_.push_back({match_substring, std::move(responses), 0, -1});
}

void MockProvider::add_generate_texts(const std::string& match_substring,
                                      std::vector<std::string> texts) {
  MockResponse r;
  for (auto& t : texts) r.completions.push_back({std::move(t), {}});
  add_generate_rule(match_substring, {std::move(r)});
}

void MockProvider::add_score_rule(const std::string& match_substring,
                                  TokenLogprobs tokens) {
  std::lock_guard<std::mutex> lk(mu_);
  score_rules_.push_back({match_substring, std::move(tokens)});
}

void MockProvider::add_distribution_rule(const std::string& match_substring,
                                         std::vector<TopTokenDistribution> dists) {
  std::lock_guard<std::mutex> lk(mu_);
  dist_rules_.push_back({match_substring, std::move(dists)});
}

void MockProvider::add_embedding(const std::string& text, std::vector<double> vec) {
  std::lock_guard<std::mutex> lk(mu_);
  embeddings_[text] = std::move(vec);
}

CompletionBatch MockProvider::generate(const CompletionRequest& req) {
  req.validate();
  std::lock_guard<std::mutex> lk(mu_);
  CompletionBatch batch;
  batch.request = req;
  std::string text = request_text(req);

  for (auto& rule : generate_rules_) {
    if (text.find(rule.match) == std::string::npos) continue;
    size_t idx = std::min(rule.next, rule.responses.size() - 1);
    const MockResponse& resp = rule.responses[idx];
    if (resp.fail_permanent) {
      rule.next++;
      throw TransportError("mock: permanent failure for rule '" + rule.match + "'");
    }
    if (rule.transient_left < 0) rule.transient_left = resp.fail_transient;
    if (rule.transient_left > 0) {
      rule.transient_left--;
      throw TransportError("mock: transient failure for rule '" + rule.match + "'");
    }
    rule.next++;
    rule.transient_left = -1;
    for (int i = 0; i < req.n_samples; ++i) {
      const Completion& c = resp.completions[i % resp.completions.size()];
      Completion out = c;
      if (!req.want_logprobs) out.token_distributions.clear();
      batch.completions.push_back(std::move(out));
    }
    return batch;
  }

  if (req.want_logprobs && !supports_logprobs_)
    throw CapabilityError("mock: logprobs unsupported");

  // Default: echo the last user message, tagged with the sample index when
  // more than one is asked for.
  std::string base = last_user_content(req);
  for (int i = 0; i < req.n_samples; ++i) {
    Completion c;
    c.text = base;
    if (req.want_logprobs) {
      TopTokenDistribution d;
      d.position = 0;
      double p = 0.25 + 0.5 * ((fnv1a(base) % 100) / 100.0);
      d.observed = {{base, p}};
      d.sampled_token_prob = p;
      c.token_distributions.push_back(std::move(d));
    }
    batch.completions.push_back(std::move(c));
  }
  return batch;
}

TokenLogprobs MockProvider::score_text(const std::string& context,
                                       const std::string& continuation,
                                       const std::string& model) {
  (void)model;
  if (continuation.empty()) throw ValidationError("empty continuation");
  std::lock_guard<std::mutex> lk(mu_);
  if (chat_only_)
    throw CapabilityError(
        "mock: chat-only endpoint cannot score text; use a completions-style model");
  std::string key = context + "\n" + continuation;
  for (const auto& rule : score_rules_)
    if (key.find(rule.match) != std::string::npos) return rule.tokens;
  // Default: per-token logprob is a pure function of the token itself, so the
  // score is independent of context.
  TokenLogprobs out;
  std::istringstream ss(continuation);
  std::string tok;
  while (ss >> tok)
    out.emplace_back(tok, -1.0 - (fnv1a(tok) % 100) / 100.0);
  if (out.empty()) throw ValidationError("continuation has no tokens");
  return out;
}

std::vector<TopTokenDistribution> MockProvider::score_distributions(
    const std::string& context, const std::string& continuation,
    const std::string& model) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    std::string key = context + "\n" + continuation;
    for (const auto& rule : dist_rules_)
      if (key.find(rule.match) != std::string::npos) return rule.dists;
  }
  // Fall back to one-token distributions built from score_text.
  auto tokens = score_text(context, continuation, model);
  std::vector<TopTokenDistribution> out;
  int pos = 0;
  for (const auto& [tok, lp] : tokens) {
    TopTokenDistribution d;
    d.position = pos++;
    double p = std::exp(lp);
    d.observed = {{tok, p}};
    d.sampled_token_prob = p;
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::vector<double>> MockProvider::embed(
    const std::string& model, const std::vector<std::string>& inputs) {
  (void)model;
  std::lock_guard<std::mutex> lk(mu_);
  std::vector<std::vector<double>> out;
  for (const auto& s : inputs) {
    auto it = embeddings_.find(s);
    if (it != embeddings_.end()) {
      out.push_back(it->second);
      continue;
    }
    // Deterministic 4-dim embedding from the text hash.
    uint64_t h = fnv1a(s);
    std::vector<double> v(4);
    for (int i = 0; i < 4; ++i) v[i] = ((h >> (i * 16)) & 0xffff) / 65535.0;
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

TopTokenDistribution dist_from_json(const json& j) {
  TopTokenDistribution d;
  d.position = j.value("position", 0);
  for (const auto& pair : j.at("observed"))
    d.observed.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
  d.sampled_token_prob = j.value("sampled_prob", d.observed.front().second);
  return d;
}

json dist_to_json(const TopTokenDistribution& d) {
  json j;
  j["position"] = d.position;
  j["observed"] = json::array();
  for (const auto& [tok, p] : d.observed) j["observed"].push_back({tok, p});
  j["sampled_prob"] = d.sampled_token_prob;
  return j;
}

}  // namespace

std::shared_ptr<MockProvider> MockProvider::from_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock script: " + path);
  json script;
  try {
    script = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("mock script parse error: " + std::string(e.what()));
  }
  auto mock = std::make_shared<MockProvider>();
  for (const auto& rule : script.value("generate", json::array())) {
    std::vector<MockResponse> responses;
    for (const auto& resp : rule.at("responses")) {
      MockResponse r;
      r.fail_transient = resp.value("fail_transient", 0);
      r.fail_permanent = resp.value("fail_permanent", false);
      size_t ti = 0;
      for (const auto& text : resp.value("texts", json::array())) {
        Completion c;
        c.text = text.get<std::string>();
        if (resp.contains("dists") && ti < resp.at("dists").size())
          for (const auto& dj : resp.at("dists").at(ti))
            c.token_distributions.push_back(dist_from_json(dj));
        r.completions.push_back(std::move(c));
        ++ti;
      }
      responses.push_back(std::move(r));
    }
    mock->add_generate_rule(rule.at("match").get<std::string>(), std::move(responses));
  }
  for (const auto& rule : script.value("score_text", json::array())) {
    TokenLogprobs tokens;
    for (const auto& pair : rule.at("tokens"))
      tokens.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
    mock->add_score_rule(rule.at("match").get<std::string>(), std::move(tokens));
  }
  for (const auto& rule : script.value("distributions", json::array())) {
    std::vector<TopTokenDistribution> dists;
    for (const auto& dj : rule.at("dists")) dists.push_back(dist_from_json(dj));
    mock->add_distribution_rule(rule.at("match").get<std::string>(), std::move(dists));
  }
  for (const auto& e : script.value("embeddings", json::array()))
    mock->add_embedding(e.at("text").get<std::string>(),
                        e.at("vector").get<std::vector<double>>());
  return mock;
}

// ---------------------------------------------------------------------------
// Record / replay

std::string fingerprint_generate(const CompletionRequest& req) {
  json j;
  j["kind"] = "generate";
  j["model"] = req.model;
  j["messages"] = json::array();
  for (const auto& m : req.messages)
    j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  j["n"] = req.n_samples;
  j["temperature"] = req.temperature;
  j["max_tokens"] = req.max_tokens;
  j["want_logprobs"] = req.want_logprobs;
  j["top_logprobs"] = req.top_logprobs;
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx",
           static_cast<unsigned long long>(fnv1a(j.dump())));
  return std::string("gen-") + buf;
}

std::string fingerprint_score(const std::string& kind, const std::string& context,
                              const std::string& continuation,
                              const std::string& model) {
  json j;
  j["kind"] = kind;
  j["context"] = context;
  j["continuation"] = continuation;
  j["model"] = model;
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx",
           static_cast<unsigned long long>(fnv1a(j.dump())));
  return kind.substr(0, 3) + "-" + buf;
}

namespace {

json batch_to_json(const CompletionBatch& batch) {
  json j;
  j["completions"] = json::array();
  for (const auto& c : batch.completions) {
    json cj;
    cj["text"] = c.text;
    if (!c.token_distributions.empty()) {
      cj["dists"] = json::array();
      for (const auto& d : c.token_distributions) cj["dists"].push_back(dist_to_json(d));
    }
    j["completions"].push_back(std::move(cj));
  }
  return j;
}

CompletionBatch batch_from_json(const json& j, const CompletionRequest& req) {
  CompletionBatch batch;
  batch.request = req;
  for (const auto& cj : j.at("completions")) {
    Completion c;
    c.text = cj.at("text").get<std::string>();
    if (cj.contains("dists"))
      for (const auto& dj : cj.at("dists"))
        c.token_distributions.push_back(dist_from_json(dj));
    batch.completions.push_back(std::move(c));
  }
  return batch;
}

void write_fixture(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write fixture: " + path);
  out << j.dump(2) << "\n";
}

json read_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("missing fixture: " + path +
                  " (record the run before replaying it)");
  return json::parse(in);
}

}  // namespace

RecordingProvider::RecordingProvider(std::shared_ptr<Provider> inner,
                                     std::string fixture_dir)
    : inner_(std::move(inner)), dir_(std::move(fixture_dir)) {
  std::filesystem::create_directories(dir_);
}

std::string RecordingProvider::next_path(const std::string& key) {
  std::lock_guard<std::mutex> lk(mu_);
  int n = seq_[key]++;
  return dir_ + "/" + key + "-" + std::to_string(n) + ".json";
}

CompletionBatch RecordingProvider::generate(const CompletionRequest& req) {
  CompletionBatch batch = inner_->generate(req);
  write_fixture(next_path(fingerprint_generate(req)), batch_to_json(batch));
  return batch;
}

TokenLogprobs RecordingProvider::score_text(const std::string& context,
                                            const std::string& continuation,
                                            const std::string& model) {
  auto tokens = inner_->score_text(context, continuation, model);
  json j;
  j["tokens"] = json::array();
  for (const auto& [tok, lp] : tokens) j["tokens"].push_back({tok, lp});
  write_fixture(next_path(fingerprint_score("score", context, continuation, model)), j);
  return tokens;
}

std::vector<TopTokenDistribution> RecordingProvider::score_distributions(
    const std::string& context, const std::string& continuation,
    const std::string& model) {
  auto dists = inner_->score_distributions(context, continuation, model);
  json j;
  j["dists"] = json::array();
  for (const auto& d : dists) j["dists"].push_back(dist_to_json(d));
  write_fixture(next_path(fingerprint_score("dists", context, continuation, model)), j);
  return dists;
}

std::vector<std::vector<double>> RecordingProvider::embed(
    const std::string& model, const std::vector<std::string>& inputs) {
  auto vecs = inner_->embed(model, inputs);
  std::string joined;
  for (const auto& s : inputs) joined += s + "\x1f";
  json j;
  j["vectors"] = vecs;
  write_fixture(next_path(fingerprint_score("embed", joined, "-", model)), j);
  return vecs;
}

ReplayProvider::ReplayProvider(std::string fixture_dir) : dir_(std::move(fixture_dir)) {}

std::string ReplayProvider::next_path(const std::string& key) {
  std::lock_guard<std::mutex> lk(mu_);
  int n = seq_[key]++;
  return dir_ + "/" + key + "-" + std::to_string(n) + ".json";
}

CompletionBatch ReplayProvider::generate(const CompletionRequest& req) {
  json j = read_fixture(next_path(fingerprint_generate(req)));
  return batch_from_json(j, req);
}

TokenLogprobs ReplayProvider::score_text(const std::string& context,
                                         const std::string& continuation,
                                         const std::string& model) {
  json j = read_fixture(next_path(fingerprint_score("score", context, continuation, model)));
  TokenLogprobs out;
  for (const auto& pair : j.at("tokens"))
    out.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
  return out;
}

std::vector<TopTokenDistribution> ReplayProvider::score_distributions(
    const std::string& context, const std::string& continuation,
    const std::string& model) {
  json j = read_fixture(next_path(fingerprint_score("dists", context, continuation, model)));
  std::vector<TopTokenDistribution> out;
  for (const auto& dj : j.at("dists")) out.push_back(dist_from_json(dj));
  return out;
}

std::vector<std::vector<double>> ReplayProvider::embed(
    const std::string& model, const std::vector<std::string>& inputs) {
  std::string joined;
  for (const auto& s : inputs) joined += s + "\x1f";
  json j = read_fixture(next_path(fingerprint_score("embed", joined, "-", model)));
  return j.at("vectors").get<std::vector<std::vector<double>>>();
}

}  // namespace hg
