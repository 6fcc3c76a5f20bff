#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "socsim/config.hpp"
#include "socsim/types.hpp"

namespace socsim::llm {

using nlohmann::json;

struct HttpResponse {
  int status = 0;           // 0 when the request never got a response
  std::string body;
  std::string error;        // network-level failure description
  double latency_ms = 0.0;
};

// One chat-completion POST. `kind` names the prompt (plan, vote, ...) for transports that
// route canned answers; network transports ignore it.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers, int timeout_ms,
                            const std::string& kind) = 0;
};

// Wraps assistant text in an OpenAI-style chat-completion body.
inline std::string completion_body(const std::string& content, int prompt_tokens = 0,
                                   int completion_tokens = 0) {
  json j{{"choices", json::array({{{"index", 0},
                                    {"message", {{"role", "assistant"}, {"content", content}}},
                                    {"finish_reason", "stop"}}})},
         {"usage",
          {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}}}};
  return j.dump();
}

// Scripted transport for tests: a function of (request body, kind, call index).
class MockTransport : public Transport {
 public:
  using Handler = std::function<HttpResponse(const json& request, const std::string& kind, int call)>;

  explicit MockTransport(Handler h) : handler_(std::move(h)) {}

  HttpResponse post(const std::string&, const std::string& body,
                    const std::map<std::string, std::string>&, int, const std::string& kind) override {
    std::lock_guard<std::mutex> lock(mu_);
    const int call = calls_++;
    auto request = json::parse(body);
    requests_.push_back(request);
    return handler_(request, kind, call);
  }

  int calls() const { return calls_; }
  const std::vector<json>& requests() const { return requests_; }

  static HttpResponse ok(const std::string& content) { return {200, completion_body(content), "", 0.0}; }
  static HttpResponse status(int code) { return {code, "{\"error\":\"mock\"}", "", 0.0}; }

 private:
  Handler handler_;
  std::mutex mu_;
  int calls_ = 0;
  std::vector<json> requests_;
};

// Replays canned responses from a corpus file, cycling per prompt kind:
//   {"schema_version": 1, "responses": {"plan": [...], "vote": [...], ...}}
// An entry is either assistant text or {"status": 503} / {"status": 200, "content": "..."}.
class CorpusTransport : public Transport {
 public:
  explicit CorpusTransport(const json& corpus) {
    if (corpus.value("schema_version", 0) != kSchemaVersion || !corpus.contains("responses"))
      throw ConfigError("mock corpus: expected {schema_version: 1, responses: {...}}");
    for (const auto& [kind, entries] : corpus["responses"].items()) {
      if (!entries.is_array() || entries.empty())
        throw ConfigError("mock corpus: responses." + kind + " must be a non-empty array");
      responses_[kind] = entries.get<std::vector<json>>();
    }
  }

  static std::shared_ptr<CorpusTransport> from_file(const std::string& path) {
    json j;
    try {
      j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
      throw ConfigError("mock corpus " + path + ": " + e.what());
    } catch (const ArtifactError&) {
      throw ConfigError("mock corpus: cannot read " + path);
    }
    return std::make_shared<CorpusTransport>(j);
  }

  HttpResponse post(const std::string&, const std::string&, const std::map<std::string, std::string>&,
                    int, const std::string& kind) override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = responses_.find(kind);
    if (it == responses_.end()) return {404, "{\"error\":\"no canned response\"}", "", 0.0};
    const auto& entries = it->second;
    const json& e = entries[cursor_[kind]++ % entries.size()];
    if (e.is_string()) return MockTransport::ok(e.get<std::string>());
    const int status = e.value("status", 200);
    if (status == 200) return MockTransport::ok(e.value("content", std::string()));
    return MockTransport::status(status);
  }

 private:
  std::map<std::string, std::vector<json>> responses_;
  std::map<std::string, std::size_t> cursor_;
  std::mutex mu_;
};

}  // namespace socsim::llm
