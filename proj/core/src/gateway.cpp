#include "dlcot/gateway.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "dlcot/digest.hpp"
#include "dlcot/errors.hpp"
#include "json.hpp"

namespace dlcot {

namespace fs = std::filesystem;

Gateway::Gateway(GatewayConfig config, std::unique_ptr<Transport> transport,
                 SleepFn sleep)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleep_(std::move(sleep)),
      in_flight_(std::min(std::max(config_.concurrency, 1), 64)) {
  if (config_.cache_dir.empty()) {
    throw FatalError("gateway: cache_dir must be set");
  }
  if (!sleep_) {
    sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (!config_.offline && !transport_ && !config_.endpoint.empty()) {
    transport_ = make_http_transport(config_.endpoint);
  }
}

std::string Gateway::cache_key(const PromptRequest& request) const {
  const std::string rendered = render(request);
  // Key the effective system prompt: the per-request one, else the
  // configured default. A changed system prompt must miss the cache.
  const auto& system_prompt =
      request.system_prompt ? request.system_prompt : config_.system_prompt;
  std::string material;
  material.reserve(rendered.size() + 256);
  material += template_name(request.template_id);
  material += '\n';
  material += config_.model;
  material += '\n';
  material += request.decoding.canonical();
  material += '\n';
  if (system_prompt) {
    material += *system_prompt;
  }
  material += '\n';
  material += rendered;
  return sha256_hex(material);
}

fs::path Gateway::cache_path(const std::string& key) const {
  return config_.cache_dir / key.substr(0, 2) / (key + ".json");
}

std::optional<CompletionResult> Gateway::read_cache(const std::string& key) const {
  std::ifstream in(cache_path(key));
  if (!in.is_open()) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception&) {
    return std::nullopt;  // treat unreadable entries as misses
  }
  CompletionResult result;
  result.text = j.value("response", std::string{});
  if (j.contains("usage")) {
    result.prompt_tokens = j["usage"].value("prompt_tokens", std::size_t{0});
    result.completion_tokens = j["usage"].value("completion_tokens", std::size_t{0});
  }
  result.from_cache = true;
  result.attempts = 1;
  return result;
}

void Gateway::write_cache(const std::string& key, const PromptRequest& request,
                          const std::string& rendered,
                          const CompletionResult& result) {
  const fs::path path = cache_path(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw FatalError("gateway: cannot create cache directory: " + ec.message());
  }
  nlohmann::json j{
      {"key", key},
      {"template", template_name(request.template_id)},
      {"model", config_.model},
      {"prompt_sha256", sha256_hex(rendered)},
      {"response", result.text},
      {"usage",
       {{"prompt_tokens", result.prompt_tokens},
        {"completion_tokens", result.completion_tokens}}}};

  static std::atomic<unsigned> counter{0};
  const fs::path tmp = path.parent_path() /
                       (path.filename().string() + ".tmp" +
                        std::to_string(counter.fetch_add(1)) + "-" +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out.is_open()) {
      throw FatalError("gateway: cannot open cache temp file: " + tmp.string());
    }
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw FatalError("gateway: cache write failed: " + path.string());
  }
}

CompletionResult Gateway::complete(const PromptRequest& request) {
  const std::string rendered = render(request);
  const std::string key = cache_key(request);

  if (auto cached = read_cache(key)) {
    return *cached;
  }
  if (config_.offline) {
    throw MissingFixtureError(key);
  }
  if (!transport_) {
    throw FatalError("gateway: no endpoint configured and not in offline mode");
  }

  nlohmann::json messages = nlohmann::json::array();
  const auto& system_prompt =
      request.system_prompt ? request.system_prompt : config_.system_prompt;
  if (system_prompt) {
    messages.push_back({{"role", "system"}, {"content", *system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", rendered}});

  nlohmann::json body{{"model", config_.model},
                      {"messages", messages},
                      {"temperature", request.decoding.temperature},
                      {"top_p", request.decoding.top_p},
                      {"max_tokens", request.decoding.max_new_tokens}};
  if (request.decoding.top_k) body["top_k"] = *request.decoding.top_k;

  const char* api_key_raw =
      config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());
  const std::string api_key = api_key_raw ? api_key_raw : "";

  std::string last_error;
  auto delay = config_.initial_backoff;
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<64>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  for (int attempt = 1; attempt <= std::max(config_.max_attempts, 1); ++attempt) {
    const TransportResult wire = transport_->post_json(body.dump(), api_key);
    if (wire.ok()) {
      try {
        const auto j = nlohmann::json::parse(wire.body);
        CompletionResult result;
        result.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
          result.prompt_tokens = j["usage"].value("prompt_tokens", std::size_t{0});
          result.completion_tokens = j["usage"].value("completion_tokens", std::size_t{0});
        }
        result.from_cache = false;
        result.attempts = attempt;
        write_cache(key, request, rendered, result);
        return result;
      } catch (const std::exception& e) {
        throw RecordError(std::string("gateway: malformed endpoint response: ") + e.what());
      }
    }
    last_error = wire.error.empty()
                     ? "http status " + std::to_string(wire.status)
                     : wire.error;
    if (!wire.retryable()) {
      throw RecordError("gateway: non-retryable failure: " + last_error);
    }
    if (attempt < config_.max_attempts) {
      sleep_(delay);
      const auto next = std::chrono::milliseconds(
          static_cast<long long>(delay.count() * config_.backoff_factor));
      delay = std::min(std::max(next, delay), config_.max_backoff);
    }
  }
  throw RecordError("gateway: retries exhausted: " + last_error);
}

void Gateway::put_fixture(const PromptRequest& request, const std::string& response_text,
                          std::size_t prompt_tokens, std::size_t completion_tokens) {
  CompletionResult result;
  result.text = response_text;
  result.prompt_tokens = prompt_tokens;
  result.completion_tokens = completion_tokens;
  write_cache(cache_key(request), request, render(request), result);
}

bool Gateway::has_fixture(const PromptRequest& request) const {
  return read_cache(cache_key(request)).has_value();
}

}  // namespace dlcot
