#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "dlcot/prompts.hpp"
#include "dlcot/transport.hpp"

namespace dlcot {

struct GatewayConfig {
  std::string endpoint;              // unused in offline mode
  std::string model = "offline";
  std::string api_key_env = "DLCOT_API_KEY";
  std::filesystem::path cache_dir;
  bool offline = false;
  std::optional<std::string> system_prompt;  // default: no system message

  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_backoff{8000};
  int concurrency = 4;  // in-flight request bound
};

struct CompletionResult {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  bool from_cache = false;
  int attempts = 1;
};

/// Deterministic access to a chat-completion endpoint. Every call is keyed
/// by digest(template, rendered prompt, decoding, model); hits come from the
/// content-addressed cache, misses go to the endpoint with bounded
/// exponential backoff and are then cached. In offline mode the cache is a
/// replay store: a miss is fatal (MissingFixtureError) because it means the
/// fixture set is incomplete. Offline mode performs no network operations.
class Gateway {
 public:
  using SleepFn = std::function<void(std::chrono::milliseconds)>;

  Gateway(GatewayConfig config, std::unique_ptr<Transport> transport = nullptr,
          SleepFn sleep = nullptr);

  const GatewayConfig& config() const { return config_; }

  /// Stable across runs and machines for identical inputs.
  std::string cache_key(const PromptRequest& request) const;

  /// Throws MissingFixtureError (offline miss) or RecordError (retries
  /// exhausted, malformed endpoint response).
  CompletionResult complete(const PromptRequest& request);

  /// Seeds the replay store; used by tests and fixture tooling.
  void put_fixture(const PromptRequest& request, const std::string& response_text,
                   std::size_t prompt_tokens = 0, std::size_t completion_tokens = 0);

  bool has_fixture(const PromptRequest& request) const;

 private:
  std::optional<CompletionResult> read_cache(const std::string& key) const;
  void write_cache(const std::string& key, const PromptRequest& request,
                   const std::string& rendered, const CompletionResult& result);
  std::filesystem::path cache_path(const std::string& key) const;

  GatewayConfig config_;
  std::unique_ptr<Transport> transport_;
  SleepFn sleep_;
  std::counting_semaphore<64> in_flight_;
};

}  // namespace dlcot
