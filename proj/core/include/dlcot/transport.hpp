#pragma once

#include <memory>
#include <string>

namespace dlcot {

struct TransportResult {
  int status = 0;        // HTTP status, 0 on connection failure
  std::string body;
  std::string error;     // transport-level error description

  bool ok() const { return status == 200 && error.empty(); }
  bool retryable() const {
    if (!error.empty() && status == 0) return true;  // network failure
    return status == 408 || status == 409 || status == 429 || status >= 500;
  }
};

/// Minimal wire abstraction: POST a JSON body, get a response. The real
/// implementation speaks HTTP; tests inject fakes that fail, count calls,
/// or deny the network outright.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportResult post_json(const std::string& body,
                                    const std::string& api_key) = 0;
};

/// HTTP transport for an OpenAI-compatible chat-completions endpoint.
/// `endpoint` is scheme://host[:port][/base-path]; the request path is
/// <base-path>/v1/chat/completions unless the endpoint already ends in a
/// completions path.
std::unique_ptr<Transport> make_http_transport(const std::string& endpoint,
                                               int timeout_seconds = 600);

}  // namespace dlcot
