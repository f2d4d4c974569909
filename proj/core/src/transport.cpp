#include "dlcot/transport.hpp"

#include "dlcot/errors.hpp"
#include "httplib.h"

namespace dlcot {

namespace {

class HttplibTransport : public Transport {
 public:
  HttplibTransport(const std::string& endpoint, int timeout_seconds) {
    std::string rest = endpoint;
    const std::size_t scheme_end = rest.find("://");
    if (scheme_end == std::string::npos) {
      throw FatalError("endpoint must include a scheme: " + endpoint);
    }
    const std::size_t path_start = rest.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_ = rest;
      path_ = "/v1/chat/completions";
    } else {
      base_ = rest.substr(0, path_start);
      path_ = rest.substr(path_start);
      if (path_.find("completions") == std::string::npos) {
        if (path_.back() == '/') path_.pop_back();
        path_ += "/v1/chat/completions";
      }
    }
    client_ = std::make_unique<httplib::Client>(base_);
    client_->set_connection_timeout(timeout_seconds, 0);
    client_->set_read_timeout(timeout_seconds, 0);
    client_->set_write_timeout(timeout_seconds, 0);
  }

  TransportResult post_json(const std::string& body,
                            const std::string& api_key) override {
    httplib::Headers headers;
    if (!api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key);
    }
    auto response = client_->Post(path_, headers, body, "application/json");
    TransportResult result;
    if (!response) {
      result.error = "connection failed: " + httplib::to_string(response.error());
      return result;
    }
    result.status = response->status;
    result.body = response->body;
    return result;
  }

 private:
  std::string base_;
  std::string path_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& endpoint,
                                               int timeout_seconds) {
  return std::make_unique<HttplibTransport>(endpoint, timeout_seconds);
}

}  // namespace dlcot
