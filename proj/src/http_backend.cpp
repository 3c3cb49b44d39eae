#include "chroma/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chroma/error.hpp"

namespace chroma {

namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string scheme_host;  // scheme://host[:port], what httplib::Client wants
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("backend URL must start with http:// or https://: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpBackend : public RatingBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw ConfigError("backend URL is empty");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (config_.url.rfind("https://", 0) == 0) {
      throw ConfigError("built without TLS support; use an http:// endpoint");
    }
#endif
  }

  BackendCapabilities capabilities() const override {
    // Real chat APIs are only deterministic at temperature 0 by convention,
    // not by contract.
    return {true, false};
  }

  std::string complete(const std::string& model_id, double temperature,
                       const std::string& system_prompt,
                       const std::string& user_prompt) override {
    const ParsedUrl parsed = split_url(config_.url);
    httplib::Client client(parsed.scheme_host);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    const json body = {
        {"model", model_id},
        {"temperature", temperature},
        {"messages",
         json::array({json{{"role", "system"}, {"content", system_prompt}},
                      json{{"role", "user"}, {"content", user_prompt}}})},
    };

    const auto res = client.Post(parsed.path, headers, body.dump(), "application/json");
    if (!res) {
      throw TransportError("request failed: " + httplib::to_string(res.error()),
                           /*retryable=*/true);
    }
    if (res->status < 200 || res->status >= 300) {
      const bool retryable =
          res->status == 408 || res->status == 429 || res->status >= 500;
      throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body,
                           retryable);
    }
    try {
      const json payload = json::parse(res->body);
      return payload.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw TransportError(std::string("malformed completion response: ") + e.what(),
                           /*retryable=*/true);
    }
  }

 private:
  HttpBackendConfig config_;
};

}  // namespace

std::unique_ptr<RatingBackend> make_http_backend(const HttpBackendConfig& config) {
  return std::make_unique<HttpBackend>(config);
}

HttpBackendConfig http_config_from_env() {
  const char* url = std::getenv("CHROMA_ASSOC_API_URL");
  const char* key = std::getenv("CHROMA_ASSOC_API_KEY");
  if (!url || !*url) {
    throw ConfigError("CHROMA_ASSOC_API_URL is not set");
  }
  if (!key || !*key) {
    throw ConfigError("CHROMA_ASSOC_API_KEY is not set");
  }
  return HttpBackendConfig{url, key};
}

}  // namespace chroma
