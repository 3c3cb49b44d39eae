#pragma once

#include <memory>
#include <string>

#include "chroma/estimator.hpp"

namespace chroma {

struct HttpBackendConfig {
  std::string url;  // full chat-completions endpoint URL
  std::string api_key;
  int timeout_seconds = 120;
};

// OpenAI-compatible chat-completions client: POSTs
// {model, temperature, messages:[{role:"system"},{role:"user"}]} and returns
// the first choice's message content. 408/429/5xx map to retryable
// TransportError, other non-2xx to non-retryable.
std::unique_ptr<RatingBackend> make_http_backend(const HttpBackendConfig& config);

// Reads CHROMA_ASSOC_API_URL / CHROMA_ASSOC_API_KEY; throws ConfigError when
// either is missing.
HttpBackendConfig http_config_from_env();

}  // namespace chroma
