#pragma once

#include <chrono>
#include <string>

#include "json.hpp"

namespace prospect {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{200};
    double backoff_multiplier = 2.0;
};

/// Where and how to reach an HTTP backend.
struct HttpEndpoint {
    std::string base_url;      // e.g. "http://127.0.0.1:8080" or "https://api.example.com/v1"
    std::string api_key;       // sent as "Authorization: Bearer <key>" when non-empty
    std::chrono::seconds timeout{60};
    RetryPolicy retry;
};

/// POSTs `body` to base_url + path and returns the parsed JSON response.
/// Transport errors, 429 and 5xx are retried with exponential backoff; after
/// the last attempt they surface as a retryable BackendError. Other non-2xx
/// statuses and unparsable bodies throw a non-retryable BackendError.
/// Thread-safe: each call uses its own connection.
nlohmann::json post_json(const HttpEndpoint& endpoint, const std::string& path, const nlohmann::json& body);

}  // namespace prospect
