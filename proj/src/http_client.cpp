#include "prospect/http_client.hpp"

#include <thread>

#include "httplib.h"
#include "prospect/error.hpp"

namespace prospect {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("backend URL '" + url + "' has no scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = url;
    } else {
        out.origin = url.substr(0, path_start);
        out.prefix = url.substr(path_start);
        while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    }
    return out;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

nlohmann::json post_json(const HttpEndpoint& endpoint, const std::string& path, const nlohmann::json& body) {
    const auto url = split_url(endpoint.base_url);
    const auto full_path = url.prefix + path;
    const auto payload = body.dump();

    httplib::Headers headers;
    if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);

    auto backoff = endpoint.retry.initial_backoff;
    const int attempts = std::max(1, endpoint.retry.max_attempts);
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(backoff.count()) * endpoint.retry.backoff_multiplier));
        }

        httplib::Client client(url.origin);
        client.set_connection_timeout(endpoint.timeout);
        client.set_read_timeout(endpoint.timeout);
        client.set_write_timeout(endpoint.timeout);
        const auto res = client.Post(full_path, headers, payload, "application/json");

        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (retryable_status(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw BackendError(endpoint.base_url + full_path + ": HTTP " + std::to_string(res->status) + ": " +
                                   res->body.substr(0, 200),
                               false);
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
            throw BackendError(endpoint.base_url + full_path + ": unparsable response: " + e.what(), false);
        }
    }
    throw BackendError(endpoint.base_url + full_path + ": giving up after " + std::to_string(attempts) +
                           " attempts (" + last_error + ")",
                       true);
}

}  // namespace prospect
