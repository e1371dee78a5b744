#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "httplib.h"
#include "vikey/backends/transport.hpp"

namespace vikey::backends {

// Transport over HTTP(S) using cpp-httplib. The base URL may carry a path
// prefix ("http://host:8080/v1"); routes are appended to it.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string base_url, std::optional<std::string> token = std::nullopt, RetryPolicy retry = {},
                  std::chrono::seconds timeout = std::chrono::seconds(120))
        : retry_(std::move(retry)), token_(std::move(token)), timeout_(timeout) {
        const auto scheme_end = base_url.find("://");
        if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + base_url);
        const auto path_start = base_url.find('/', scheme_end + 3);
        origin_ = base_url.substr(0, path_start);
        if (path_start != std::string::npos) prefix_ = base_url.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }

    nlohmann::json post(std::string_view route, const nlohmann::json& body) override {
        const std::string path = prefix_ + std::string(route);
        const std::string payload = body.dump();
        return with_retries(retry_, "POST " + origin_ + path, [&]() -> nlohmann::json {
            httplib::Client client(origin_);
            client.set_connection_timeout(timeout_);
            client.set_read_timeout(timeout_);
            client.set_write_timeout(timeout_);
            httplib::Headers headers;
            if (token_) headers.emplace("Authorization", "Bearer " + *token_);
            auto res = client.Post(path, headers, payload, "application/json");
            if (!res) throw RetryableError("connection error: " + httplib::to_string(res.error()));
            if (res->status == 429 || res->status >= 500)
                throw RetryableError("HTTP " + std::to_string(res->status));
            if (res->status < 200 || res->status >= 300)
                throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::parse_error& e) {
                throw TransportError(std::string("malformed JSON response: ") + e.what());
            }
        });
    }

private:
    RetryPolicy retry_;
    std::optional<std::string> token_;
    std::chrono::seconds timeout_;
    std::string origin_;
    std::string prefix_;
};

}  // namespace vikey::backends
