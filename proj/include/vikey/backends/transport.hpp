#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vikey/core/error.hpp"
#include "vikey/image.hpp"

namespace vikey::backends {

// JSON-over-HTTP request/response channel. `route` is appended to the
// endpoint's base path ("/embed", "/chat").
class Transport {
public:
    virtual ~Transport() = default;
    virtual nlohmann::json post(std::string_view route, const nlohmann::json& body) = 0;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    // Injectable so tests do not sleep.
    std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };
};

// A failure that may succeed on a later attempt (connection reset, 5xx, 429).
class RetryableError : public TransportError {
public:
    using TransportError::TransportError;
};

// Calls `fn` up to policy.attempts times, doubling the backoff after each
// retryable failure. Non-retryable errors propagate immediately.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, std::string_view what, Fn&& fn) -> decltype(fn()) {
    auto backoff = policy.initial_backoff;
    std::string last;
    for (int attempt = 1; attempt <= policy.attempts; ++attempt) {
        try {
            return fn();
        } catch (const RetryableError& e) {
            last = e.what();
            if (attempt == policy.attempts) break;
            if (policy.sleep) policy.sleep(backoff);
            backoff *= 2;
        }
    }
    throw TransportError(std::string(what) + ": failed after " + std::to_string(policy.attempts) +
                         " attempts: " + last);
}

// Serves responses from a recorded fixture; requests must match exactly.
//
// Fixture layout: {"interactions": [{"route": "/chat", "request": {...}, "response": {...}}]}
class ReplayTransport final : public Transport {
public:
    explicit ReplayTransport(nlohmann::json fixture) : fixture_(std::move(fixture)) {
        if (!fixture_.contains("interactions") || !fixture_["interactions"].is_array())
            throw FormatError("replay fixture: missing 'interactions' array");
    }

    static ReplayTransport from_file(const std::filesystem::path& path) {
        return ReplayTransport(nlohmann::json::parse(read_file(path)));
    }

    nlohmann::json post(std::string_view route, const nlohmann::json& body) override {
        for (const auto& i : fixture_["interactions"])
            if (i.at("route") == route && i.at("request") == body) return i.at("response");
        throw TransportError("replay: no recorded response for " + std::string(route) + " request");
    }

private:
    nlohmann::json fixture_;
};

// Wraps another transport and keeps every exchange, for producing fixtures.
class RecordingTransport final : public Transport {
public:
    explicit RecordingTransport(Transport& inner) : inner_(inner) {}

    nlohmann::json post(std::string_view route, const nlohmann::json& body) override {
        auto response = inner_.post(route, body);
        std::lock_guard lock(mutex_);
        interactions_.push_back({{"route", route}, {"request", body}, {"response", response}});
        return response;
    }

    nlohmann::json fixture() const {
        std::lock_guard lock(mutex_);
        return {{"interactions", interactions_}};
    }

private:
    Transport& inner_;
    mutable std::mutex mutex_;
    std::vector<nlohmann::json> interactions_;
};

}  // namespace vikey::backends
