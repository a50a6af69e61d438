#include "avsup/llm_client.hpp"

#ifdef AVSUP_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

namespace avsup {

double SteadyClock::now() const
{
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void SteadyClock::sleep_for(double seconds)
{
    if (seconds > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }
}

void RequestPacer::acquire()
{
    if (last_send_) {
        // Loop because a real clock may wake slightly early.
        for (double wait = *last_send_ + min_interval_ - clock_.now(); wait > 0.0;
             wait = *last_send_ + min_interval_ - clock_.now()) {
            clock_.sleep_for(wait);
        }
    }
    last_send_ = clock_.now();
}

HttpResponse HttplibTransport::post(const HttpRequest& request)
{
    HttpResponse out;
#ifndef AVSUP_HAVE_OPENSSL
    if (request.base_url.starts_with("https://")) {
        out.failure = TransportFailure::Connection;
        out.body = "built without TLS support";
        return out;
    }
#endif
    httplib::Client client(request.base_url);
    const auto timeout = std::chrono::duration<double>(request.timeout);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [name, value] : request.headers) {
        if (name == "Content-Type") {
            content_type = value;
        } else {
            headers.emplace(name, value);
        }
    }
    auto result = client.Post(request.path, headers, request.body, content_type);
    if (!result) {
        const auto err = result.error();
        out.failure = (err == httplib::Error::Read || err == httplib::Error::Write ||
                       err == httplib::Error::ConnectionTimeout)
                          ? TransportFailure::Timeout
                          : TransportFailure::Connection;
        out.body = httplib::to_string(err);
        return out;
    }
    out.status = result->status;
    out.body = result->body;
    if (result->has_header("Retry-After")) {
        try {
            out.retry_after = std::stod(result->get_header_value("Retry-After"));
        } catch (const std::exception&) {
            // HTTP-date form; fall back to pacing alone
        }
    }
    return out;
}

HttpRequest GeminiAdapter::build_request(const std::string& system_prompt,
                                         const std::string& question, const BackendConfig& config,
                                         const std::string& api_key) const
{
    nlohmann::ordered_json body;
    body["system_instruction"]["parts"] = nlohmann::json::array({{{"text", system_prompt}}});
    body["contents"] = nlohmann::json::array(
        {{{"role", "user"}, {"parts", nlohmann::json::array({{{"text", question}}})}}});
    body["generationConfig"]["temperature"] = 0.0;

    HttpRequest req;
    req.base_url = config.endpoint;
    req.path = "/v1beta/models/" + config.model_identifier + ":generateContent";
    req.headers = {{"x-goog-api-key", api_key}, {"Content-Type", "application/json"}};
    req.body = body.dump();
    req.timeout = config.request_timeout;
    return req;
}

std::string GeminiAdapter::extract_text(const std::string& body) const
{
    try {
        const auto j = nlohmann::json::parse(body);
        std::string text;
        for (const auto& part : j.at("candidates").at(0).at("content").at("parts")) {
            if (part.contains("text")) {
                text += part.at("text").get<std::string>();
            }
        }
        if (text.empty()) {
            throw BackendError(BackendErrorKind::Provider, "model reply carries no text");
        }
        return normalize_whitespace(text);
    } catch (const nlohmann::json::exception& ex) {
        throw BackendError(BackendErrorKind::Provider,
                           std::string("unexpected model reply: ") + ex.what());
    }
}

std::string api_key_from_env(const std::string& variable)
{
    const char* value = std::getenv(variable.c_str());
    if (value == nullptr || *value == '\0') {
        throw BackendError(BackendErrorKind::MissingApiKey,
                           "environment variable " + variable + " is not set");
    }
    return value;
}

LlmBackend::LlmBackend(BackendConfig config, std::unique_ptr<HttpTransport> transport,
                       std::shared_ptr<Clock> clock, std::unique_ptr<ProviderAdapter> adapter)
    : LlmBackend(config, api_key_from_env(config.api_key_env_name), std::move(transport),
                 std::move(clock), std::move(adapter))
{
}

LlmBackend::LlmBackend(BackendConfig config, std::string api_key,
                       std::unique_ptr<HttpTransport> transport, std::shared_ptr<Clock> clock,
                       std::unique_ptr<ProviderAdapter> adapter)
    : config_(std::move(config)),
      api_key_(std::move(api_key)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      adapter_(std::move(adapter)),
      pacer_(*clock_, config_.min_request_interval)
{
    if (api_key_.empty()) {
        throw BackendError(BackendErrorKind::MissingApiKey, "empty API key");
    }
}

BackendReply LlmBackend::decide(const DecisionQuery& query)
{
    const HttpRequest request =
        adapter_->build_request(render_system_prompt(), query.question, config_, api_key_);

    BackendErrorKind last_kind = BackendErrorKind::Transport;
    std::string last_message;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        pacer_.acquire();
        const double sent = clock_->now();
        const HttpResponse response = transport_->post(request);
        const double latency = clock_->now() - sent;

        if (response.failure == TransportFailure::Timeout) {
            last_kind = BackendErrorKind::Timeout;
            last_message = "request timed out: " + response.body;
            continue;
        }
        if (response.failure == TransportFailure::Connection) {
            last_kind = BackendErrorKind::Transport;
            last_message = "connection failed: " + response.body;
            continue;
        }
        if (response.status == 429) {
            last_kind = BackendErrorKind::RateLimited;
            last_message = "rate limited by provider";
            if (response.retry_after && attempt < config_.max_retries) {
                clock_->sleep_for(*response.retry_after);
            }
            continue;
        }
        if (response.status >= 500) {
            last_kind = BackendErrorKind::Transport;
            last_message = "provider returned HTTP " + std::to_string(response.status);
            continue;
        }
        if (response.status == 401 || response.status == 403) {
            throw BackendError(BackendErrorKind::MissingApiKey,
                               "provider rejected the API key (HTTP " +
                                   std::to_string(response.status) + ")");
        }
        if (response.status != 200) {
            throw BackendError(BackendErrorKind::Provider,
                               "provider returned HTTP " + std::to_string(response.status) + ": " +
                                   response.body.substr(0, 200));
        }
        return {RawResponse{adapter_->extract_text(response.body)}, latency,
                std::string(to_string(kind()))};
    }
    throw BackendError(last_kind, last_message);
}

} // namespace avsup
