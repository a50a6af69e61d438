#pragma once

#include "avsup/backend.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace avsup {

class Clock {
public:
    virtual ~Clock() = default;
    virtual double now() const = 0; // s, monotonic
    virtual void sleep_for(double seconds) = 0;
};

class SteadyClock final : public Clock {
public:
    double now() const override;
    void sleep_for(double seconds) override;
};

/// Spaces outbound requests at least `min_interval` seconds apart.
class RequestPacer {
public:
    RequestPacer(Clock& clock, double min_interval) : clock_(clock), min_interval_(min_interval) {}

    /// Blocks until a request may be sent and stamps the send time.
    void acquire();

private:
    Clock& clock_;
    double min_interval_;
    std::optional<double> last_send_;
};

struct HttpRequest {
    std::string base_url; // scheme://host[:port]
    std::string path;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    double timeout = 30.0;
};

enum class TransportFailure { None, Timeout, Connection };

struct HttpResponse {
    int status = 0;
    std::string body;
    std::optional<double> retry_after; // s
    TransportFailure failure = TransportFailure::None;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib transport; HTTPS requires the OpenSSL build.
class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const HttpRequest& request) override;
};

/// Translates one question into a provider request and the reply back to text.
class ProviderAdapter {
public:
    virtual ~ProviderAdapter() = default;
    virtual HttpRequest build_request(const std::string& system_prompt, const std::string& question,
                                      const BackendConfig& config,
                                      const std::string& api_key) const = 0;
    /// Throws BackendError(Provider) when the body has no text candidate.
    virtual std::string extract_text(const std::string& body) const = 0;
};

/// generateContent REST call of the Gemini API.
class GeminiAdapter final : public ProviderAdapter {
public:
    HttpRequest build_request(const std::string& system_prompt, const std::string& question,
                              const BackendConfig& config,
                              const std::string& api_key) const override;
    std::string extract_text(const std::string& body) const override;
};

/// Live model backend. The system prompt is resent with every question.
class LlmBackend final : public DecisionBackend {
public:
    /// Throws BackendError(MissingApiKey) if the configured variable is unset or empty.
    LlmBackend(BackendConfig config, std::unique_ptr<HttpTransport> transport,
               std::shared_ptr<Clock> clock, std::unique_ptr<ProviderAdapter> adapter);
    /// Same, with the key given explicitly.
    LlmBackend(BackendConfig config, std::string api_key, std::unique_ptr<HttpTransport> transport,
               std::shared_ptr<Clock> clock, std::unique_ptr<ProviderAdapter> adapter);

    BackendReply decide(const DecisionQuery& query) override;
    BackendKind kind() const override { return BackendKind::Llm; }

private:
    BackendConfig config_;
    std::string api_key_;
    std::unique_ptr<HttpTransport> transport_;
    std::shared_ptr<Clock> clock_;
    std::unique_ptr<ProviderAdapter> adapter_;
    RequestPacer pacer_;
};

/// Reads the API key from the environment; throws BackendError(MissingApiKey).
std::string api_key_from_env(const std::string& variable);

} // namespace avsup
