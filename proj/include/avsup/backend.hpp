#pragma once

#include "avsup/context.hpp"
#include "avsup/rules.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avsup {

enum class BackendKind { Oracle, Llm, Replay };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> parse_backend_kind(std::string_view text);

struct BackendConfig {
    BackendKind kind = BackendKind::Oracle;
    std::string api_key_env_name = "GOOGLE_API_KEY";
    std::string model_identifier = "gemini-1.5-flash";
    std::string endpoint = "https://generativelanguage.googleapis.com";
    double min_request_interval = 4.0; // s
    double request_timeout = 30.0;     // s
    int max_retries = 2;
    std::filesystem::path transcript_path; // replay input

    bool valid() const
    {
        return min_request_interval >= 0.0 && request_timeout > 0.0 && max_retries >= 0;
    }
};

/// One question/answer exchange, stored one JSON object per line.
struct TranscriptEntry {
    double sim_time = 0.0;
    std::string question;
    std::string response;
    double latency = 0.0;
    std::string backend_kind;

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

enum class BackendErrorKind {
    MissingApiKey,
    Timeout,
    RateLimited,
    Transport,
    Provider,
    ReplayExhausted,
    ReplayMismatch,
    Io,
};

std::string_view to_string(BackendErrorKind kind);

class BackendError : public std::runtime_error {
public:
    BackendError(BackendErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    BackendErrorKind kind() const noexcept { return kind_; }

    /// Transient failures are absorbed by the hold-then-brake policy; the rest
    /// abort the run.
    bool transient() const noexcept
    {
        return kind_ == BackendErrorKind::Timeout || kind_ == BackendErrorKind::RateLimited ||
               kind_ == BackendErrorKind::Transport || kind_ == BackendErrorKind::Provider;
    }

private:
    BackendErrorKind kind_;
};

/// A question together with the structured state it was rendered from.
struct DecisionQuery {
    double sim_time = 0.0;
    std::string question;
    RuleInputs inputs;
};

struct BackendReply {
    RawResponse response;
    double latency = 0.0;
    std::string backend_kind;
};

class DecisionBackend {
public:
    virtual ~DecisionBackend() = default;
    virtual BackendReply decide(const DecisionQuery& query) = 0;
    virtual BackendKind kind() const = 0;
};

/// Answers from the rule set directly. The reply text is the canonical
/// rendering so transcripts look the same for every backend.
class OracleBackend final : public DecisionBackend {
public:
    BackendReply decide(const DecisionQuery& query) override;
    BackendKind kind() const override { return BackendKind::Oracle; }
};

/// Replays recorded exchanges in order. Each question must match the next
/// recording after whitespace normalization.
class ReplayBackend final : public DecisionBackend {
public:
    explicit ReplayBackend(std::vector<TranscriptEntry> entries);
    static ReplayBackend from_file(const std::filesystem::path& path);

    BackendReply decide(const DecisionQuery& query) override;
    BackendKind kind() const override { return BackendKind::Replay; }

    std::size_t remaining() const { return entries_.size() - cursor_; }

private:
    std::vector<TranscriptEntry> entries_;
    std::size_t cursor_ = 0;
};

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

std::string to_json_line(const TranscriptEntry& entry);
/// Throws BackendError(Io) on malformed records.
TranscriptEntry parse_json_line(std::string_view line);

/// Throws BackendError(Io) when the file cannot be written.
void record_transcript(std::span<const TranscriptEntry> entries, const std::filesystem::path& path);
std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path);

/// Builds the backend named by `config.kind` (live HTTP client for Llm).
std::unique_ptr<DecisionBackend> make_backend(const BackendConfig& config);

} // namespace avsup
