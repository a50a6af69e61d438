#include "avsup/backend.hpp"

#include "avsup/llm_client.hpp"

#include "json.hpp"

#include <cctype>
#include <fstream>

namespace avsup {

std::string_view to_string(BackendKind kind)
{
    switch (kind) {
    case BackendKind::Oracle: return "oracle";
    case BackendKind::Llm: return "llm";
    case BackendKind::Replay: return "replay";
    }
    return "?";
}

std::optional<BackendKind> parse_backend_kind(std::string_view text)
{
    if (text == "oracle") return BackendKind::Oracle;
    if (text == "llm") return BackendKind::Llm;
    if (text == "replay") return BackendKind::Replay;
    return std::nullopt;
}

std::string_view to_string(BackendErrorKind kind)
{
    switch (kind) {
    case BackendErrorKind::MissingApiKey: return "missing-api-key";
    case BackendErrorKind::Timeout: return "timeout";
    case BackendErrorKind::RateLimited: return "rate-limited";
    case BackendErrorKind::Transport: return "transport";
    case BackendErrorKind::Provider: return "provider";
    case BackendErrorKind::ReplayExhausted: return "replay-exhausted";
    case BackendErrorKind::ReplayMismatch: return "replay-mismatch";
    case BackendErrorKind::Io: return "io";
    }
    return "?";
}

BackendReply OracleBackend::decide(const DecisionQuery& query)
{
    const Decision d = evaluate_rules(query.inputs).value_or(Decision::neutral());
    return {RawResponse{render_decision(d)}, 0.0, std::string(to_string(kind()))};
}

std::string normalize_whitespace(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (const char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(ch);
    }
    return out;
}

ReplayBackend::ReplayBackend(std::vector<TranscriptEntry> entries) : entries_(std::move(entries)) {}

ReplayBackend ReplayBackend::from_file(const std::filesystem::path& path)
{
    return ReplayBackend(load_transcript(path));
}

BackendReply ReplayBackend::decide(const DecisionQuery& query)
{
    if (cursor_ >= entries_.size()) {
        throw BackendError(BackendErrorKind::ReplayExhausted,
                           "transcript exhausted after " + std::to_string(entries_.size()) +
                               " exchanges");
    }
    const TranscriptEntry& entry = entries_[cursor_];
    if (normalize_whitespace(entry.question) != normalize_whitespace(query.question)) {
        throw BackendError(BackendErrorKind::ReplayMismatch,
                           "exchange " + std::to_string(cursor_) + ": recorded question \"" +
                               entry.question + "\" differs from \"" + query.question + "\"");
    }
    ++cursor_;
    // Keep the recorded provenance so a replayed run logs exactly what was recorded.
    return {RawResponse{entry.response}, entry.latency, entry.backend_kind};
}

std::string to_json_line(const TranscriptEntry& entry)
{
    nlohmann::ordered_json j;
    j["sim_time"] = entry.sim_time;
    j["question"] = entry.question;
    j["response"] = entry.response;
    j["latency"] = entry.latency;
    j["backend_kind"] = entry.backend_kind;
    return j.dump();
}

TranscriptEntry parse_json_line(std::string_view line)
{
    try {
        const auto j = nlohmann::json::parse(line);
        TranscriptEntry e;
        e.sim_time = j.at("sim_time").get<double>();
        e.question = j.at("question").get<std::string>();
        e.response = j.at("response").get<std::string>();
        e.latency = j.value("latency", 0.0);
        e.backend_kind = j.value("backend_kind", std::string{});
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw BackendError(BackendErrorKind::Io, std::string("bad transcript record: ") + ex.what());
    }
}

void record_transcript(std::span<const TranscriptEntry> entries, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw BackendError(BackendErrorKind::Io, "cannot write transcript " + path.string());
    }
    for (const auto& e : entries) {
        out << to_json_line(e) << '\n';
    }
    if (!out) {
        throw BackendError(BackendErrorKind::Io, "failed writing transcript " + path.string());
    }
}

std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw BackendError(BackendErrorKind::Io, "cannot read transcript " + path.string());
    }
    std::vector<TranscriptEntry> entries;
    std::string line;
    double last_time = 0.0;
    while (std::getline(in, line)) {
        if (normalize_whitespace(line).empty()) {
            continue;
        }
        TranscriptEntry e = parse_json_line(line);
        if (e.sim_time < 0.0 || (!entries.empty() && e.sim_time < last_time)) {
            throw BackendError(BackendErrorKind::Io,
                               "transcript times must be nonnegative and nondecreasing");
        }
        last_time = e.sim_time;
        entries.push_back(std::move(e));
    }
    return entries;
}

std::unique_ptr<DecisionBackend> make_backend(const BackendConfig& config)
{
    switch (config.kind) {
    case BackendKind::Oracle:
        return std::make_unique<OracleBackend>();
    case BackendKind::Replay:
        return std::make_unique<ReplayBackend>(ReplayBackend::from_file(config.transcript_path));
    case BackendKind::Llm:
        return std::make_unique<LlmBackend>(config, std::make_unique<HttplibTransport>(),
                                            std::make_shared<SteadyClock>(),
                                            std::make_unique<GeminiAdapter>());
    }
    throw std::invalid_argument("unknown backend kind");
}

} // namespace avsup
