#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "factgpt/labels.hpp"
#include "factgpt/prompts.hpp"

namespace factgpt {

enum class ChatKind { remote, mock };

struct ChatProviderSpec {
    ChatKind kind = ChatKind::mock;
    std::string endpoint;                  // required for remote
    std::string model_name;
    std::optional<double> temperature;     // unset: caller-supplied default applies
    int max_retries = 3;
    int timeout_ms = 30000;
    int backoff_ms = 500;                  // doubled per retry
    std::optional<int> max_tokens = 512;
    std::string api_key_env;               // environment variable with the bearer token
    std::string script_path;               // mock: newline-delimited script file
    double requests_per_minute = 0.0;      // 0 disables rate limiting
    int max_in_flight = 8;
    int parallelism = 1;                   // suggested annotation fan-out
};

struct Completion {
    std::string text;
    std::string provider;  // model name
    std::chrono::milliseconds latency{0};
    int retries = 0;
    bool empty_or_refusal = false;  // set when text is empty after trimming
};

/// Per-call sampling controls. Effective temperature resolves as: explicit
/// `temperature` override, else the provider spec's value (the per-model
/// override), else `default_temperature` (the stage default: 0 for
/// annotation, 1 for generation).
struct CallOptions {
    std::optional<double> temperature;
    double default_temperature = 0.0;
    std::optional<int> max_tokens;
};

/// Audit record emitted for every completed call. Contains no timing, so
/// sinks that persist it stay byte-reproducible.
struct CompletionLogEntry {
    std::string prompt_sha256;
    std::string model;
    double temperature = 0.0;
    std::string response_sha256;
};

using CompletionLogSink = std::function<void(const CompletionLogEntry&)>;

/// Hex SHA-256 over the canonical request serialization
/// {"messages":[{"content":...,"role":...},...],"model":...} (sorted keys,
/// no whitespace). Mock script files key their entries by this digest.
std::string prompt_digest(const std::string& model_name, const MessageSeq& messages);

/// Chat-completion access, remote or scripted.
///
/// Remote providers speak the prevailing chat-completion wire contract:
/// request {model, messages: [{role, content}...], temperature[, max_tokens]},
/// response {choices: [{message: {content}}]}. Transient failures (transport
/// errors, 408/429/5xx) are retried with exponential backoff up to
/// max_retries; exhaustion raises ProviderUnavailable (or Timeout when the
/// last attempt timed out). Calls are rate-limited by a token bucket and a
/// bounded in-flight count.
///
/// Mock providers replay a script: newline-delimited JSON records
/// {prompt_sha256, response}. Repeated entries for one digest are consumed
/// in file order, the last one repeating thereafter, so deterministic
/// retry sequences can be scripted. A digest with no entry raises ScriptMiss.
///
/// Thread-safe; concurrent calls are allowed up to max_in_flight.
class ChatClient {
public:
    explicit ChatClient(ChatProviderSpec spec);
    ~ChatClient();

    ChatClient(ChatClient&&) noexcept;
    ChatClient& operator=(ChatClient&&) noexcept;

    Completion complete(const MessageSeq& prompt, const CallOptions& options = {}) const;

    double effective_temperature(const CallOptions& options) const;

    void set_log_sink(CompletionLogSink sink);

    const ChatProviderSpec& spec() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Extracts the verdict from a free-text response: case-insensitive scan for
/// the three label keywords, taking the last occurrence. A "final answer is"
/// phrase takes precedence: the first keyword after its last occurrence wins,
/// even if a bare keyword appears later. Throws UnparsableResponse when no
/// keyword occurs.
EntailmentLabel parse_entailment(const std::string& text);

/// Same scan without throwing; nullopt marks an unparsable response.
std::optional<EntailmentLabel> try_parse_entailment(const std::string& text);

} // namespace factgpt
