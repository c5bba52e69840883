#include "factgpt/chat.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "factgpt/digest.hpp"
#include "factgpt/errors.hpp"
#include "factgpt/text.hpp"
#include "http_client.hpp"

namespace factgpt {

using nlohmann::json;

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Token bucket: capacity = requests_per_minute, refilled continuously.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_minute)
        : capacity_(requests_per_minute),
          tokens_(requests_per_minute),
          last_(std::chrono::steady_clock::now()) {}

    void acquire() {
        if (capacity_ <= 0.0) return;
        std::unique_lock<std::mutex> lock(mutex_);
        for (;;) {
            refill();
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            const double deficit = 1.0 - tokens_;
            const auto wait = std::chrono::milliseconds(
                static_cast<long long>(deficit / capacity_ * 60000.0) + 1);
            lock.unlock();
            std::this_thread::sleep_for(wait);
            lock.lock();
        }
    }

private:
    void refill() {
        const auto now = std::chrono::steady_clock::now();
        const double elapsed_min =
            std::chrono::duration_cast<std::chrono::duration<double>>(now - last_).count() / 60.0;
        tokens_ = std::min(capacity_, tokens_ + elapsed_min * capacity_);
        last_ = now;
    }

    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mutex_;
};

/// Bounded in-flight request count.
class InflightGate {
public:
    explicit InflightGate(int limit) : limit_(std::max(1, limit)) {}

    void enter() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }
    void leave() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --active_;
        }
        cv_.notify_one();
    }

private:
    int limit_;
    int active_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

} // namespace

struct ChatClient::Impl {
    ChatProviderSpec spec;
    RateLimiter limiter;
    InflightGate gate;
    CompletionLogSink sink;
    mutable std::mutex sink_mutex;

    // Mock script: digest -> responses in file order; cursor advances per
    // call and sticks at the last entry.
    std::unordered_map<std::string, std::vector<std::string>> script;
    mutable std::unordered_map<std::string, std::size_t> cursors;
    mutable std::mutex script_mutex;

    explicit Impl(ChatProviderSpec s)
        : spec(std::move(s)), limiter(spec.requests_per_minute), gate(spec.max_in_flight) {}
};

std::string prompt_digest(const std::string& model_name, const MessageSeq& messages) {
    json canon;
    canon["model"] = model_name;
    auto arr = json::array();
    for (const auto& m : messages) {
        json jm;
        jm["role"] = std::string(to_string(m.role));
        jm["content"] = m.content;
        arr.push_back(std::move(jm));
    }
    canon["messages"] = std::move(arr);
    return sha256_hex(canon.dump());  // nlohmann::json orders keys alphabetically
}

ChatClient::ChatClient(ChatProviderSpec spec) : impl_(std::make_unique<Impl>(std::move(spec))) {
    const auto& s = impl_->spec;
    if (s.kind == ChatKind::remote && s.endpoint.empty())
        raise(ErrorCode::config_invalid, "remote chat provider requires an endpoint");
    if (s.model_name.empty())
        raise(ErrorCode::config_invalid, "chat provider requires a model name");
    if (s.temperature && *s.temperature < 0.0)
        raise(ErrorCode::config_invalid, "temperature must be >= 0");

    if (s.kind == ChatKind::mock) {
        if (s.script_path.empty())
            raise(ErrorCode::config_invalid, "mock chat provider requires a script file");
        std::ifstream in(s.script_path, std::ios::binary);
        if (!in) raise(ErrorCode::missing_input, "cannot open mock script " + s.script_path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            json j = json::parse(line, nullptr, false);
            // Both "response" and "response_text" are accepted spellings.
            const char* response_key =
                !j.is_discarded() && j.contains("response_text") ? "response_text" : "response";
            if (j.is_discarded() || !j.contains("prompt_sha256") || !j.contains(response_key))
                raise(ErrorCode::io_failure, s.script_path + ":" + std::to_string(lineno) +
                                                 ": expected {prompt_sha256, response}");
            impl_->script[j["prompt_sha256"].get<std::string>()].push_back(
                j[response_key].get<std::string>());
        }
    }
}

ChatClient::~ChatClient() = default;
ChatClient::ChatClient(ChatClient&&) noexcept = default;
ChatClient& ChatClient::operator=(ChatClient&&) noexcept = default;

const ChatProviderSpec& ChatClient::spec() const { return impl_->spec; }

void ChatClient::set_log_sink(CompletionLogSink sink) { impl_->sink = std::move(sink); }

double ChatClient::effective_temperature(const CallOptions& options) const {
    if (options.temperature) return *options.temperature;
    if (impl_->spec.temperature) return *impl_->spec.temperature;
    return options.default_temperature;
}

Completion ChatClient::complete(const MessageSeq& prompt, const CallOptions& options) const {
    if (prompt.empty() || prompt.front().role != Role::system)
        raise(ErrorCode::config_invalid, "prompt must start with a system message");

    const auto& spec = impl_->spec;
    const double temperature = effective_temperature(options);
    const auto start = std::chrono::steady_clock::now();
    const std::string digest = prompt_digest(spec.model_name, prompt);

    Completion completion;
    completion.provider = spec.model_name;

    if (spec.kind == ChatKind::mock) {
        std::lock_guard<std::mutex> lock(impl_->script_mutex);
        const auto it = impl_->script.find(digest);
        if (it == impl_->script.end())
            raise(ErrorCode::script_miss,
                  "mock script has no entry for prompt " + digest + " (model " + spec.model_name +
                      ")");
        auto& cursor = impl_->cursors[digest];
        completion.text = it->second[std::min(cursor, it->second.size() - 1)];
        ++cursor;
    } else {
        json request;
        request["model"] = spec.model_name;
        auto arr = json::array();
        for (const auto& m : prompt)
            arr.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
        request["messages"] = std::move(arr);
        request["temperature"] = temperature;
        const auto max_tokens = options.max_tokens ? options.max_tokens : spec.max_tokens;
        if (max_tokens) request["max_tokens"] = *max_tokens;
        const std::string body = request.dump();

        std::string token;
        if (!spec.api_key_env.empty()) {
            if (const char* value = std::getenv(spec.api_key_env.c_str())) token = value;
        }

        detail::HttpResponse response;
        const int attempts = 1 + std::max(0, spec.max_retries);
        int attempt = 0;
        for (; attempt < attempts; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    static_cast<long long>(spec.backoff_ms) << (attempt - 1)));
            }
            impl_->limiter.acquire();
            impl_->gate.enter();
            response = detail::post_json(spec.endpoint, body, token, spec.timeout_ms);
            impl_->gate.leave();
            if (response.status == 200) break;
            const bool transient = response.status == 0 || response.status == 408 ||
                                   response.status == 429 || response.status >= 500;
            if (!transient) break;
        }
        completion.retries = std::min(attempt, attempts - 1);

        if (response.status != 200) {
            if (response.status == 0 && response.timed_out)
                raise(ErrorCode::timeout, "chat endpoint timed out after " +
                                              std::to_string(completion.retries) + " retries");
            const std::string status = response.status == 0
                                           ? response.error
                                           : "HTTP " + std::to_string(response.status);
            raise(ErrorCode::provider_unavailable,
                  "chat endpoint failed (" + status + ") after " +
                      std::to_string(completion.retries) + " retries");
        }

        json parsed = json::parse(response.body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty() ||
            !parsed["choices"][0].contains("message") ||
            !parsed["choices"][0]["message"].contains("content")) {
            raise(ErrorCode::provider_unavailable,
                  "chat response is not {choices: [{message: {content}}]}");
        }
        completion.text = parsed["choices"][0]["message"]["content"].get<std::string>();
    }

    completion.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    completion.empty_or_refusal = trim(completion.text).empty();

    if (impl_->sink) {
        CompletionLogEntry entry;
        entry.prompt_sha256 = digest;
        entry.model = spec.model_name;
        entry.temperature = temperature;
        entry.response_sha256 = sha256_hex(completion.text);
        std::lock_guard<std::mutex> lock(impl_->sink_mutex);
        impl_->sink(entry);
    }
    return completion;
}

std::optional<EntailmentLabel> try_parse_entailment(const std::string& text) {
    const std::string lower = ascii_lower(text);

    struct Keyword {
        std::string_view word;
        EntailmentLabel label;
    };
    static constexpr std::array<Keyword, 3> keywords = {{
        {"entailment", EntailmentLabel::entailment},
        {"neutral", EntailmentLabel::neutral},
        {"contradiction", EntailmentLabel::contradiction},
    }};

    // "final answer is" wins: the first keyword after its last occurrence.
    const auto phrase_pos = lower.rfind("final answer is");
    if (phrase_pos != std::string::npos) {
        std::size_t best = std::string::npos;
        std::optional<EntailmentLabel> label;
        for (const auto& kw : keywords) {
            const auto pos = lower.find(kw.word, phrase_pos);
            if (pos != std::string::npos && pos < best) {
                best = pos;
                label = kw.label;
            }
        }
        if (label) return label;
    }

    std::size_t last = std::string::npos;
    std::optional<EntailmentLabel> label;
    for (const auto& kw : keywords) {
        const auto pos = lower.rfind(kw.word);
        if (pos != std::string::npos && (last == std::string::npos || pos > last)) {
            last = pos;
            label = kw.label;
        }
    }
    return label;
}

EntailmentLabel parse_entailment(const std::string& text) {
    const auto label = try_parse_entailment(text);
    if (!label)
        raise(ErrorCode::unparsable_response, "no entailment keyword in response");
    return *label;
}

} // namespace factgpt
