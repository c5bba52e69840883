#pragma once

// Internal helper: one-shot JSON POST over HTTP(S). Not installed.

#include <optional>
#include <string>

namespace factgpt::detail {

struct HttpResponse {
    int status = 0;          // 0 when no response was received
    std::string body;
    bool timed_out = false;
    std::string error;       // transport-level description when status == 0
};

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading '/', defaults to "/"
};

std::optional<ParsedUrl> parse_url(const std::string& url);

/// POSTs `body` as application/json. `bearer_token`, when non-empty, is sent
/// as an Authorization header. Never throws; transport failures come back as
/// status 0 with `error` set.
HttpResponse post_json(const std::string& url, const std::string& body,
                       const std::string& bearer_token, int timeout_ms);

} // namespace factgpt::detail
