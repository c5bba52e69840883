#include "http_client.hpp"

#include <httplib.h>

namespace factgpt::detail {

std::optional<ParsedUrl> parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") return std::nullopt;
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl parsed;
    if (path_start == std::string::npos) {
        parsed.base = url;
        parsed.path = "/";
    } else {
        parsed.base = url.substr(0, path_start);
        parsed.path = url.substr(path_start);
    }
    if (parsed.base.size() <= scheme.size() + 3) return std::nullopt;
    return parsed;
}

HttpResponse post_json(const std::string& url, const std::string& body,
                       const std::string& bearer_token, int timeout_ms) {
    HttpResponse response;
    const auto parsed = parse_url(url);
    if (!parsed) {
        response.error = "invalid endpoint URL: " + url;
        return response;
    }

    httplib::Client client(parsed->base);
    client.set_connection_timeout(0, timeout_ms * 1000LL);
    client.set_read_timeout(0, timeout_ms * 1000LL);
    client.set_write_timeout(0, timeout_ms * 1000LL);

    httplib::Headers headers;
    if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);

    const auto result = client.Post(parsed->path, headers, body, "application/json");
    if (!result) {
        const auto err = result.error();
        response.timed_out = err == httplib::Error::ConnectionTimeout ||
                             err == httplib::Error::Read || err == httplib::Error::Write;
        response.error = httplib::to_string(err);
        return response;
    }
    response.status = result->status;
    response.body = result->body;
    return response;
}

} // namespace factgpt::detail
