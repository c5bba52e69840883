#include "factgpt/records.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "factgpt/errors.hpp"

namespace factgpt {

using ordered_json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io_failure, "cannot read " + path.string());
    return in;
}

ordered_json parse_line(const std::string& line, const std::filesystem::path& path, int lineno) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(ErrorCode::io_failure,
              path.string() + ":" + std::to_string(lineno) + ": malformed record");
    return j;
}

} // namespace

std::string make_pair_id(const std::string& claim_id, const std::string& post_id) {
    return claim_id + "|" + post_id;
}

void save_claims(const std::vector<Claim>& claims, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& c : claims) {
        ordered_json j;
        j["id"] = c.id;
        j["text"] = c.text;
        j["date"] = format_iso_date(c.first_debunked);
        j["rating"] = c.rating;
        j["source"] = c.source;
        out << j.dump() << '\n';
    }
}

std::vector<Claim> load_claims(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<Claim> claims;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto j = parse_line(line, path, lineno);
        Claim c;
        c.id = j.at("id").get<std::string>();
        c.text = j.at("text").get<std::string>();
        const auto date = parse_iso_date(j.at("date").get<std::string>());
        if (!date)
            raise(ErrorCode::io_failure,
                  path.string() + ":" + std::to_string(lineno) + ": bad date");
        c.first_debunked = *date;
        c.rating = j.value("rating", "");
        c.source = j.value("source", "");
        claims.push_back(std::move(c));
    }
    return claims;
}

void save_posts(const std::vector<Post>& posts, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& p : posts) {
        ordered_json j;
        j["id"] = p.id;
        j["text"] = p.text;
        j["created_at"] = p.created_at;
        out << j.dump() << '\n';
    }
}

std::vector<Post> load_posts(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<Post> posts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto j = parse_line(line, path, lineno);
        Post p;
        p.id = j.at("id").get<std::string>();
        p.text = j.at("text").get<std::string>();
        p.created_at = j.at("created_at").get<std::string>();
        const auto date = parse_iso_timestamp_date(p.created_at);
        if (!date)
            raise(ErrorCode::io_failure,
                  path.string() + ":" + std::to_string(lineno) + ": bad created_at");
        p.date = *date;
        posts.push_back(std::move(p));
    }
    return posts;
}

void save_pairs(const std::vector<CandidatePair>& pairs, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& p : pairs) {
        ordered_json j;
        j["pair_id"] = make_pair_id(p.claim_id, p.post_id);
        j["claim_id"] = p.claim_id;
        j["post_id"] = p.post_id;
        j["bm25_score"] = p.bm25_score;
        j["cosine_score"] = p.cosine_score;
        out << j.dump() << '\n';
    }
}

std::vector<CandidatePair> load_pairs(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<CandidatePair> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto j = parse_line(line, path, lineno);
        CandidatePair p;
        p.claim_id = j.at("claim_id").get<std::string>();
        p.post_id = j.at("post_id").get<std::string>();
        p.bm25_score = j.at("bm25_score").get<double>();
        p.cosine_score = j.at("cosine_score").get<double>();
        pairs.push_back(std::move(p));
    }
    return pairs;
}

} // namespace factgpt
