#include "factgpt/ingest.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>

#include "factgpt/errors.hpp"
#include "factgpt/text.hpp"

namespace factgpt {

using nlohmann::json;

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct Rejection {
    int lineno;
    std::string ref;
    RejectReason reason;
};

std::optional<std::string> get_string(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

std::vector<std::pair<int, std::string>> read_record_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::missing_input, "cannot open " + path.string());
    std::vector<std::pair<int, std::string>> lines;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;  // blank lines are not records
        lines.emplace_back(lineno, line);
    }
    if (lines.empty()) raise(ErrorCode::empty_input, path.string() + " holds no records");
    return lines;
}

void finish_report(IngestReport& report, std::vector<Rejection> rejections) {
    std::sort(rejections.begin(), rejections.end(),
              [](const Rejection& a, const Rejection& b) { return a.lineno < b.lineno; });
    for (auto& r : rejections) report.rejected.push_back({std::move(r.ref), r.reason});
}

} // namespace

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::bad_record: return "BAD_RECORD";
        case RejectReason::bad_id: return "BAD_ID";
        case RejectReason::missing_field: return "MISSING_FIELD";
        case RejectReason::missing_timestamp: return "MISSING_TIMESTAMP";
        case RejectReason::bad_date: return "BAD_DATE";
        case RejectReason::empty_text: return "EMPTY_TEXT";
        case RejectReason::repost: return "REPOST";
        case RejectReason::url_present: return "URL_PRESENT";
        case RejectReason::rating_not_allowed: return "RATING_NOT_ALLOWED";
        case RejectReason::duplicate_id: return "DUPLICATE_ID";
        case RejectReason::duplicate_text: return "DUPLICATE_TEXT";
    }
    return "BAD_RECORD";
}

const std::set<std::string>& default_rating_allowlist() {
    static const std::set<std::string> allowlist = {"false", "incorrect", "fake"};
    return allowlist;
}

ClaimIngestResult ingest_claims(const std::filesystem::path& path,
                                const std::set<std::string>& rating_allowlist) {
    std::set<std::string> allowed;
    for (const auto& r : rating_allowlist) allowed.insert(ascii_lower(r));

    const auto lines = read_record_lines(path);

    ClaimIngestResult result;
    result.report.read_count = lines.size();
    std::vector<Rejection> rejections;

    struct Candidate {
        int lineno;
        Claim claim;
        std::string norm_text;
    };
    std::vector<Candidate> candidates;

    for (const auto& [lineno, line] : lines) {
        const std::string line_ref = "line:" + std::to_string(lineno);
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            rejections.push_back({lineno, line_ref, RejectReason::bad_record});
            continue;
        }
        const auto id = get_string(j, "id");
        if (!id) {
            rejections.push_back({lineno, line_ref, RejectReason::missing_field});
            continue;
        }
        if (!is_valid_record_id(*id)) {
            rejections.push_back({lineno, line_ref, RejectReason::bad_id});
            continue;
        }
        const auto text = get_string(j, "text");
        const auto date_str = get_string(j, "date");
        const auto rating = get_string(j, "rating");
        if (!text || !date_str || !rating) {
            rejections.push_back({lineno, *id, RejectReason::missing_field});
            continue;
        }
        const auto date = parse_iso_date(*date_str);
        if (!date) {
            rejections.push_back({lineno, *id, RejectReason::bad_date});
            continue;
        }
        const auto trimmed = trim(*text);
        if (trimmed.empty()) {
            rejections.push_back({lineno, *id, RejectReason::empty_text});
            continue;
        }
        if (contains_url(*text)) {
            rejections.push_back({lineno, *id, RejectReason::url_present});
            continue;
        }
        if (!allowed.contains(ascii_lower(*rating))) {
            rejections.push_back({lineno, *id, RejectReason::rating_not_allowed});
            continue;
        }
        Claim c;
        c.id = *id;
        c.text = std::string(trimmed);
        c.first_debunked = *date;
        c.rating = *rating;
        c.source = get_string(j, "source").value_or("");
        candidates.push_back({lineno, std::move(c), normalize_for_dedupe(trimmed)});
    }

    // One record per id: earliest date wins, then smallest text. The
    // comparison uses only record content, so the outcome is independent of
    // input order.
    std::map<std::string, std::vector<std::size_t>> by_id;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        by_id[candidates[i].claim.id].push_back(i);

    std::vector<std::size_t> id_winners;
    for (const auto& [id, indices] : by_id) {
        const auto winner = *std::min_element(
            indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
                const auto& ca = candidates[a].claim;
                const auto& cb = candidates[b].claim;
                return std::tie(ca.first_debunked, ca.text) < std::tie(cb.first_debunked, cb.text);
            });
        for (const auto idx : indices) {
            if (idx != winner)
                rejections.push_back(
                    {candidates[idx].lineno, candidates[idx].claim.id, RejectReason::duplicate_id});
        }
        id_winners.push_back(winner);
    }

    // One claim per normalized text: earliest first_debunked wins, ties go to
    // the lexicographically smallest id.
    std::map<std::string, std::vector<std::size_t>> by_text;
    for (const auto idx : id_winners) by_text[candidates[idx].norm_text].push_back(idx);

    for (const auto& [text, indices] : by_text) {
        const auto winner = *std::min_element(
            indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
                const auto& ca = candidates[a].claim;
                const auto& cb = candidates[b].claim;
                return std::tie(ca.first_debunked, ca.id) < std::tie(cb.first_debunked, cb.id);
            });
        for (const auto idx : indices) {
            if (idx != winner) {
                rejections.push_back({candidates[idx].lineno, candidates[idx].claim.id,
                                      RejectReason::duplicate_text});
            }
        }
        result.claims.push_back(candidates[winner].claim);
    }

    std::sort(result.claims.begin(), result.claims.end(),
              [](const Claim& a, const Claim& b) { return a.id < b.id; });
    result.report.kept_count = result.claims.size();
    finish_report(result.report, std::move(rejections));
    return result;
}

PostIngestResult ingest_posts(const std::filesystem::path& path) {
    const auto lines = read_record_lines(path);

    PostIngestResult result;
    result.report.read_count = lines.size();
    std::vector<Rejection> rejections;

    struct Candidate {
        int lineno;
        Post post;
    };
    std::vector<Candidate> candidates;

    for (const auto& [lineno, line] : lines) {
        const std::string line_ref = "line:" + std::to_string(lineno);
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            rejections.push_back({lineno, line_ref, RejectReason::bad_record});
            continue;
        }
        const auto id = get_string(j, "id");
        if (!id) {
            rejections.push_back({lineno, line_ref, RejectReason::missing_field});
            continue;
        }
        if (!is_valid_record_id(*id)) {
            rejections.push_back({lineno, line_ref, RejectReason::bad_id});
            continue;
        }
        const auto text = get_string(j, "text");
        if (!text) {
            rejections.push_back({lineno, *id, RejectReason::missing_field});
            continue;
        }
        const auto created_at = get_string(j, "created_at");
        if (!created_at) {
            rejections.push_back({lineno, *id, RejectReason::missing_timestamp});
            continue;
        }
        const auto date = parse_iso_timestamp_date(*created_at);
        if (!date) {
            rejections.push_back({lineno, *id, RejectReason::bad_date});
            continue;
        }
        const auto trimmed = trim(*text);
        if (trimmed.empty()) {
            rejections.push_back({lineno, *id, RejectReason::empty_text});
            continue;
        }
        if (is_repost(*text)) {
            rejections.push_back({lineno, *id, RejectReason::repost});
            continue;
        }
        if (contains_url(*text)) {
            rejections.push_back({lineno, *id, RejectReason::url_present});
            continue;
        }
        Post p;
        p.id = *id;
        p.text = std::string(trimmed);
        p.created_at = *created_at;
        p.date = *date;
        candidates.push_back({lineno, std::move(p)});
    }

    std::map<std::string, std::vector<std::size_t>> by_id;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        by_id[candidates[i].post.id].push_back(i);

    for (const auto& [id, indices] : by_id) {
        const auto winner = *std::min_element(
            indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
                const auto& pa = candidates[a].post;
                const auto& pb = candidates[b].post;
                return std::tie(pa.date, pa.text) < std::tie(pb.date, pb.text);
            });
        for (const auto idx : indices) {
            if (idx != winner)
                rejections.push_back(
                    {candidates[idx].lineno, candidates[idx].post.id, RejectReason::duplicate_id});
        }
        result.posts.push_back(candidates[winner].post);
    }

    std::sort(result.posts.begin(), result.posts.end(),
              [](const Post& a, const Post& b) { return a.id < b.id; });
    result.report.kept_count = result.posts.size();
    finish_report(result.report, std::move(rejections));
    return result;
}

void save_ingest_report(const IngestReport& report, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
    nlohmann::ordered_json j;
    j["read_count"] = report.read_count;
    j["kept_count"] = report.kept_count;
    auto rejected = nlohmann::ordered_json::array();
    for (const auto& r : report.rejected) {
        rejected.push_back({{"id", r.record_ref}, {"reason", std::string(to_string(r.reason))}});
    }
    j["rejected"] = rejected;
    out << j.dump(2) << '\n';
}

} // namespace factgpt
