#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "factgpt/records.hpp"

namespace factgpt {

/// Why a record was dropped. Each rejected record carries exactly one reason:
/// the first failing check in the documented order (parse, id, fields, date,
/// empty text, repost/URL, rating, duplicates).
enum class RejectReason {
    bad_record,          // line is not a JSON object
    bad_id,              // id empty, or contains whitespace/control/'|'
    missing_field,       // a required field is absent or not a string
    missing_timestamp,   // post lacks created_at
    bad_date,            // date/created_at present but unparsable
    empty_text,          // text empty after trimming
    repost,              // post begins with "RT @"
    url_present,         // text references a URL
    rating_not_allowed,  // claim verdict not in the allowlist
    duplicate_id,        // another record with the same id wins
    duplicate_text,      // another claim with the same normalized text wins
};

std::string_view to_string(RejectReason reason);

struct RejectedRecord {
    std::string record_ref;  // record id, or "line:N" when no id is available
    RejectReason reason;
};

struct IngestReport {
    std::size_t read_count = 0;
    std::size_t kept_count = 0;
    std::vector<RejectedRecord> rejected;
};

struct ClaimIngestResult {
    std::vector<Claim> claims;  // sorted by id
    IngestReport report;
};

struct PostIngestResult {
    std::vector<Post> posts;  // sorted by id
    IngestReport report;
};

/// {"false", "incorrect", "fake"}, compared case-insensitively.
const std::set<std::string>& default_rating_allowlist();

/// Reads newline-delimited claim records {id, text, date, rating[, source]},
/// applies the URL and rating filters, and removes duplicates: one record per
/// id (earliest date, then smallest text wins) and one claim per normalized
/// text (earliest date, then smallest id wins). Duplicate resolution is
/// independent of input order. Throws EmptyInput when the file holds no
/// records; individual bad records are rejected, not fatal.
ClaimIngestResult ingest_claims(const std::filesystem::path& path,
                                const std::set<std::string>& rating_allowlist =
                                    default_rating_allowlist());

/// Reads newline-delimited post records {id, text, created_at}, dropping
/// reposts, URL-bearing posts, and duplicate ids.
PostIngestResult ingest_posts(const std::filesystem::path& path);

void save_ingest_report(const IngestReport& report, const std::filesystem::path& path);

} // namespace factgpt
