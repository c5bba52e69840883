#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "factgpt/dates.hpp"
#include "factgpt/labels.hpp"

namespace factgpt {

/// A claim previously debunked by fact-checkers.
struct Claim {
    std::string id;
    std::string text;
    CivilDate first_debunked;
    std::string source;  // feed name; optional in input
    std::string rating;  // verdict string as published
};

/// A social-media post.
struct Post {
    std::string id;
    std::string text;
    std::string created_at;  // original ISO-8601 timestamp, kept verbatim
    CivilDate date;          // calendar date extracted from created_at
};

/// A retrieved (post, claim) pairing with both similarity scores.
struct CandidatePair {
    std::string claim_id;
    std::string post_id;
    double bm25_score = 0.0;
    double cosine_score = 0.0;
};

/// Stable composite key. Ids are validated at ingest to exclude '|'.
std::string make_pair_id(const std::string& claim_id, const std::string& post_id);

// Newline-delimited JSON stores, one object per line, UTF-8.
// Claim fields: {id, text, date, rating, source}; post fields:
// {id, text, created_at}; pair fields: {pair_id, claim_id, post_id,
// bm25_score, cosine_score}. Writers emit keys in those orders and are
// byte-stable for a fixed input sequence.

void save_claims(const std::vector<Claim>& claims, const std::filesystem::path& path);
std::vector<Claim> load_claims(const std::filesystem::path& path);

void save_posts(const std::vector<Post>& posts, const std::filesystem::path& path);
std::vector<Post> load_posts(const std::filesystem::path& path);

void save_pairs(const std::vector<CandidatePair>& pairs, const std::filesystem::path& path);
std::vector<CandidatePair> load_pairs(const std::filesystem::path& path);

} // namespace factgpt
