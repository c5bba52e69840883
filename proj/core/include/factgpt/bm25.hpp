#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "factgpt/dates.hpp"
#include "factgpt/records.hpp"
#include "factgpt/tokenize.hpp"

namespace factgpt {

struct Bm25Config {
    double k1 = 1.2;  // term-frequency saturation
    double b = 0.75;  // length normalization, in [0, 1]
};

struct ScoredCandidate {
    std::string post_id;
    double bm25_score = 0.0;
};

/// Immutable inverted index over a post corpus with Okapi BM25 scoring.
///
/// score(D, Q) = sum over query tokens q of
///   idf(q) * f(q,D) * (k1 + 1) / (f(q,D) + k1 * (1 - b + b * |D| / avgdl))
/// with idf(q) = ln(1 + (N - n(q) + 0.5) / (n(q) + 0.5)), which is strictly
/// positive for every indexed term, so a score of 0 means zero query-term
/// overlap. The query is treated as a token multiset: repeated query tokens
/// contribute once per occurrence, and summation follows query order, so the
/// accumulated score is bit-identical to a per-document evaluation of the
/// formula in the same order.
///
/// Construction is exclusive; afterwards the index is immutable and safe for
/// concurrent readers.
class Bm25Index {
public:
    /// Throws EmptyCorpus for an empty post list and DuplicateId on repeated
    /// post ids. Rebuilding from the same input yields a bit-identical index.
    static Bm25Index build(const std::vector<Post>& posts, const Bm25Config& cfg);

    /// Direct evaluation of the formula above. Throws UnknownDoc.
    double score(const TokenSeq& query, const std::string& post_id) const;

    /// Scores every post dated within `window_days` calendar days of `center`
    /// (inclusive on both ends), drops zero scores, sorts by score descending
    /// with ties broken by ascending post id, and returns at most `k` results.
    std::vector<ScoredCandidate> retrieve(const TokenSeq& query, CivilDate center,
                                          int window_days, int k) const;

    std::size_t doc_count() const { return docs_.size(); }
    double avg_doc_len() const { return avg_doc_len_; }
    const Bm25Config& config() const { return cfg_; }
    bool has_doc(const std::string& post_id) const { return doc_ids_.contains(post_id); }
    std::size_t term_count() const { return postings_.size(); }

    /// Versioned plain-text format; save/load round-trips produce identical
    /// scores. See the file header written by save() for the layout.
    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

private:
    Bm25Index() = default;

    struct DocInfo {
        std::string id;
        std::uint32_t length = 0;
        CivilDate date;
    };
    struct Posting {
        std::uint32_t doc = 0;  // index into docs_
        std::uint32_t tf = 0;
    };

    double idf(std::size_t df) const;
    double term_score(double idf_value, double tf, double doc_len) const;

    Bm25Config cfg_;
    std::vector<DocInfo> docs_;  // sorted by id
    std::unordered_map<std::string, std::uint32_t> doc_ids_;
    std::map<std::string, std::vector<Posting>> postings_;  // doc index ascending
    double avg_doc_len_ = 0.0;
};

/// Convenience wrapper: tokenizes the claim text verbatim and retrieves the
/// top-k candidates inside the claim's date window.
std::vector<ScoredCandidate> retrieve_candidates(const Bm25Index& index, const Claim& claim,
                                                 int window_days, int k);

} // namespace factgpt
