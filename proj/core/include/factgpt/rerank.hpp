#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "factgpt/bm25.hpp"
#include "factgpt/embedding.hpp"
#include "factgpt/records.hpp"

namespace factgpt {

/// Looks up a post's text by id. Throws UnknownDoc for unknown ids.
using PostTextLookup = std::function<const std::string&(const std::string& post_id)>;

PostTextLookup make_post_lookup(const std::vector<Post>& posts);

/// Annotates each BM25 candidate with the cosine similarity between the
/// claim embedding and the post embedding, then sorts by cosine descending
/// (ties by ascending post id). The output is a permutation of the input.
std::vector<CandidatePair> rerank(const Claim& claim,
                                  const std::vector<ScoredCandidate>& candidates,
                                  const PostTextLookup& post_text,
                                  const EmbeddingClient& embedder);

/// Takes the head of each claim's reranked list: min(per_claim, available)
/// pairs per claim, emitted in ascending claim-id order.
std::vector<CandidatePair> select_top_pairs(
    const std::map<std::string, std::vector<CandidatePair>>& reranked, int per_claim);

} // namespace factgpt
