#include "factgpt/rerank.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

#include "factgpt/errors.hpp"

namespace factgpt {

PostTextLookup make_post_lookup(const std::vector<Post>& posts) {
    auto table = std::make_shared<std::unordered_map<std::string, std::string>>();
    table->reserve(posts.size());
    for (const auto& p : posts) (*table)[p.id] = p.text;
    return [table](const std::string& post_id) -> const std::string& {
        const auto it = table->find(post_id);
        if (it == table->end()) raise(ErrorCode::unknown_doc, "no post text for id " + post_id);
        return it->second;
    };
}

std::vector<CandidatePair> rerank(const Claim& claim,
                                  const std::vector<ScoredCandidate>& candidates,
                                  const PostTextLookup& post_text,
                                  const EmbeddingClient& embedder) {
    if (candidates.empty()) raise(ErrorCode::empty_input, "rerank requires candidates");

    std::vector<std::string> texts;
    texts.reserve(candidates.size() + 1);
    texts.push_back(claim.text);
    for (const auto& c : candidates) texts.push_back(post_text(c.post_id));

    const auto vectors = embedder.embed_batch(texts);
    const auto& claim_vec = vectors.front();

    std::vector<CandidatePair> pairs;
    pairs.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        CandidatePair pair;
        pair.claim_id = claim.id;
        pair.post_id = candidates[i].post_id;
        pair.bm25_score = candidates[i].bm25_score;
        pair.cosine_score = cosine(claim_vec, vectors[i + 1]);
        pairs.push_back(std::move(pair));
    }
    std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& a, const CandidatePair& b) {
        if (a.cosine_score != b.cosine_score) return a.cosine_score > b.cosine_score;
        return a.post_id < b.post_id;
    });
    return pairs;
}

std::vector<CandidatePair> select_top_pairs(
    const std::map<std::string, std::vector<CandidatePair>>& reranked, int per_claim) {
    if (per_claim < 1) raise(ErrorCode::config_invalid, "per_claim must be >= 1");
    std::vector<CandidatePair> selected;
    for (const auto& [claim_id, pairs] : reranked) {
        const std::size_t take = std::min<std::size_t>(pairs.size(),
                                                       static_cast<std::size_t>(per_claim));
        for (std::size_t i = 0; i < take; ++i) selected.push_back(pairs[i]);
    }
    return selected;
}

} // namespace factgpt
