#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "factgpt/chat.hpp"
#include "factgpt/errors.hpp"
#include "factgpt/labels.hpp"
#include "factgpt/prompts.hpp"
#include "factgpt/records.hpp"
#include "factgpt/rng.hpp"

namespace factgpt {

struct SyntheticExample {
    std::string claim_id;
    std::string generated_text;
    EntailmentLabel target_label = EntailmentLabel::neutral;
    PresentationOrder order = PresentationOrder::post_first;
    std::string generator_model;
};

/// Target class distribution for resampling. Fractions are indexed by
/// EntailmentLabel and must sum to 1 within 1e-9.
struct MixSpec {
    std::array<double, 3> fractions{};
    std::size_t total = 0;

    static MixSpec balanced(std::size_t total) {
        return {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, total};
    }
    /// 50% entailment, 35% neutral, 15% contradiction.
    static MixSpec imbalanced(std::size_t total) { return {{0.50, 0.35, 0.15}, total}; }
};

/// Validates fractions and computes per-label counts by largest-remainder
/// rounding, so the counts always sum to mix.total. Ties on remainders break
/// in label enum order.
std::array<std::size_t, 3> mix_counts(const MixSpec& mix);

struct GenerationTask {
    std::string claim_id;
    EntailmentLabel target = EntailmentLabel::neutral;
    PresentationOrder order = PresentationOrder::post_first;
    std::string generator;
};

/// Full factorial plan: every claim x 3 labels x 2 orders x every generator,
/// in that nesting order. The plan enumerates labels uniformly, so the
/// pre-sampling corpus is exactly balanced.
std::vector<GenerationTask> plan_corpus(const std::vector<Claim>& claims,
                                        const std::vector<std::string>& generator_names);

/// Generates one synthetic post. A response that is empty (or a refusal) or
/// whose text starts with the word "Just" is regenerated, up to 3 attempts in
/// total; exhaustion raises GenerationExhausted. Generation calls default to
/// temperature 1 unless the provider or options say otherwise.
SyntheticExample generate_for_claim(const ChatClient& client, const Claim& claim,
                                    EntailmentLabel target, PresentationOrder order,
                                    CallOptions options = {},
                                    const TemplateSet& templates = TemplateSet::builtin());

struct GenerationFailure {
    GenerationTask task;
    std::string reason;
};

struct CorpusBuildReport {
    std::size_t planned = 0;
    std::size_t generated = 0;
    std::size_t failed = 0;
    std::size_t deduplicated = 0;
    std::vector<GenerationFailure> failures;
};

struct GeneratorRef {
    std::string name;  // becomes SyntheticExample::generator_model
    const ChatClient* client = nullptr;
};

/// Runs the full plan across the given generators. Per-item failures are
/// reported, not fatal; duplicates (same claim, label, order, generator and
/// generated text) are dropped and counted. |examples| = planned - failed -
/// deduplicated.
std::pair<std::vector<SyntheticExample>, CorpusBuildReport> build_corpus(
    const std::vector<Claim>& claims, const std::vector<GeneratorRef>& generators,
    const CallOptions& options = {}, const TemplateSet& templates = TemplateSet::builtin(),
    int parallelism = 1);

/// Resamples the corpus to the mix: per label, a demand below the class size
/// draws uniformly without replacement, an equal demand keeps the class
/// intact, and a larger demand draws uniformly with replacement. Deterministic
/// given the seed. Throws EmptyClass when a positive-fraction label has no
/// examples.
std::vector<SyntheticExample> sample_mix(const std::vector<SyntheticExample>& corpus,
                                         const MixSpec& mix, std::uint64_t seed);

/// Seeded shuffle split; |train| = round(train_fraction * n).
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_val(const std::vector<T>& records,
                                                          double train_fraction,
                                                          std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        raise(ErrorCode::config_invalid, "train_fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SeededRng rng(seed);
    rng.shuffle(order);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(records.size())));
    std::pair<std::vector<T>, std::vector<T>> split;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? split.first : split.second).push_back(records[order[i]]);
    }
    return split;
}

/// A chat-format fine-tuning example: the annotation prompt for the
/// synthetic post plus the expected assistant turn (the label keyword).
struct TrainRecord {
    MessageSeq messages;      // system + user
    std::string target_text;  // parses back to the target label
};

using ClaimTextLookup = std::function<const std::string&(const std::string& claim_id)>;

ClaimTextLookup make_claim_lookup(const std::vector<Claim>& claims);

/// Builds one annotation-style training record per synthetic example, in the
/// example's own presentation order.
std::vector<TrainRecord> make_train_records(const std::vector<SyntheticExample>& examples,
                                            const ClaimTextLookup& claim_text,
                                            const TemplateSet& templates = TemplateSet::builtin());

/// Newline-delimited chat records {messages: [{role, content}...]} with the
/// assistant target as the final message; byte-stable for a fixed input order.
void export_train_file(const std::vector<TrainRecord>& records,
                       const std::filesystem::path& path);
std::vector<TrainRecord> load_train_file(const std::filesystem::path& path);

void save_corpus(const std::vector<SyntheticExample>& corpus, const std::filesystem::path& path);
std::vector<SyntheticExample> load_corpus(const std::filesystem::path& path);

} // namespace factgpt
