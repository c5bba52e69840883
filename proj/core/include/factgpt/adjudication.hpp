#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factgpt/chat.hpp"
#include "factgpt/labels.hpp"
#include "factgpt/rng.hpp"

namespace factgpt {

/// One rater's verdict on one (pair, order). A missing label records an
/// unparsable response; (pair_id, order, rater_id) is unique within a set.
struct DirectionalJudgment {
    std::string pair_id;
    PresentationOrder order = PresentationOrder::post_first;
    std::string rater_id;
    std::optional<EntailmentLabel> label;  // nullopt = UNPARSABLE
};

/// Vote counts for one (pair, order), ignoring unparsable votes.
struct VoteTally {
    std::array<int, 3> counts{};           // indexed by EntailmentLabel
    std::vector<EntailmentLabel> top;      // argmax set, in enum order
    int valid_votes = 0;
};

/// Counts the valid votes and computes the argmax set. Throws NoVotes when
/// the vote list is empty. All-unparsable input yields an empty top set.
VoteTally tally(const std::vector<DirectionalJudgment>& votes);

/// A unanimous argmax resolves without touching the random source; a tie is
/// broken uniformly among the tied labels. Deterministic given the rng state.
EntailmentLabel resolve(const VoteTally& tally, SeededRng& rng);

/// Combines the two per-order labels: entailment when either order says so,
/// contradiction only when both do, neutral otherwise. Symmetric in its
/// arguments.
EntailmentLabel aggregate_bidirectional(EntailmentLabel post_first_label,
                                        EntailmentLabel claim_first_label);

/// One concrete assignment of final labels after tie-breaking.
struct LabelRealization {
    int draw_index = 0;
    std::map<std::string, EntailmentLabel> labels;  // pair_id -> final label
};

/// Draw i seeds its own random source with base_seed + i and resolves every
/// tied tally independently, walking pairs in ascending pair-id order and
/// post-first before claim-first; the bidirectional rule then combines the
/// two per-order labels. Pairs without ties come out identical in every
/// realization. Throws MissingOrder when a pair has no valid vote in one
/// order and DuplicateId on a repeated (pair, order, rater) key.
std::vector<LabelRealization> realize_labels(const std::vector<DirectionalJudgment>& votes,
                                             int n_draws, std::uint64_t base_seed);

/// Outcome of model-annotating one pair in both orders.
struct ModelAnnotation {
    std::optional<EntailmentLabel> post_first;   // nullopt = unparsable after re-ask
    std::optional<EntailmentLabel> claim_first;
    std::optional<EntailmentLabel> final_label;  // nullopt = UNRESOLVED
    int unparsable_responses = 0;
};

/// Completes one presentation order and parses the label, re-asking once on
/// an unparsable response. nullopt means both attempts were unparsable;
/// unparsable_count, when given, accumulates the number of failed parses.
std::optional<EntailmentLabel> annotate_order_with_model(
    const ChatClient& client, PromptStyle style, PresentationOrder order,
    const std::string& post_text, const std::string& claim_text,
    const CallOptions& options = {}, const TemplateSet& templates = TemplateSet::builtin(),
    int* unparsable_count = nullptr);

/// Renders both presentation orders, completes each, parses the labels and
/// applies the bidirectional rule. An unparsable response is re-asked once;
/// if either order still fails, the pair is left UNRESOLVED.
ModelAnnotation annotate_pair_with_model(const ChatClient& client, PromptStyle style,
                                         const std::string& post_text,
                                         const std::string& claim_text,
                                         const CallOptions& options = {},
                                         const TemplateSet& templates = TemplateSet::builtin());

// Judgments files: newline-delimited {pair_id, order, rater_id, label} with
// label one of ENTAILMENT/NEUTRAL/CONTRADICTION/UNPARSABLE.

void save_judgments(const std::vector<DirectionalJudgment>& judgments,
                    const std::filesystem::path& path);
std::vector<DirectionalJudgment> load_judgments(const std::filesystem::path& path);

} // namespace factgpt
