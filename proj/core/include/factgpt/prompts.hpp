#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factgpt/labels.hpp"

namespace factgpt {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view s);

struct ChatMessage {
    Role role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

/// Ordered chat transcript; renderers always emit a system message first.
using MessageSeq = std::vector<ChatMessage>;

/// A worked premise/hypothesis/rationale example used in few-shot prompts.
/// Every rationale ends with "So the final answer is <LABEL>."
struct FewShotExemplar {
    std::string premise;
    std::string hypothesis;
    std::string rationale;
    EntailmentLabel label;
};

/// The three canonical exemplars (entailment, neutral, contradiction).
const std::vector<FewShotExemplar>& few_shot_exemplars();

/// Named prompt templates with {{TWEET}}, {{CLAIM}} and {{ANSWER}} slots.
/// Slot substitution is single-pass: slot-like sequences inside substituted
/// text are never re-expanded, so post and claim texts survive verbatim.
class TemplateSet {
public:
    static const TemplateSet& builtin();

    const std::string& get(const std::string& name) const;

    /// Writes one <name>.txt per template plus a VERSION marker.
    void export_to(const std::filesystem::path& dir) const;

    /// Loads a directory produced by export_to (possibly hand-edited).
    /// Requires the VERSION marker and the full builtin name set.
    static TemplateSet load(const std::filesystem::path& dir);

    const std::map<std::string, std::string>& entries() const { return entries_; }

    static constexpr std::string_view kVersion = "factgpt-templates v1";

private:
    static TemplateSet make_builtin();

    std::map<std::string, std::string> entries_;
};

/// Renders the entailment-annotation prompt for one (post, claim) pair.
/// The presentation order decides which text plays the premise: post-first
/// puts TWEET in the conditional's antecedent, claim-first puts CLAIM there,
/// with the TWEET/CLAIM labels staying attached to their own texts. Pure:
/// equal inputs produce byte-identical output. Throws EmptyText.
MessageSeq render_annotation_prompt(PromptStyle style, PresentationOrder order,
                                    const std::string& post_text, const std::string& claim_text,
                                    const TemplateSet& templates = TemplateSet::builtin());

/// Renders the synthetic-post generation prompt for one claim and target
/// label. post-first asks for a TWEET whose truth constrains CLAIM;
/// claim-first conditions on CLAIM instead. Throws EmptyText.
MessageSeq render_generation_prompt(EntailmentLabel target, PresentationOrder order,
                                    const std::string& claim_text,
                                    const TemplateSet& templates = TemplateSet::builtin());

/// Plain-text serialization used for golden files and logs:
/// "### <role>\n<content>\n" per message.
std::string format_messages(const MessageSeq& messages);

} // namespace factgpt
