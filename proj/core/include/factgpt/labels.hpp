#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace factgpt {

/// Three-way textual entailment verdict for an ordered (premise, hypothesis) pair.
enum class EntailmentLabel { entailment = 0, neutral = 1, contradiction = 2 };

inline constexpr std::array<EntailmentLabel, 3> kAllLabels = {
    EntailmentLabel::entailment, EntailmentLabel::neutral, EntailmentLabel::contradiction};

/// Which text plays the premise role. post_first reads the social post as the
/// premise and the claim as the hypothesis; claim_first is the reverse.
/// Entailment is direction-sensitive, so both orders are first-class.
enum class PresentationOrder { post_first = 0, claim_first = 1 };

inline constexpr std::array<PresentationOrder, 2> kBothOrders = {
    PresentationOrder::post_first, PresentationOrder::claim_first};

enum class PromptStyle { annotation_only = 0, zero_shot = 1, zero_shot_cot = 2, few_shot_cot = 3 };

inline constexpr std::array<PromptStyle, 4> kAllStyles = {
    PromptStyle::annotation_only, PromptStyle::zero_shot, PromptStyle::zero_shot_cot,
    PromptStyle::few_shot_cot};

std::string_view to_string(EntailmentLabel label);       // "ENTAILMENT" | "NEUTRAL" | "CONTRADICTION"
std::string_view to_string(PresentationOrder order);     // "post-first" | "claim-first"
std::string_view to_string(PromptStyle style);           // "annotation-only" | ...

std::optional<EntailmentLabel> label_from_string(std::string_view s);   // case-insensitive
std::optional<PresentationOrder> order_from_string(std::string_view s);
std::optional<PromptStyle> style_from_string(std::string_view s);

} // namespace factgpt
