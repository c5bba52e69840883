#include "factgpt/labels.hpp"

#include <algorithm>
#include <cctype>

namespace factgpt {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view to_string(EntailmentLabel label) {
    switch (label) {
        case EntailmentLabel::entailment: return "ENTAILMENT";
        case EntailmentLabel::neutral: return "NEUTRAL";
        case EntailmentLabel::contradiction: return "CONTRADICTION";
    }
    return "NEUTRAL";
}

std::string_view to_string(PresentationOrder order) {
    return order == PresentationOrder::post_first ? "post-first" : "claim-first";
}

std::string_view to_string(PromptStyle style) {
    switch (style) {
        case PromptStyle::annotation_only: return "annotation-only";
        case PromptStyle::zero_shot: return "zero-shot";
        case PromptStyle::zero_shot_cot: return "zero-shot-cot";
        case PromptStyle::few_shot_cot: return "few-shot-cot";
    }
    return "annotation-only";
}

std::optional<EntailmentLabel> label_from_string(std::string_view s) {
    const std::string v = ascii_lower(s);
    if (v == "entailment") return EntailmentLabel::entailment;
    if (v == "neutral") return EntailmentLabel::neutral;
    if (v == "contradiction") return EntailmentLabel::contradiction;
    return std::nullopt;
}

std::optional<PresentationOrder> order_from_string(std::string_view s) {
    const std::string v = ascii_lower(s);
    if (v == "post-first" || v == "post_first") return PresentationOrder::post_first;
    if (v == "claim-first" || v == "claim_first") return PresentationOrder::claim_first;
    return std::nullopt;
}

std::optional<PromptStyle> style_from_string(std::string_view s) {
    const std::string v = ascii_lower(s);
    if (v == "annotation-only" || v == "annotation_only") return PromptStyle::annotation_only;
    if (v == "zero-shot" || v == "zero_shot") return PromptStyle::zero_shot;
    if (v == "zero-shot-cot" || v == "zero_shot_cot") return PromptStyle::zero_shot_cot;
    if (v == "few-shot-cot" || v == "few_shot_cot") return PromptStyle::few_shot_cot;
    return std::nullopt;
}

} // namespace factgpt
