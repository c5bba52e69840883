#include "factgpt/prompts.hpp"

#include <fstream>
#include <sstream>

#include "factgpt/errors.hpp"
#include "factgpt/text.hpp"

namespace factgpt {

namespace {

// Single-pass slot substitution. Slots found in the template are replaced
// from the map; anything the replacement text contains is left alone.
std::string render_slots(const std::string& tmpl,
                         const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
            const auto close = tmpl.find("}}", i + 2);
            if (close != std::string::npos) {
                const std::string name = tmpl.substr(i + 2, close - i - 2);
                const auto it = slots.find(name);
                if (it != slots.end()) {
                    out += it->second;
                    i = close + 2;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i]);
        ++i;
    }
    return out;
}

std::string style_key(PromptStyle style) {
    return std::string(to_string(style));
}

std::string order_key(PresentationOrder order) {
    return std::string(to_string(order));
}

std::string label_key(EntailmentLabel label) {
    switch (label) {
        case EntailmentLabel::entailment: return "entailment";
        case EntailmentLabel::neutral: return "neutral";
        case EntailmentLabel::contradiction: return "contradiction";
    }
    return "neutral";
}

std::string annotation_instruction(PromptStyle style) {
    switch (style) {
        case PromptStyle::annotation_only:
            return "Respond with exactly one word: ENTAILMENT, NEUTRAL, or CONTRADICTION.";
        case PromptStyle::zero_shot:
            return "You must provide a final choice as ENTAILMENT, NEUTRAL, or CONTRADICTION, "
                   "and then an explanation.";
        case PromptStyle::zero_shot_cot:
        case PromptStyle::few_shot_cot:
            return "You must provide an explanation, and then a final choice as ENTAILMENT, "
                   "NEUTRAL, or CONTRADICTION.";
    }
    return {};
}

} // namespace

TemplateSet TemplateSet::make_builtin() {
    std::map<std::string, std::string> entries;

    for (const auto order : kBothOrders) {
        const bool post_first = order == PresentationOrder::post_first;
        const std::string premise = post_first ? "TWEET" : "CLAIM";
        const std::string hypothesis = post_first ? "CLAIM" : "TWEET";

        const std::string question = "Which of the following options best describes the "
                                     "relationship between " +
                                     premise + " and " + hypothesis + "?";
        const std::string options = "If " + premise + " is true:\n" +
                                    "(ENTAILMENT) then " + hypothesis + " is also true.\n" +
                                    "(NEUTRAL) " + hypothesis +
                                    " cannot be said to be true or false.\n" +
                                    "(CONTRADICTION) then " + hypothesis + " is false.";

        for (const auto style : kAllStyles) {
            entries["annotation_system_" + style_key(style) + "_" + order_key(order)] =
                question + "\n" + annotation_instruction(style) + "\n\n" + options;
        }

        entries["annotation_input_" + order_key(order)] =
            post_first ? "TWEET: {{TWEET}}\nCLAIM: {{CLAIM}}"
                       : "CLAIM: {{CLAIM}}\nTWEET: {{TWEET}}";
        entries["annotation_exemplar_" + order_key(order)] =
            entries["annotation_input_" + order_key(order)] + "\nANSWER: {{ANSWER}}";

        const std::string then_premise = "if " + premise + " is true";
        entries["generation_system_entailment_" + order_key(order)] =
            "Generate TWEET so that " + then_premise + ", then " + hypothesis +
            " is also true. Be brief. Do not start a sentence with 'Just'.";
        entries["generation_system_neutral_" + order_key(order)] =
            "Generate TWEET so that " + then_premise + ", then " + hypothesis +
            " cannot be said to be true or false. Be brief. Do not start a sentence with 'Just'.";
        entries["generation_system_contradiction_" + order_key(order)] =
            "Generate TWEET so that " + then_premise + ", " + hypothesis +
            " is false. Be brief. Do not start a sentence with 'Just'.";
    }

    entries["cot_suffix"] = "Let's think step by step";
    entries["generation_input"] = "{{CLAIM}}";

    TemplateSet set;
    set.entries_ = std::move(entries);
    return set;
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

std::optional<Role> role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    return std::nullopt;
}

const std::vector<FewShotExemplar>& few_shot_exemplars() {
    static const std::vector<FewShotExemplar> exemplars = {
        {"A dog is running in a field.", "An animal is running in a field.",
         "A dog is an animal. A dog running in a field is an animal running in a field. "
         "So the final answer is ENTAILMENT.",
         EntailmentLabel::entailment},
        {"A man is breaking three eggs in a bowl.", "A girl is pouring some milk in a bowl.",
         "A man is breaking three eggs in a bowl does not imply that a girl is pouring some "
         "milk in a bowl. So the final answer is NEUTRAL.",
         EntailmentLabel::neutral},
        {"A man is playing golf.", "No man is playing golf.",
         "A man is playing golf and no man is playing golf cannot be true at the same time. "
         "So the final answer is CONTRADICTION.",
         EntailmentLabel::contradiction},
    };
    return exemplars;
}

const TemplateSet& TemplateSet::builtin() {
    static const TemplateSet set = make_builtin();
    return set;
}

const std::string& TemplateSet::get(const std::string& name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end())
        raise(ErrorCode::missing_input, "no prompt template named " + name);
    return it->second;
}

void TemplateSet::export_to(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : entries_) {
        std::ofstream out(dir / (name + ".txt"), std::ios::binary);
        if (!out) raise(ErrorCode::io_failure, "cannot write template " + name);
        out << text;
    }
    std::ofstream version(dir / "VERSION", std::ios::binary);
    if (!version) raise(ErrorCode::io_failure, "cannot write template VERSION");
    version << kVersion << '\n';
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    std::ifstream version(dir / "VERSION", std::ios::binary);
    std::string line;
    if (!version || !std::getline(version, line) || line != kVersion)
        raise(ErrorCode::config_invalid,
              "template dir " + dir.string() + " lacks marker '" + std::string(kVersion) + "'");

    TemplateSet set;
    for (const auto& [name, unused] : builtin().entries()) {
        std::ifstream in(dir / (name + ".txt"), std::ios::binary);
        if (!in) raise(ErrorCode::missing_input, "template dir missing " + name + ".txt");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        set.entries_[name] = buffer.str();
    }
    return set;
}

MessageSeq render_annotation_prompt(PromptStyle style, PresentationOrder order,
                                    const std::string& post_text, const std::string& claim_text,
                                    const TemplateSet& templates) {
    if (trim(post_text).empty()) raise(ErrorCode::empty_text, "post text is empty");
    if (trim(claim_text).empty()) raise(ErrorCode::empty_text, "claim text is empty");

    const std::string& system =
        templates.get("annotation_system_" + style_key(style) + "_" + order_key(order));
    const std::string& input_tmpl = templates.get("annotation_input_" + order_key(order));

    std::string user;
    if (style == PromptStyle::few_shot_cot) {
        const std::string& exemplar_tmpl =
            templates.get("annotation_exemplar_" + order_key(order));
        const bool post_first = order == PresentationOrder::post_first;
        for (const auto& ex : few_shot_exemplars()) {
            // The premise always fills the slot named in the conditional's
            // antecedent: TWEET under post-first, CLAIM under claim-first.
            user += render_slots(exemplar_tmpl,
                                 {{"TWEET", post_first ? ex.premise : ex.hypothesis},
                                  {"CLAIM", post_first ? ex.hypothesis : ex.premise},
                                  {"ANSWER", ex.rationale}});
            user += "\n\n";
        }
        user += render_slots(input_tmpl, {{"TWEET", post_text}, {"CLAIM", claim_text}});
        user += "\nANSWER:";
    } else {
        user = render_slots(input_tmpl, {{"TWEET", post_text}, {"CLAIM", claim_text}});
        if (style == PromptStyle::zero_shot_cot) {
            user += "\n\n" + templates.get("cot_suffix");
        }
    }

    return {{Role::system, system}, {Role::user, user}};
}

MessageSeq render_generation_prompt(EntailmentLabel target, PresentationOrder order,
                                    const std::string& claim_text,
                                    const TemplateSet& templates) {
    if (trim(claim_text).empty()) raise(ErrorCode::empty_text, "claim text is empty");
    const std::string& system =
        templates.get("generation_system_" + label_key(target) + "_" + order_key(order));
    const std::string user =
        render_slots(templates.get("generation_input"), {{"CLAIM", claim_text}});
    return {{Role::system, system}, {Role::user, user}};
}

std::string format_messages(const MessageSeq& messages) {
    std::string out;
    for (const auto& m : messages) {
        out += "### ";
        out += to_string(m.role);
        out += '\n';
        out += m.content;
        out += '\n';
    }
    return out;
}

} // namespace factgpt
