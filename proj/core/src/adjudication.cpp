#include "factgpt/adjudication.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

#include "factgpt/errors.hpp"
#include "factgpt/text.hpp"

namespace factgpt {

using nlohmann::ordered_json;

VoteTally tally(const std::vector<DirectionalJudgment>& votes) {
    if (votes.empty()) raise(ErrorCode::no_votes, "tally requires at least one vote");
    VoteTally t;
    for (const auto& vote : votes) {
        if (!vote.label) continue;
        ++t.counts[static_cast<std::size_t>(*vote.label)];
        ++t.valid_votes;
    }
    if (t.valid_votes == 0) return t;  // empty top: caller decides
    const int max_count = *std::max_element(t.counts.begin(), t.counts.end());
    for (const auto label : kAllLabels) {
        if (t.counts[static_cast<std::size_t>(label)] == max_count) t.top.push_back(label);
    }
    return t;
}

EntailmentLabel resolve(const VoteTally& tally, SeededRng& rng) {
    if (tally.top.empty()) raise(ErrorCode::no_votes, "cannot resolve an empty tally");
    if (tally.top.size() == 1) return tally.top.front();
    return tally.top[static_cast<std::size_t>(rng.uniform_index(tally.top.size()))];
}

EntailmentLabel aggregate_bidirectional(EntailmentLabel post_first_label,
                                        EntailmentLabel claim_first_label) {
    if (post_first_label == EntailmentLabel::entailment ||
        claim_first_label == EntailmentLabel::entailment) {
        return EntailmentLabel::entailment;
    }
    if (post_first_label == EntailmentLabel::contradiction &&
        claim_first_label == EntailmentLabel::contradiction) {
        return EntailmentLabel::contradiction;
    }
    return EntailmentLabel::neutral;
}

std::vector<LabelRealization> realize_labels(const std::vector<DirectionalJudgment>& votes,
                                             int n_draws, std::uint64_t base_seed) {
    if (n_draws < 1) raise(ErrorCode::config_invalid, "n_draws must be >= 1");

    std::set<std::tuple<std::string, int, std::string>> seen;
    std::map<std::string, std::array<std::vector<DirectionalJudgment>, 2>> by_pair;
    for (const auto& vote : votes) {
        const auto key = std::make_tuple(vote.pair_id, static_cast<int>(vote.order),
                                         vote.rater_id);
        if (!seen.insert(key).second)
            raise(ErrorCode::duplicate_id,
                  "duplicate judgment for pair " + vote.pair_id + " rater " + vote.rater_id);
        by_pair[vote.pair_id][static_cast<std::size_t>(vote.order)].push_back(vote);
    }

    // Per-pair, per-order tallies are draw-independent; compute them once.
    struct PairTallies {
        std::string pair_id;
        VoteTally per_order[2];
    };
    std::vector<PairTallies> pairs;
    pairs.reserve(by_pair.size());
    for (const auto& [pair_id, orders] : by_pair) {
        PairTallies p;
        p.pair_id = pair_id;
        for (const auto order : kBothOrders) {
            const auto idx = static_cast<std::size_t>(order);
            if (orders[idx].empty())
                raise(ErrorCode::missing_order, "pair " + pair_id + " has no votes in the " +
                                                    std::string(to_string(order)) + " order");
            p.per_order[idx] = tally(orders[idx]);
            if (p.per_order[idx].valid_votes == 0)
                raise(ErrorCode::missing_order, "pair " + pair_id + " has no valid vote in the " +
                                                    std::string(to_string(order)) + " order");
        }
        pairs.push_back(std::move(p));
    }

    std::vector<LabelRealization> realizations;
    realizations.reserve(static_cast<std::size_t>(n_draws));
    for (int draw = 0; draw < n_draws; ++draw) {
        SeededRng rng(base_seed + static_cast<std::uint64_t>(draw));
        LabelRealization realization;
        realization.draw_index = draw;
        for (const auto& p : pairs) {
            const auto pf = resolve(p.per_order[0], rng);
            const auto cf = resolve(p.per_order[1], rng);
            realization.labels.emplace(p.pair_id, aggregate_bidirectional(pf, cf));
        }
        realizations.push_back(std::move(realization));
    }
    return realizations;
}

std::optional<EntailmentLabel> annotate_order_with_model(
    const ChatClient& client, PromptStyle style, PresentationOrder order,
    const std::string& post_text, const std::string& claim_text, const CallOptions& options,
    const TemplateSet& templates, int* unparsable_count) {
    const auto prompt = render_annotation_prompt(style, order, post_text, claim_text, templates);
    for (int attempt = 0; attempt < 2; ++attempt) {  // one re-ask on unparsable output
        const auto completion = client.complete(prompt, options);
        const auto label = try_parse_entailment(completion.text);
        if (label) return label;
        if (unparsable_count) ++*unparsable_count;
    }
    return std::nullopt;
}

ModelAnnotation annotate_pair_with_model(const ChatClient& client, PromptStyle style,
                                         const std::string& post_text,
                                         const std::string& claim_text,
                                         const CallOptions& options,
                                         const TemplateSet& templates) {
    ModelAnnotation annotation;
    annotation.post_first =
        annotate_order_with_model(client, style, PresentationOrder::post_first, post_text,
                                  claim_text, options, templates,
                                  &annotation.unparsable_responses);
    annotation.claim_first =
        annotate_order_with_model(client, style, PresentationOrder::claim_first, post_text,
                                  claim_text, options, templates,
                                  &annotation.unparsable_responses);
    if (annotation.post_first && annotation.claim_first) {
        annotation.final_label =
            aggregate_bidirectional(*annotation.post_first, *annotation.claim_first);
    }
    return annotation;
}

void save_judgments(const std::vector<DirectionalJudgment>& judgments,
                    const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
    for (const auto& j : judgments) {
        ordered_json record;
        record["pair_id"] = j.pair_id;
        record["order"] = std::string(to_string(j.order));
        record["rater_id"] = j.rater_id;
        record["label"] = j.label ? std::string(to_string(*j.label)) : "UNPARSABLE";
        out << record.dump() << '\n';
    }
}

std::vector<DirectionalJudgment> load_judgments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::missing_input, "cannot open judgments " + path.string());
    std::vector<DirectionalJudgment> judgments;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fail = [&](const std::string& why) {
            raise(ErrorCode::io_failure, path.string() + ":" + std::to_string(lineno) + ": " + why);
        };
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) fail("malformed judgment record");
        DirectionalJudgment judgment;
        judgment.pair_id = j.at("pair_id").get<std::string>();
        const auto order = order_from_string(j.at("order").get<std::string>());
        if (!order) fail("bad order value");
        judgment.order = *order;
        judgment.rater_id = j.at("rater_id").get<std::string>();
        const std::string label = j.at("label").get<std::string>();
        if (label != "UNPARSABLE") {
            const auto parsed = label_from_string(label);
            if (!parsed) fail("bad label value: " + label);
            judgment.label = parsed;
        }
        judgments.push_back(std::move(judgment));
    }
    return judgments;
}

} // namespace factgpt
