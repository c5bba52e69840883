#include <doctest.h>

#include <fstream>
#include <string>

#include "factgpt/errors.hpp"
#include "factgpt/prompts.hpp"
#include "support/fixture.hpp"

using namespace factgpt;

namespace {

const std::string kPost = "my uncle swears garlic tea fixed his flu in one night";
const std::string kClaim = "Garlic tea cures influenza overnight";

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

/// The conditional block from "If <P> is true:" to the end of the system text.
std::string options_block(const std::string& system_text) {
    const auto pos = system_text.find("\nIf ");
    REQUIRE(pos != std::string::npos);
    return system_text.substr(pos);
}

} // namespace

TEST_CASE("annotation rendering is deterministic") {
    for (const auto style : kAllStyles) {
        for (const auto order : kBothOrders) {
            const auto a = render_annotation_prompt(style, order, kPost, kClaim);
            const auto b = render_annotation_prompt(style, order, kPost, kClaim);
            CHECK(format_messages(a) == format_messages(b));
            REQUIRE(!a.empty());
            CHECK(a.front().role == Role::system);
        }
    }
}

TEST_CASE("every style and order carries the three option descriptions verbatim") {
    for (const auto style : kAllStyles) {
        for (const auto order : kBothOrders) {
            const auto messages = render_annotation_prompt(style, order, kPost, kClaim);
            const auto& system = messages[0].content;
            const bool post_first = order == PresentationOrder::post_first;
            const std::string hyp = post_first ? "CLAIM" : "TWEET";
            CHECK(system.find("then " + hyp + " is also true.") != std::string::npos);
            CHECK(system.find(hyp + " cannot be said to be true or false.") !=
                  std::string::npos);
            CHECK(system.find("then " + hyp + " is false.") != std::string::npos);

            const auto options = options_block(system);
            CHECK(count_occurrences(options, "ENTAILMENT") == 1);
            CHECK(count_occurrences(options, "NEUTRAL") == 1);
            CHECK(count_occurrences(options, "CONTRADICTION") == 1);
        }
    }
}

TEST_CASE("zero-shot-cot ends the user message with the step-by-step request") {
    for (const auto order : kBothOrders) {
        const auto messages =
            render_annotation_prompt(PromptStyle::zero_shot_cot, order, kPost, kClaim);
        const auto& user = messages[1].content;
        const auto last_line = user.substr(user.rfind('\n') + 1);
        CHECK(last_line == "Let's think step by step");
    }
    // The suffix is specific to zero-shot-cot.
    for (const auto style : {PromptStyle::annotation_only, PromptStyle::zero_shot,
                             PromptStyle::few_shot_cot}) {
        const auto messages =
            render_annotation_prompt(style, PresentationOrder::post_first, kPost, kClaim);
        CHECK(messages[1].content.find("Let's think step by step") == std::string::npos);
    }
}

TEST_CASE("order controls which text plays the premise") {
    const auto pf = render_annotation_prompt(PromptStyle::zero_shot,
                                             PresentationOrder::post_first, kPost, kClaim);
    const auto cf = render_annotation_prompt(PromptStyle::zero_shot,
                                             PresentationOrder::claim_first, kPost, kClaim);

    CHECK(pf[0].content.find("between TWEET and CLAIM?") != std::string::npos);
    CHECK(pf[0].content.find("If TWEET is true:") != std::string::npos);
    CHECK(cf[0].content.find("between CLAIM and TWEET?") != std::string::npos);
    CHECK(cf[0].content.find("If CLAIM is true:") != std::string::npos);

    // Labels stay attached to their own texts; only the line order flips.
    CHECK(pf[1].content == "TWEET: " + kPost + "\nCLAIM: " + kClaim);
    CHECK(cf[1].content == "CLAIM: " + kClaim + "\nTWEET: " + kPost);
}

TEST_CASE("few-shot prompts embed the three exemplars before the target pair") {
    const auto messages = render_annotation_prompt(PromptStyle::few_shot_cot,
                                                   PresentationOrder::post_first, kPost, kClaim);
    const auto& user = messages[1].content;

    const auto& exemplars = few_shot_exemplars();
    REQUIRE(exemplars.size() == 3);
    std::size_t prev = 0;
    for (const auto& ex : exemplars) {
        const auto pos = user.find(ex.rationale);
        REQUIRE(pos != std::string::npos);
        CHECK(pos >= prev);
        prev = pos;
    }
    // Target pair comes after every exemplar and leaves the answer open.
    CHECK(user.rfind("TWEET: " + kPost) > prev);
    CHECK(user.substr(user.size() - 7) == "ANSWER:");
}

TEST_CASE("the canonical exemplars match the published wording") {
    const auto& exemplars = few_shot_exemplars();
    REQUIRE(exemplars.size() == 3);
    CHECK(exemplars[0].label == EntailmentLabel::entailment);
    CHECK(exemplars[0].premise == "A dog is running in a field.");
    CHECK(exemplars[1].premise == "A man is breaking three eggs in a bowl.");
    CHECK(exemplars[1].label == EntailmentLabel::neutral);
    CHECK(exemplars[2].label == EntailmentLabel::contradiction);

    for (const auto& ex : exemplars) {
        const std::string suffix =
            "So the final answer is " + std::string(to_string(ex.label)) + ".";
        REQUIRE(ex.rationale.size() >= suffix.size());
        CHECK(ex.rationale.substr(ex.rationale.size() - suffix.size()) == suffix);
    }
}

TEST_CASE("exemplar slots swap with the presentation order") {
    const auto cf = render_annotation_prompt(PromptStyle::few_shot_cot,
                                             PresentationOrder::claim_first, kPost, kClaim);
    const auto& user = cf[1].content;
    // Under claim-first the premise sentence sits in the CLAIM slot.
    CHECK(user.find("CLAIM: A dog is running in a field.") != std::string::npos);
    CHECK(user.find("TWEET: An animal is running in a field.") != std::string::npos);
}

TEST_CASE("generation prompts follow the published conditionals") {
    const auto con_pf = render_generation_prompt(EntailmentLabel::contradiction,
                                                 PresentationOrder::post_first, kClaim);
    CHECK(con_pf[0].content.find("if TWEET is true, CLAIM is false") != std::string::npos);

    const auto ent_pf = render_generation_prompt(EntailmentLabel::entailment,
                                                 PresentationOrder::post_first, kClaim);
    CHECK(ent_pf[0].content.find("if TWEET is true, then CLAIM is also true") !=
          std::string::npos);
    CHECK(ent_pf[0].content.find("Be brief. Do not start a sentence with 'Just'.") !=
          std::string::npos);

    const auto neu_pf = render_generation_prompt(EntailmentLabel::neutral,
                                                 PresentationOrder::post_first, kClaim);
    CHECK(neu_pf[0].content.find("then CLAIM cannot be said to be true or false") !=
          std::string::npos);

    // Claim-first conditions on CLAIM instead.
    const auto ent_cf = render_generation_prompt(EntailmentLabel::entailment,
                                                 PresentationOrder::claim_first, kClaim);
    CHECK(ent_cf[0].content.find("if CLAIM is true, then TWEET is also true") !=
          std::string::npos);

    // The user turn is the bare claim text.
    CHECK(ent_pf[1].content == kClaim);

    const auto again = render_generation_prompt(EntailmentLabel::entailment,
                                                PresentationOrder::post_first, kClaim);
    CHECK(format_messages(again) == format_messages(ent_pf));
}

TEST_CASE("post and claim texts survive rendering verbatim") {
    const std::string tricky_post = "braces {{CLAIM}} and \"quotes\" and café ümlauts";
    const std::string tricky_claim = "newline\ntab\tand {{TWEET}} inside";
    for (const auto style : kAllStyles) {
        for (const auto order : kBothOrders) {
            const auto messages =
                render_annotation_prompt(style, order, tricky_post, tricky_claim);
            CHECK(messages[1].content.find(tricky_post) != std::string::npos);
            CHECK(messages[1].content.find(tricky_claim) != std::string::npos);
        }
    }
}

TEST_CASE("empty texts are rejected") {
    CHECK_THROWS_AS(render_annotation_prompt(PromptStyle::zero_shot,
                                             PresentationOrder::post_first, "", kClaim),
                    Error);
    CHECK_THROWS_AS(render_annotation_prompt(PromptStyle::zero_shot,
                                             PresentationOrder::post_first, kPost, "  "),
                    Error);
    CHECK_THROWS_AS(
        render_generation_prompt(EntailmentLabel::neutral, PresentationOrder::post_first, ""),
        Error);
}

TEST_CASE("template sets export, reload and render identically") {
    const auto dir = testing::make_temp_dir("templates");
    TemplateSet::builtin().export_to(dir);
    const auto loaded = TemplateSet::load(dir);

    for (const auto style : kAllStyles) {
        for (const auto order : kBothOrders) {
            const auto a = render_annotation_prompt(style, order, kPost, kClaim);
            const auto b = render_annotation_prompt(style, order, kPost, kClaim, loaded);
            CHECK(format_messages(a) == format_messages(b));
        }
    }

    SUBCASE("a missing template file fails the load") {
        std::filesystem::remove(dir / "cot_suffix.txt");
        CHECK_THROWS_AS(TemplateSet::load(dir), Error);
    }
    SUBCASE("a bad version marker fails the load") {
        std::ofstream out(dir / "VERSION", std::ios::binary);
        out << "something else\n";
        out.close();
        CHECK_THROWS_AS(TemplateSet::load(dir), Error);
    }
}
