#include <benchmark/benchmark.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factgpt/adjudication.hpp"
#include "factgpt/chat.hpp"
#include "factgpt/eval.hpp"
#include "factgpt/prompts.hpp"

namespace {

using namespace factgpt;

// Five raters per order; roughly a third of the pairs carry a 2-2-1 tie.
std::vector<DirectionalJudgment> synthetic_votes(std::size_t pairs) {
    const std::vector<std::vector<EntailmentLabel>> patterns = {
        {EntailmentLabel::entailment, EntailmentLabel::entailment, EntailmentLabel::entailment,
         EntailmentLabel::neutral, EntailmentLabel::contradiction},
        {EntailmentLabel::entailment, EntailmentLabel::entailment, EntailmentLabel::neutral,
         EntailmentLabel::neutral, EntailmentLabel::contradiction},  // tied
        {EntailmentLabel::neutral, EntailmentLabel::neutral, EntailmentLabel::neutral,
         EntailmentLabel::neutral, EntailmentLabel::neutral},
    };
    std::vector<DirectionalJudgment> votes;
    votes.reserve(pairs * 10);
    for (std::size_t i = 0; i < pairs; ++i) {
        const auto& pattern = patterns[i % patterns.size()];
        for (int r = 0; r < 5; ++r) {
            votes.push_back({"pair" + std::to_string(i), PresentationOrder::post_first,
                             "r" + std::to_string(r), pattern[std::size_t(r)]});
            votes.push_back({"pair" + std::to_string(i), PresentationOrder::claim_first,
                             "r" + std::to_string(r), pattern[std::size_t((r + 1) % 5)]});
        }
    }
    return votes;
}

void BM_RealizeLabels(benchmark::State& state) {
    const auto votes = synthetic_votes(std::size_t(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(realize_labels(votes, 1000, 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_RealizeLabels)->Arg(100)->Arg(1225);

void BM_MonteCarloEvaluate(benchmark::State& state) {
    const auto votes = synthetic_votes(std::size_t(state.range(0)));
    std::map<std::string, std::optional<EntailmentLabel>> preds;
    for (std::size_t i = 0; i < std::size_t(state.range(0)); ++i)
        preds["pair" + std::to_string(i)] = kAllLabels[i % 3];
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_evaluate(votes, preds, 1000, 1));
    }
}
BENCHMARK(BM_MonteCarloEvaluate)->Arg(100)->Arg(1225);

void BM_RenderAnnotationPrompt(benchmark::State& state) {
    const std::string post = "a coworker keeps insisting garlic water cures the coronavirus";
    const std::string claim = "Garlic water cures the coronavirus within one day";
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_annotation_prompt(
            PromptStyle::few_shot_cot, PresentationOrder::post_first, post, claim));
    }
}
BENCHMARK(BM_RenderAnnotationPrompt);

void BM_ParseEntailment(benchmark::State& state) {
    const std::string response =
        "The tweet repeats the claim almost word for word, so if the tweet is true the "
        "claim holds as well. So the final answer is ENTAILMENT.";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_entailment(response));
    }
}
BENCHMARK(BM_ParseEntailment);

} // namespace
