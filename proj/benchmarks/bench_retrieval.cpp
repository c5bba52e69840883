#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "factgpt/bm25.hpp"
#include "factgpt/records.hpp"
#include "factgpt/tokenize.hpp"

namespace {

using namespace factgpt;

std::vector<Post> synthetic_posts(std::size_t count, int vocab, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> word(0, vocab - 1);
    std::uniform_int_distribution<int> doc_len(4, 24);
    std::uniform_int_distribution<int> offset(-30, 30);
    const auto center = *parse_iso_date("2021-03-01");

    std::vector<Post> posts;
    posts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Post p;
        p.id = "p" + std::to_string(i);
        const int len = doc_len(rng);
        for (int w = 0; w < len; ++w) {
            if (!p.text.empty()) p.text += ' ';
            p.text += "term" + std::to_string(word(rng));
        }
        p.date = CivilDate{center.days_since_epoch + offset(rng)};
        p.created_at = format_iso_date(p.date) + "T00:00:00Z";
        posts.push_back(std::move(p));
    }
    return posts;
}

void BM_Tokenize(benchmark::State& state) {
    const std::string text =
        "Apparently vitamin C megadoses make you immune to the virus, according to "
        "half of my timeline today; COVID-19 misinformation keeps mutating!";
    for (auto _ : state) {
        benchmark::DoNotOptimize(tokenize(text));
    }
}
BENCHMARK(BM_Tokenize);

void BM_IndexBuild(benchmark::State& state) {
    const auto posts = synthetic_posts(std::size_t(state.range(0)), 500, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Bm25Index::build(posts, {}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(10000);

void BM_Retrieve(benchmark::State& state) {
    const auto posts = synthetic_posts(std::size_t(state.range(0)), 500, 7);
    const auto index = Bm25Index::build(posts, {});
    const auto query = tokenize("term1 term42 term99 term7 term250");
    const auto center = *parse_iso_date("2021-03-01");
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.retrieve(query, center, 14, 1000));
    }
}
BENCHMARK(BM_Retrieve)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_ScoreSingleDoc(benchmark::State& state) {
    const auto posts = synthetic_posts(10000, 500, 7);
    const auto index = Bm25Index::build(posts, {});
    const auto query = tokenize("term1 term42 term99 term7 term250");
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.score(query, "p5000"));
    }
}
BENCHMARK(BM_ScoreSingleDoc);

} // namespace
