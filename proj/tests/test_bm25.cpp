#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "factgpt/bm25.hpp"
#include "factgpt/errors.hpp"
#include "support/fixture.hpp"
#include "support/oracles.hpp"

using namespace factgpt;

namespace {

Post make_post(std::string id, std::string text, const char* date = "2021-03-01") {
    Post p;
    p.id = std::move(id);
    p.text = std::move(text);
    p.created_at = std::string(date) + "T00:00:00Z";
    p.date = *parse_iso_date(date);
    return p;
}

// The three-document corpus used across the scoring examples.
std::vector<Post> abc_corpus() {
    return {make_post("d1", "a b"), make_post("d2", "b c"), make_post("d3", "c d")};
}

std::vector<Post> random_corpus(std::mt19937& rng, int max_docs, int vocab) {
    std::uniform_int_distribution<int> n_docs(1, max_docs);
    std::uniform_int_distribution<int> doc_len(0, 12);
    std::uniform_int_distribution<int> word(0, vocab - 1);
    std::vector<Post> posts;
    const int n = n_docs(rng);
    for (int i = 0; i < n; ++i) {
        std::string text;
        const int len = doc_len(rng);
        for (int w = 0; w < len; ++w) {
            if (!text.empty()) text += ' ';
            text += "w" + std::to_string(word(rng));
        }
        posts.push_back(make_post("doc" + std::to_string(i), text));
    }
    return posts;
}

TokenSeq random_query(std::mt19937& rng, int vocab) {
    std::uniform_int_distribution<int> q_len(1, 6);
    std::uniform_int_distribution<int> word(0, vocab - 1);
    TokenSeq query;
    const int len = q_len(rng);
    for (int i = 0; i < len; ++i) query.push_back("w" + std::to_string(word(rng)));
    return query;
}

} // namespace

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(tokenize("Vaccinated people emit Bluetooth!") ==
          TokenSeq{"vaccinated", "people", "emit", "bluetooth"});
    CHECK(tokenize("") == TokenSeq{});
    CHECK(tokenize("COVID-19 covid-19") == TokenSeq{"covid", "19", "covid", "19"});
    CHECK(tokenize("  spaced\tout\nwords ") == TokenSeq{"spaced", "out", "words"});
    // Unicode: non-ASCII letters stay, em-dash and curly quotes separate.
    CHECK(tokenize("café—bar") == TokenSeq{"café", "bar"});
    CHECK(tokenize("“quoted”") == TokenSeq{"quoted"});
}

TEST_CASE("index construction computes lengths and postings") {
    const auto index = Bm25Index::build(
        {make_post("x1", "a b"), make_post("x2", "c d"), make_post("x3", "e f")}, {});
    CHECK(index.doc_count() == 3);
    CHECK(index.avg_doc_len() == doctest::Approx(2.0));

    const auto single = Bm25Index::build({make_post("only", "b b")}, {});
    CHECK(single.score({"b"}, "only") > 0.0);
    CHECK(single.doc_count() == 1);
    CHECK(single.avg_doc_len() == doctest::Approx(2.0));
}

TEST_CASE("index rejects empty corpora and duplicate ids") {
    CHECK_THROWS_AS(Bm25Index::build({}, {}), Error);
    try {
        Bm25Index::build({make_post("same", "a"), make_post("same", "b")}, {});
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::duplicate_id);
    }
}

TEST_CASE("bm25 score matches the hand-evaluated formula") {
    const auto index = Bm25Index::build(abc_corpus(), {1.2, 0.75});
    // idf(c) = ln(1 + (3-2+0.5)/(2+0.5)) = ln(1.6); the tf factor cancels at
    // |D| = avgdl, leaving exactly ln(1.6).
    CHECK(index.score({"c"}, "d2") == doctest::Approx(std::log(1.6)).epsilon(1e-12));
    CHECK(index.score({"c"}, "d2") == doctest::Approx(0.4700036292457356).epsilon(1e-9));

    CHECK(index.score({"z"}, "d1") == 0.0);
    CHECK(index.score({"z"}, "d2") == 0.0);
    CHECK(index.score({"z"}, "d3") == 0.0);
    CHECK(index.score({"c"}, "d1") == 0.0);
}

TEST_CASE("unknown documents raise UnknownDoc") {
    const auto index = Bm25Index::build(abc_corpus(), {});
    try {
        index.score({"a"}, "nope");
        FAIL("expected UnknownDoc");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_doc);
    }
}

TEST_CASE("oracle equivalence on random corpora") {
    std::mt19937 rng(1234);
    const Bm25Config cfg{1.2, 0.75};
    for (int round = 0; round < 25; ++round) {
        const auto posts = random_corpus(rng, 50, 20);
        const auto index = Bm25Index::build(posts, cfg);
        const auto query = random_query(rng, 20);
        for (const auto& post : posts) {
            const double expected =
                testing::bm25_oracle_score(posts, query, post.id, cfg.k1, cfg.b);
            CHECK(index.score(query, post.id) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("idf is positive, so zero score means zero overlap") {
    std::mt19937 rng(77);
    for (int round = 0; round < 10; ++round) {
        const auto posts = random_corpus(rng, 30, 8);
        const auto index = Bm25Index::build(posts, {});
        const auto query = random_query(rng, 8);
        for (const auto& post : posts) {
            const auto tokens = tokenize(post.text);
            bool overlap = false;
            for (const auto& q : query)
                overlap |= std::find(tokens.begin(), tokens.end(), q) != tokens.end();
            CHECK((index.score(query, post.id) > 0.0) == overlap);
        }
    }
}

TEST_CASE("per-term score increases strictly with term frequency") {
    const double k1 = 1.2, b = 0.75, idf = 0.7, doc_len = 10.0, avgdl = 8.0;
    const auto term_score = [&](double tf) {
        return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc_len / avgdl));
    };
    double prev = 0.0;
    for (int tf = 1; tf <= 50; ++tf) {
        const double s = term_score(tf);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("retrieval respects the window, ordering and k") {
    std::vector<Post> posts = {
        make_post("in1", "garlic cures covid", "2021-03-01"),
        make_post("in2", "garlic garlic covid", "2021-03-10"),
        make_post("edge", "covid garlic news", "2021-03-15"),
        make_post("out", "garlic covid again", "2021-03-16"),
        make_post("nomatch", "totally unrelated words", "2021-03-01"),
    };
    const auto index = Bm25Index::build(posts, {});
    const auto query = tokenize("garlic covid");
    const auto center = *parse_iso_date("2021-03-01");

    SUBCASE("inclusive 14-day window") {
        const auto results = index.retrieve(query, center, 14, 10);
        std::vector<std::string> ids;
        for (const auto& r : results) ids.push_back(r.post_id);
        CHECK(std::find(ids.begin(), ids.end(), "edge") != ids.end());  // exactly 14 days out
        CHECK(std::find(ids.begin(), ids.end(), "out") == ids.end());   // 15 days out
        CHECK(std::find(ids.begin(), ids.end(), "nomatch") == ids.end());  // zero score
    }

    SUBCASE("window_days = 0 keeps only same-date posts") {
        const auto results = index.retrieve(query, center, 0, 10);
        REQUIRE(results.size() == 1);
        CHECK(results[0].post_id == "in1");
    }

    SUBCASE("empty eligible set yields an empty list") {
        CHECK(index.retrieve(query, *parse_iso_date("1999-01-01"), 3, 10).empty());
        CHECK(index.retrieve({"zzz"}, center, 14, 10).empty());
    }

    SUBCASE("k truncates the full ranking") {
        const auto all = index.retrieve(query, center, 14, 10);
        const auto top2 = index.retrieve(query, center, 14, 2);
        REQUIRE(all.size() >= 3);
        REQUIRE(top2.size() == 2);
        CHECK(top2[0].post_id == all[0].post_id);
        CHECK(top2[1].post_id == all[1].post_id);
        CHECK(all[0].bm25_score >= all[1].bm25_score);
    }
}

TEST_CASE("retrieval ties break by ascending post id") {
    // Identical documents score identically.
    const auto index = Bm25Index::build(
        {make_post("b", "tied words"), make_post("a", "tied words"), make_post("c", "tied words")},
        {});
    const auto results = index.retrieve({"tied"}, *parse_iso_date("2021-03-01"), 14, 10);
    REQUIRE(results.size() == 3);
    CHECK(results[0].post_id == "a");
    CHECK(results[1].post_id == "b");
    CHECK(results[2].post_id == "c");
    CHECK(results[0].bm25_score == results[1].bm25_score);
}

TEST_CASE("retrieval equals brute force on a random fixture") {
    std::mt19937 rng(4242);
    const Bm25Config cfg{1.2, 0.75};
    auto posts = random_corpus(rng, 40, 12);
    // Spread dates so the window matters.
    std::uniform_int_distribution<int> offset(-20, 20);
    for (auto& p : posts) {
        p.date = CivilDate{parse_iso_date("2021-03-01")->days_since_epoch + offset(rng)};
        p.created_at = format_iso_date(p.date) + "T00:00:00Z";
    }
    const auto index = Bm25Index::build(posts, cfg);
    const auto center = *parse_iso_date("2021-03-01");
    for (int round = 0; round < 10; ++round) {
        const auto query = random_query(rng, 12);
        const auto got = index.retrieve(query, center, 14, 5);
        const auto expected =
            testing::brute_force_retrieve(posts, query, center, 14, 5, cfg.k1, cfg.b);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].post_id == expected[i].post_id);
            CHECK(got[i].bm25_score == expected[i].bm25_score);  // bit-exact
        }
    }
}

TEST_CASE("index save/load round trip preserves scores bit for bit") {
    std::mt19937 rng(5150);
    const auto posts = random_corpus(rng, 30, 10);
    const auto index = Bm25Index::build(posts, {1.5, 0.6});

    const auto dir = testing::make_temp_dir("bm25");
    const auto path = dir / "index.idx";
    index.save(path);
    const auto reloaded = Bm25Index::load(path);

    CHECK(reloaded.doc_count() == index.doc_count());
    CHECK(reloaded.avg_doc_len() == index.avg_doc_len());
    CHECK(reloaded.config().k1 == index.config().k1);

    for (int round = 0; round < 20; ++round) {
        const auto query = random_query(rng, 10);
        for (const auto& post : posts)
            CHECK(reloaded.score(query, post.id) == index.score(query, post.id));
    }

    // Re-saving the reloaded index reproduces the file byte for byte.
    const auto path2 = dir / "index2.idx";
    reloaded.save(path2);
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("index load rejects corrupt files") {
    const auto dir = testing::make_temp_dir("bm25bad");
    const auto path = dir / "bad.idx";
    {
        std::ofstream out(path, std::ios::binary);
        out << "not an index\n";
    }
    CHECK_THROWS_AS(Bm25Index::load(path), Error);
    CHECK_THROWS_AS(Bm25Index::load(dir / "missing.idx"), Error);
}
