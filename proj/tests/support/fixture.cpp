#include "support/fixture.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "factgpt/chat.hpp"
#include "factgpt/dates.hpp"
#include "factgpt/digest.hpp"
#include "factgpt/errors.hpp"
#include "factgpt/prompts.hpp"
#include "factgpt/records.hpp"
#include "factgpt/rerank.hpp"

namespace factgpt::testing {

using nlohmann::ordered_json;

namespace {

struct ClaimRow {
    const char* id;
    const char* text;
    const char* date;
    const char* rating;
};

// Eight claims that pass every filter.
constexpr std::array<ClaimRow, 8> kClaims = {{
    {"c1", "Garlic water cures the coronavirus within one day", "2021-02-10", "False"},
    {"c2", "The vaccine contains microchips that track people", "2021-02-20", "Fake"},
    {"c3", "Drinking bleach protects against covid infection", "2021-03-01", "False"},
    {"c4", "5g towers spread the coronavirus through radio waves", "2021-03-08", "Incorrect"},
    {"c5", "Masks cause dangerous carbon dioxide poisoning", "2021-03-15", "False"},
    {"c6", "The pandemic was planned by billionaires decades ago", "2021-03-22", "Fake"},
    {"c7", "Vitamin c megadoses make you immune to the virus", "2021-04-01", "False"},
    {"c8", "Hand sanitizer causes antibiotic resistant superbugs", "2021-04-10", "Incorrect"},
}};

// Five topical post patterns per claim; {} is replaced with the topic phrase.
constexpr std::array<const char*, 5> kPostPatterns = {{
    "my neighbor swears {} and nobody can tell him otherwise",
    "apparently {} according to half of my timeline today",
    "a coworker keeps insisting {} which seems wild to me",
    "saw three people claim {} in the comments this morning",
    "grandma called to warn me that {} so that happened",
}};

constexpr std::array<const char*, 8> kTopicPhrases = {{
    "garlic water cures the coronavirus in a single day",
    "the vaccine has microchips tracking everyone",
    "drinking bleach keeps covid infection away",
    "5g towers are spreading the coronavirus with radio waves",
    "masks poison you with carbon dioxide",
    "billionaires planned the pandemic decades ago",
    "vitamin c megadoses make people immune to the virus",
    "hand sanitizer breeds antibiotic resistant superbugs",
}};

constexpr std::array<int, 5> kPostDayOffsets = {{0, -3, 4, 9, 13}};

std::string jsonl_line(const ordered_json& j) { return j.dump() + "\n"; }

EntailmentLabel policy_label(const std::string& salt, const std::string& pair_id,
                             PresentationOrder order) {
    const std::string key = salt + "|" + std::string(to_string(order)) + "|" + pair_id;
    return kAllLabels[fnv1a64(key) % 3];
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
    out << content;
}

RunConfig base_config(const std::filesystem::path& fixture_dir,
                      const std::filesystem::path& workdir) {
    RunConfig cfg;
    cfg.config_dir = fixture_dir;
    cfg.claims_path = fixture_dir / "claims.jsonl";
    cfg.posts_path = fixture_dir / "posts.jsonl";
    cfg.judgments_path = fixture_dir / "judgments.jsonl";
    cfg.workdir = workdir;
    cfg.base_seed = 90821;
    cfg.n_draws = 1000;

    ProviderConfig embed;
    embed.type = ProviderConfig::Type::embedding;
    embed.embedding.kind = EmbeddingKind::deterministic_local;
    embed.embedding.model_name = "local-embed";
    embed.embedding.dim = 64;
    cfg.providers.emplace("local-embed", embed);
    cfg.embedding_provider = "local-embed";
    return cfg;
}

} // namespace

std::string fixture_claims_jsonl() {
    std::ostringstream out;
    for (const auto& row : kClaims) {
        ordered_json j;
        j["id"] = row.id;
        j["text"] = row.text;
        j["date"] = row.date;
        j["rating"] = row.rating;
        j["source"] = "toy-feed";
        out << jsonl_line(j);
    }
    // Records every filter must reject.
    out << jsonl_line({{"id", "cx1"},
                       {"text", "Watch the proof here https://example.com/video"},
                       {"date", "2021-02-12"},
                       {"rating", "False"},
                       {"source", "toy-feed"}});
    out << jsonl_line({{"id", "cx2"},
                       {"text", "Cold weather makes colds more likely"},
                       {"date", "2021-02-14"},
                       {"rating", "Half True"},
                       {"source", "toy-feed"}});
    out << jsonl_line({{"id", "cx3"},
                       {"text", "Garlic  water cures the coronavirus within one  day"},
                       {"date", "2021-03-05"},
                       {"rating", "False"},
                       {"source", "toy-feed"}});
    return out.str();
}

std::string fixture_posts_jsonl() {
    std::ostringstream out;
    int post_number = 0;
    for (std::size_t c = 0; c < kClaims.size(); ++c) {
        const auto claim_date = *parse_iso_date(kClaims[c].date);
        for (std::size_t p = 0; p < kPostPatterns.size(); ++p) {
            ++post_number;
            char id[16];
            std::snprintf(id, sizeof(id), "p%02d", post_number);
            std::string text(kPostPatterns[p]);
            const auto slot = text.find("{}");
            text.replace(slot, 2, kTopicPhrases[c]);
            const CivilDate date{claim_date.days_since_epoch + kPostDayOffsets[p]};
            ordered_json j;
            j["id"] = id;
            j["text"] = text;
            j["created_at"] = format_iso_date(date) + "T12:00:00Z";
            out << jsonl_line(j);
        }
    }
    out << jsonl_line({{"id", "px1"},
                       {"text", "RT @someone: garlic water cures everything"},
                       {"created_at", "2021-02-11T08:00:00Z"}});
    out << jsonl_line({{"id", "px2"},
                       {"text", "see this clip www.example.com about the vaccine"},
                       {"created_at", "2021-02-21T08:00:00Z"}});
    out << jsonl_line({{"id", "px3"}, {"text", "no timestamp on this one"}});
    out << jsonl_line({{"id", "px4"}, {"text", "   "}, {"created_at", "2021-03-02T08:00:00Z"}});
    return out.str();
}

EntailmentLabel fixture_human_label(const std::string& pair_id, PresentationOrder order) {
    // Pick the intended final label per pair, then derive per-order labels
    // that the bidirectional rule maps back onto it. Keeps all three final
    // classes represented across the fixture.
    const auto final_label = kAllLabels[fnv1a64("human-final|" + pair_id) % 3];
    switch (final_label) {
        case EntailmentLabel::entailment:
            return order == PresentationOrder::post_first ? EntailmentLabel::entailment
                                                          : policy_label("human", pair_id, order);
        case EntailmentLabel::neutral:
            // (neutral, neutral) or (neutral, contradiction): both final to neutral.
            if (order == PresentationOrder::post_first) return EntailmentLabel::neutral;
            return fnv1a64("human-neutral|" + pair_id) % 2 == 0 ? EntailmentLabel::neutral
                                                                : EntailmentLabel::contradiction;
        case EntailmentLabel::contradiction:
            return EntailmentLabel::contradiction;
    }
    return EntailmentLabel::neutral;
}

EntailmentLabel fixture_model_label(const std::string& pair_id, PresentationOrder order) {
    return policy_label("model", pair_id, order);
}

std::filesystem::path make_temp_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    const auto root = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto candidate = root / ("factgpt_" + tag + "_" + std::to_string(rng()));
        std::error_code ec;
        if (std::filesystem::create_directories(candidate, ec) && !ec) return candidate;
    }
    raise(ErrorCode::io_failure, "cannot create a temp directory");
}

RunConfig fixture_config(const std::filesystem::path& fixture_dir,
                         const std::filesystem::path& workdir) {
    RunConfig cfg = RunConfig::load(fixture_dir / "config.json");
    cfg.workdir = workdir;
    return cfg;
}

void write_fixture(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "claims.jsonl", fixture_claims_jsonl());
    write_file(dir / "posts.jsonl", fixture_posts_jsonl());

    // The judgments and mock scripts cover exactly the pairs the pipeline
    // selects, so derive those pairs by running the retrieval stages.
    const auto tmp = make_temp_dir("fixture_pairs");
    std::vector<CandidatePair> pairs;
    std::vector<Claim> claims;
    std::vector<Post> posts;
    {
        PipelineRunner runner(base_config(dir, tmp));
        runner.run_ingest();
        runner.run_index();
        runner.run_pair();
        pairs = load_pairs(tmp / "pairs/pairs.jsonl");
        claims = load_claims(tmp / "ingest/claims.jsonl");
        posts = load_posts(tmp / "ingest/posts.jsonl");
    }
    std::filesystem::remove_all(tmp);

    const auto claim_text = make_claim_lookup(claims);
    const auto post_text = make_post_lookup(posts);

    std::ostringstream judgments;
    std::ostringstream chat_script;
    for (const auto& pair : pairs) {
        const auto pair_id = make_pair_id(pair.claim_id, pair.post_id);
        for (const auto order : kBothOrders) {
            const auto human = fixture_human_label(pair_id, order);
            for (int rater = 1; rater <= 5; ++rater) {
                judgments << jsonl_line({{"pair_id", pair_id},
                                         {"order", std::string(to_string(order))},
                                         {"rater_id", "r" + std::to_string(rater)},
                                         {"label", std::string(to_string(human))}});
            }
            const auto prompt =
                render_annotation_prompt(PromptStyle::annotation_only, order,
                                         post_text(pair.post_id), claim_text(pair.claim_id));
            chat_script << jsonl_line(
                {{"prompt_sha256", prompt_digest("mock-annotator", prompt)},
                 {"response", std::string(to_string(fixture_model_label(pair_id, order)))}});
        }
    }
    write_file(dir / "judgments.jsonl", judgments.str());
    write_file(dir / "chat_script.jsonl", chat_script.str());

    std::ostringstream gen_script;
    for (const auto& claim : claims) {
        for (const auto label : kAllLabels) {
            for (const auto order : kBothOrders) {
                const auto prompt = render_generation_prompt(label, order, claim.text);
                const std::string text =
                    "Folks keep saying " +
                    std::string(kTopicPhrases[static_cast<std::size_t>(claim.id[1] - '1')]) +
                    " (" + std::string(to_string(label)) + " take, " +
                    std::string(to_string(order)) + ")";
                gen_script << jsonl_line(
                    {{"prompt_sha256", prompt_digest("mock-generator", prompt)},
                     {"response", text}});
            }
        }
    }
    write_file(dir / "gen_script.jsonl", gen_script.str());

    ordered_json config;
    config["paths"] = {{"claims", "claims.jsonl"},
                       {"posts", "posts.jsonl"},
                       {"judgments", "judgments.jsonl"},
                       {"workdir", "workdir"}};
    config["bm25"] = {{"k1", 1.2}, {"b", 0.75}};
    config["window_days"] = 14;
    config["top_k"] = 1000;
    config["per_claim"] = 1;
    config["n_draws"] = 1000;
    config["base_seed"] = 90821;
    config["train_fraction"] = 0.8;
    config["mix"] = {{"preset", "balanced"}};
    config["embedding_provider"] = "local-embed";
    config["annotation_providers"] = {"mock-annotator"};
    config["generation_providers"] = {"mock-generator"};
    config["providers"] = {
        {"local-embed",
         {{"type", "embedding"}, {"kind", "deterministic-local"}, {"dim", 64}}},
        {"mock-annotator", {{"type", "chat"}, {"kind", "mock"}, {"script", "chat_script.jsonl"}}},
        {"mock-generator", {{"type", "chat"}, {"kind", "mock"}, {"script", "gen_script.jsonl"}}},
    };
    write_file(dir / "config.json", config.dump(2) + "\n");
}

void write_goldens(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string post = "heard from a friend that garlic tea wipes out the flu overnight";
    const std::string claim = "Garlic tea cures influenza overnight";

    for (const auto style : kAllStyles) {
        for (const auto order : kBothOrders) {
            const auto messages = render_annotation_prompt(style, order, post, claim);
            const auto name = "annotation_" + std::string(to_string(style)) + "_" +
                              std::string(to_string(order)) + ".txt";
            write_file(dir / name, format_messages(messages));
        }
    }
    for (const auto label : kAllLabels) {
        for (const auto order : kBothOrders) {
            const auto messages = render_generation_prompt(label, order, claim);
            std::string label_name(to_string(label));
            for (auto& c : label_name) c = static_cast<char>(std::tolower(c));
            const auto name = "generation_" + label_name + "_" +
                              std::string(to_string(order)) + ".txt";
            write_file(dir / name, format_messages(messages));
        }
    }
}

} // namespace factgpt::testing
