#include "factgpt/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include "factgpt/digest.hpp"
#include "factgpt/errors.hpp"
#include "factgpt/records.hpp"
#include "factgpt/rerank.hpp"
#include "factgpt/text.hpp"
#include "parallel.hpp"

namespace factgpt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string utc_now_iso() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
    out << content;
    if (!out) raise(ErrorCode::io_failure, "failed writing " + path.string());
}

void write_json_file(const std::filesystem::path& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string raw) {
    std::filesystem::path p(std::move(raw));
    if (p.is_absolute()) return p;
    return base / p;
}

ChatProviderSpec parse_chat_provider(const std::string& name, const json& j,
                                     const std::filesystem::path& config_dir) {
    ChatProviderSpec spec;
    const std::string kind = j.value("kind", "mock");
    if (kind == "remote") {
        spec.kind = ChatKind::remote;
    } else if (kind == "mock") {
        spec.kind = ChatKind::mock;
    } else {
        raise(ErrorCode::config_invalid, "provider " + name + ": unknown chat kind " + kind);
    }
    spec.endpoint = j.value("endpoint", "");
    spec.model_name = j.value("model_name", name);
    if (j.contains("temperature")) spec.temperature = j["temperature"].get<double>();
    spec.max_retries = j.value("max_retries", 3);
    spec.timeout_ms = j.value("timeout_ms", 30000);
    spec.backoff_ms = j.value("backoff_ms", 500);
    if (j.contains("max_tokens")) {
        if (j["max_tokens"].is_null())
            spec.max_tokens.reset();
        else
            spec.max_tokens = j["max_tokens"].get<int>();
    }
    spec.api_key_env = j.value("api_key_env", "");
    if (j.contains("script"))
        spec.script_path = resolve(config_dir, j["script"].get<std::string>()).string();
    spec.requests_per_minute = j.value("requests_per_minute", 0.0);
    spec.max_in_flight = j.value("max_in_flight", 8);
    spec.parallelism = j.value("parallelism", 1);
    return spec;
}

EmbeddingProviderSpec parse_embedding_provider(const std::string& name, const json& j) {
    EmbeddingProviderSpec spec;
    const std::string kind = j.value("kind", "deterministic-local");
    if (kind == "remote") {
        spec.kind = EmbeddingKind::remote;
    } else if (kind == "deterministic-local") {
        spec.kind = EmbeddingKind::deterministic_local;
    } else {
        raise(ErrorCode::config_invalid, "provider " + name + ": unknown embedding kind " + kind);
    }
    spec.endpoint = j.value("endpoint", "");
    spec.model_name = j.value("model_name", name);
    spec.dim = j.value("dim", std::size_t{384});
    spec.api_key_env = j.value("api_key_env", "");
    spec.max_retries = j.value("max_retries", 3);
    spec.timeout_ms = j.value("timeout_ms", 30000);
    spec.backoff_ms = j.value("backoff_ms", 500);
    spec.batch_size = j.value("batch_size", std::size_t{64});
    spec.parallelism = j.value("parallelism", 1);
    return spec;
}

std::string label_or(const std::optional<EntailmentLabel>& label, const char* fallback) {
    return label ? std::string(to_string(*label)) : fallback;
}

} // namespace

MixSpec MixChoice::resolve(std::size_t corpus_size) const {
    const std::size_t n = total > 0 ? total : corpus_size;
    switch (preset) {
        case MixPreset::balanced: return MixSpec::balanced(n);
        case MixPreset::imbalanced: return MixSpec::imbalanced(n);
        case MixPreset::custom: return MixSpec{fractions, n};
    }
    return MixSpec::balanced(n);
}

std::string_view MixChoice::name() const {
    switch (preset) {
        case MixPreset::balanced: return "balanced";
        case MixPreset::imbalanced: return "imbalanced";
        case MixPreset::custom: return "custom";
    }
    return "balanced";
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::missing_input, "cannot open config " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(ErrorCode::config_invalid, path.string() + " is not a JSON object");

    RunConfig cfg;
    cfg.config_dir = std::filesystem::absolute(path).parent_path();

    if (!j.contains("paths") || !j["paths"].is_object())
        raise(ErrorCode::config_invalid, "config requires a paths object");
    const auto& paths = j["paths"];
    if (!paths.contains("claims") || !paths.contains("posts"))
        raise(ErrorCode::config_invalid, "paths requires claims and posts");
    cfg.claims_path = resolve(cfg.config_dir, paths["claims"].get<std::string>());
    cfg.posts_path = resolve(cfg.config_dir, paths["posts"].get<std::string>());
    if (paths.contains("judgments"))
        cfg.judgments_path = resolve(cfg.config_dir, paths["judgments"].get<std::string>());
    cfg.workdir = resolve(cfg.config_dir, paths.value("workdir", "workdir"));

    if (j.contains("bm25")) {
        cfg.bm25.k1 = j["bm25"].value("k1", 1.2);
        cfg.bm25.b = j["bm25"].value("b", 0.75);
    }
    cfg.window_days = j.value("window_days", 14);
    cfg.top_k = j.value("top_k", 1000);
    cfg.per_claim = j.value("per_claim", 1);
    cfg.n_draws = j.value("n_draws", 1000);
    cfg.base_seed = j.value("base_seed", std::uint64_t{1});
    cfg.train_fraction = j.value("train_fraction", 0.8);

    if (j.contains("rating_allowlist")) {
        cfg.rating_allowlist.clear();
        for (const auto& r : j["rating_allowlist"]) cfg.rating_allowlist.insert(r.get<std::string>());
    }

    if (j.contains("mix")) {
        const auto& mix = j["mix"];
        const std::string preset = mix.value("preset", "balanced");
        if (preset == "balanced") {
            cfg.mix.preset = MixPreset::balanced;
        } else if (preset == "imbalanced") {
            cfg.mix.preset = MixPreset::imbalanced;
        } else if (preset == "custom") {
            cfg.mix.preset = MixPreset::custom;
            if (!mix.contains("fractions"))
                raise(ErrorCode::config_invalid, "custom mix requires fractions");
            for (const auto label : kAllLabels) {
                const std::string key(to_string(label));
                if (!mix["fractions"].contains(key))
                    raise(ErrorCode::config_invalid, "custom mix missing fraction for " + key);
                cfg.mix.fractions[static_cast<std::size_t>(label)] =
                    mix["fractions"][key].get<double>();
            }
        } else {
            raise(ErrorCode::config_invalid, "unknown mix preset " + preset);
        }
        cfg.mix.total = mix.value("total", std::size_t{0});
    }

    if (j.contains("unresolved_policy")) {
        const std::string policy = j["unresolved_policy"].get<std::string>();
        if (policy == "exclude") {
            cfg.unresolved_policy = UnresolvedPolicy::exclude;
        } else if (policy == "count-as-wrong") {
            cfg.unresolved_policy = UnresolvedPolicy::count_as_wrong;
        } else {
            raise(ErrorCode::config_invalid, "unknown unresolved_policy " + policy);
        }
    }

    cfg.embedding_provider = j.value("embedding_provider", "");
    if (j.contains("annotation_providers"))
        for (const auto& p : j["annotation_providers"])
            cfg.annotation_providers.push_back(p.get<std::string>());
    if (j.contains("generation_providers"))
        for (const auto& p : j["generation_providers"])
            cfg.generation_providers.push_back(p.get<std::string>());

    if (j.contains("conditions")) {
        for (const auto& c : j["conditions"]) {
            Condition condition;
            condition.provider = c.at("provider").get<std::string>();
            const auto style = style_from_string(c.at("style").get<std::string>());
            if (!style)
                raise(ErrorCode::config_invalid,
                      "bad style in conditions: " + c.at("style").get<std::string>());
            condition.style = *style;
            cfg.conditions.push_back(std::move(condition));
        }
    }

    if (j.contains("providers")) {
        for (const auto& [name, pj] : j["providers"].items()) {
            ProviderConfig provider;
            const std::string type = pj.value("type", "chat");
            if (type == "chat") {
                provider.type = ProviderConfig::Type::chat;
                provider.chat = parse_chat_provider(name, pj, cfg.config_dir);
            } else if (type == "embedding") {
                provider.type = ProviderConfig::Type::embedding;
                provider.embedding = parse_embedding_provider(name, pj);
            } else {
                raise(ErrorCode::config_invalid, "provider " + name + ": unknown type " + type);
            }
            cfg.providers.emplace(name, std::move(provider));
        }
    }

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (window_days < 0) raise(ErrorCode::config_invalid, "window_days must be >= 0");
    if (top_k < 1) raise(ErrorCode::config_invalid, "top_k must be >= 1");
    if (per_claim < 1) raise(ErrorCode::config_invalid, "per_claim must be >= 1");
    if (n_draws < 1) raise(ErrorCode::config_invalid, "n_draws must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        raise(ErrorCode::config_invalid, "train_fraction must lie strictly between 0 and 1");
    if (!(bm25.k1 > 0.0) || bm25.b < 0.0 || bm25.b > 1.0)
        raise(ErrorCode::config_invalid, "bm25 requires k1 > 0 and b in [0, 1]");

    const auto check = [&](const std::string& name, ProviderConfig::Type type,
                           const char* role) {
        const auto it = providers.find(name);
        if (it == providers.end())
            raise(ErrorCode::config_invalid, std::string(role) + " references unknown provider " +
                                                 name);
        if (it->second.type != type)
            raise(ErrorCode::config_invalid,
                  std::string(role) + " provider " + name + " has the wrong type");
    };
    if (!embedding_provider.empty())
        check(embedding_provider, ProviderConfig::Type::embedding, "embedding_provider");
    for (const auto& p : annotation_providers)
        check(p, ProviderConfig::Type::chat, "annotation_providers");
    for (const auto& p : generation_providers)
        check(p, ProviderConfig::Type::chat, "generation_providers");
    for (const auto& c : conditions) check(c.provider, ProviderConfig::Type::chat, "conditions");
}

std::string RunConfig::digest() const {
    json canon;
    canon["claims"] = claims_path.string();
    canon["posts"] = posts_path.string();
    canon["judgments"] = judgments_path.string();
    canon["bm25_k1"] = bm25.k1;
    canon["bm25_b"] = bm25.b;
    canon["window_days"] = window_days;
    canon["top_k"] = top_k;
    canon["per_claim"] = per_claim;
    canon["n_draws"] = n_draws;
    canon["base_seed"] = base_seed;
    canon["train_fraction"] = train_fraction;
    canon["rating_allowlist"] = rating_allowlist;
    canon["mix_preset"] = std::string(mix.name());
    canon["mix_total"] = mix.total;
    canon["mix_fractions"] = mix.fractions;
    canon["unresolved_policy"] =
        unresolved_policy == UnresolvedPolicy::exclude ? "exclude" : "count-as-wrong";
    canon["embedding_provider"] = embedding_provider;
    canon["annotation_providers"] = annotation_providers;
    canon["generation_providers"] = generation_providers;
    json conds = json::array();
    for (const auto& c : conditions)
        conds.push_back({{"provider", c.provider}, {"style", std::string(to_string(c.style))}});
    canon["conditions"] = std::move(conds);
    json provs;
    for (const auto& [name, p] : providers) {
        json pj;
        if (p.type == ProviderConfig::Type::chat) {
            pj["type"] = "chat";
            pj["kind"] = p.chat.kind == ChatKind::remote ? "remote" : "mock";
            pj["endpoint"] = p.chat.endpoint;
            pj["model_name"] = p.chat.model_name;
            if (p.chat.temperature) pj["temperature"] = *p.chat.temperature;
            pj["max_retries"] = p.chat.max_retries;
            if (p.chat.max_tokens) pj["max_tokens"] = *p.chat.max_tokens;
            pj["script"] = p.chat.script_path;
        } else {
            pj["type"] = "embedding";
            pj["kind"] =
                p.embedding.kind == EmbeddingKind::remote ? "remote" : "deterministic-local";
            pj["endpoint"] = p.embedding.endpoint;
            pj["model_name"] = p.embedding.model_name;
            pj["dim"] = p.embedding.dim;
        }
        provs[name] = std::move(pj);
    }
    canon["providers"] = std::move(provs);
    return sha256_hex(canon.dump());
}

RunManifest RunManifest::load_or_create(const std::filesystem::path& workdir,
                                        const std::string& config_digest) {
    RunManifest manifest;
    manifest.tool_version = std::string(kToolVersion);
    manifest.config_sha256 = config_digest;

    const auto path = workdir / "manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) return manifest;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return manifest;
    // A config change invalidates recorded stages; start a fresh manifest.
    if (j.value("config_sha256", "") != config_digest) return manifest;

    if (j.contains("inputs"))
        for (const auto& [name, digest] : j["inputs"].items())
            manifest.inputs[name] = digest.get<std::string>();
    if (j.contains("stages")) {
        for (const auto& [name, sj] : j["stages"].items()) {
            Stage stage;
            stage.completed_at = sj.value("completed_at", "");
            if (sj.contains("outputs"))
                for (const auto& [file, digest] : sj["outputs"].items())
                    stage.outputs[file] = digest.get<std::string>();
            manifest.stages[name] = std::move(stage);
        }
    }
    return manifest;
}

void RunManifest::save(const std::filesystem::path& workdir) const {
    ordered_json j;
    j["tool_version"] = tool_version;
    j["config_sha256"] = config_sha256;
    ordered_json inputs_json;
    for (const auto& [name, digest] : inputs) inputs_json[name] = digest;
    j["inputs"] = std::move(inputs_json);
    ordered_json stages_json;
    for (const auto& [name, stage] : stages) {
        ordered_json sj;
        sj["completed_at"] = stage.completed_at;
        ordered_json outputs_json;
        for (const auto& [file, digest] : stage.outputs) outputs_json[file] = digest;
        sj["outputs"] = std::move(outputs_json);
        stages_json[name] = std::move(sj);
    }
    j["stages"] = std::move(stages_json);
    write_json_file(workdir / "manifest.json", j);
}

PipelineRunner::PipelineRunner(RunConfig config)
    : config_(std::move(config)),
      manifest_(RunManifest::load_or_create(config_.workdir, config_.digest())) {
    std::filesystem::create_directories(config_.workdir);
}

const ProviderConfig& PipelineRunner::provider(const std::string& name,
                                               ProviderConfig::Type type) const {
    const auto it = config_.providers.find(name);
    if (it == config_.providers.end())
        raise(ErrorCode::config_invalid, "unknown provider " + name);
    if (it->second.type != type)
        raise(ErrorCode::config_invalid, "provider " + name + " has the wrong type");
    return it->second;
}

ChatClient PipelineRunner::make_chat_client(const std::string& name) const {
    return ChatClient(provider(name, ProviderConfig::Type::chat).chat);
}

EmbeddingClient PipelineRunner::make_embedding_client(const std::string& name) const {
    return EmbeddingClient(provider(name, ProviderConfig::Type::embedding).embedding);
}

std::filesystem::path PipelineRunner::require(const std::filesystem::path& relative,
                                              const std::string& produced_by) const {
    const auto path = config_.workdir / relative;
    if (!std::filesystem::exists(path))
        raise(ErrorCode::missing_input,
              path.string() + " is missing; run '" + produced_by + "' first");
    return path;
}

void PipelineRunner::record_stage(const std::string& stage,
                                  const std::vector<std::string>& outputs) {
    RunManifest::Stage record;
    record.completed_at = utc_now_iso();
    for (const auto& file : outputs)
        record.outputs[file] = sha256_file(config_.workdir / file);
    manifest_.stages[stage] = std::move(record);
    manifest_.save(config_.workdir);
}

void PipelineRunner::run_ingest() {
    if (!std::filesystem::exists(config_.claims_path))
        raise(ErrorCode::missing_input, "claims file " + config_.claims_path.string());
    if (!std::filesystem::exists(config_.posts_path))
        raise(ErrorCode::missing_input, "posts file " + config_.posts_path.string());
    manifest_.inputs["claims"] = sha256_file(config_.claims_path);
    manifest_.inputs["posts"] = sha256_file(config_.posts_path);

    const auto claims = ingest_claims(config_.claims_path, config_.rating_allowlist);
    const auto posts = ingest_posts(config_.posts_path);

    save_claims(claims.claims, config_.workdir / "ingest/claims.jsonl");
    save_ingest_report(claims.report, config_.workdir / "ingest/claims_report.json");
    save_posts(posts.posts, config_.workdir / "ingest/posts.jsonl");
    save_ingest_report(posts.report, config_.workdir / "ingest/posts_report.json");

    record_stage("ingest", {"ingest/claims.jsonl", "ingest/claims_report.json",
                            "ingest/posts.jsonl", "ingest/posts_report.json"});
}

void PipelineRunner::run_index() {
    const auto posts = load_posts(require("ingest/posts.jsonl", "ingest"));
    const auto index = Bm25Index::build(posts, config_.bm25);
    index.save(config_.workdir / "index/bm25.idx");
    record_stage("index", {"index/bm25.idx"});
}

void PipelineRunner::run_pair(const std::string& provider_override) {
    const auto claims = load_claims(require("ingest/claims.jsonl", "ingest"));
    const auto posts = load_posts(require("ingest/posts.jsonl", "ingest"));
    const auto index = Bm25Index::load(require("index/bm25.idx", "index"));

    const std::string provider_name =
        !provider_override.empty() ? provider_override : config_.embedding_provider;
    if (provider_name.empty())
        raise(ErrorCode::config_invalid, "no embedding provider configured");
    const auto embedder = make_embedding_client(provider_name);
    const auto post_text = make_post_lookup(posts);

    std::map<std::string, std::vector<CandidatePair>> reranked;
    for (const auto& claim : claims) {
        const auto candidates =
            retrieve_candidates(index, claim, config_.window_days, config_.top_k);
        if (candidates.empty()) continue;  // no eligible post: the claim contributes no pair
        reranked[claim.id] = rerank(claim, candidates, post_text, embedder);
    }
    const auto pairs = select_top_pairs(reranked, config_.per_claim);
    save_pairs(pairs, config_.workdir / "pairs/pairs.jsonl");
    record_stage("pair", {"pairs/pairs.jsonl"});
}

void PipelineRunner::run_annotate(const std::string& provider_name, PromptStyle style,
                                  AnnotateOrders orders) {
    const auto pairs = load_pairs(require("pairs/pairs.jsonl", "pair"));
    const auto claims = load_claims(require("ingest/claims.jsonl", "ingest"));
    const auto posts = load_posts(require("ingest/posts.jsonl", "ingest"));
    const auto claim_text = make_claim_lookup(claims);
    const auto post_text = make_post_lookup(posts);

    auto client = make_chat_client(provider_name);
    std::vector<CompletionLogEntry> log_entries;
    std::mutex log_mutex;
    client.set_log_sink([&](const CompletionLogEntry& entry) {
        std::lock_guard<std::mutex> lock(log_mutex);
        log_entries.push_back(entry);
    });

    struct PairResult {
        ModelAnnotation annotation;
        std::optional<EntailmentLabel> single_order;
        int unparsable = 0;
    };
    std::vector<PairResult> results(pairs.size());
    const CallOptions options{};  // annotation default temperature: 0

    detail::parallel_for(pairs.size(), client.spec().parallelism, [&](std::size_t i) {
        const auto& pair = pairs[i];
        const auto& post = post_text(pair.post_id);
        const auto& claim = claim_text(pair.claim_id);
        if (orders == AnnotateOrders::both) {
            results[i].annotation =
                annotate_pair_with_model(client, style, post, claim, options);
        } else {
            const auto order = orders == AnnotateOrders::post_first_only
                                   ? PresentationOrder::post_first
                                   : PresentationOrder::claim_first;
            results[i].single_order = annotate_order_with_model(
                client, style, order, post, claim, options, TemplateSet::builtin(),
                &results[i].unparsable);
        }
    });

    const std::string rater = provider_name;
    const auto dir = std::filesystem::path("annotate") / provider_name /
                     std::string(to_string(style));

    std::vector<DirectionalJudgment> judgments;
    std::size_t unresolved = 0;
    int unparsable_responses = 0;
    std::ofstream finals;
    std::vector<std::string> outputs;

    if (orders == AnnotateOrders::both) {
        const auto finals_path = config_.workdir / dir / "finals.jsonl";
        std::filesystem::create_directories(finals_path.parent_path());
        finals.open(finals_path, std::ios::binary);
        if (!finals) raise(ErrorCode::io_failure, "cannot write " + finals_path.string());
    }

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto pair_id = make_pair_id(pairs[i].claim_id, pairs[i].post_id);
        if (orders == AnnotateOrders::both) {
            const auto& a = results[i].annotation;
            judgments.push_back({pair_id, PresentationOrder::post_first, rater, a.post_first});
            judgments.push_back({pair_id, PresentationOrder::claim_first, rater, a.claim_first});
            unparsable_responses += a.unparsable_responses;
            if (!a.final_label) ++unresolved;
            ordered_json j;
            j["pair_id"] = pair_id;
            j["post_first"] = label_or(a.post_first, "UNPARSABLE");
            j["claim_first"] = label_or(a.claim_first, "UNPARSABLE");
            j["final"] = label_or(a.final_label, "UNRESOLVED");
            finals << j.dump() << '\n';
        } else {
            const auto order = orders == AnnotateOrders::post_first_only
                                   ? PresentationOrder::post_first
                                   : PresentationOrder::claim_first;
            judgments.push_back({pair_id, order, rater, results[i].single_order});
            unparsable_responses += results[i].unparsable;
        }
    }

    save_judgments(judgments, config_.workdir / dir / "judgments.jsonl");
    outputs.push_back((dir / "judgments.jsonl").string());
    if (orders == AnnotateOrders::both) {
        finals.close();
        outputs.push_back((dir / "finals.jsonl").string());
    }

    // Sorted by digest so the audit log is byte-stable however threads raced.
    std::sort(log_entries.begin(), log_entries.end(),
              [](const CompletionLogEntry& a, const CompletionLogEntry& b) {
                  return std::tie(a.prompt_sha256, a.response_sha256) <
                         std::tie(b.prompt_sha256, b.response_sha256);
              });
    std::ostringstream log;
    for (const auto& entry : log_entries) {
        ordered_json j;
        j["prompt_sha256"] = entry.prompt_sha256;
        j["model"] = entry.model;
        j["temperature"] = entry.temperature;
        j["response_sha256"] = entry.response_sha256;
        log << j.dump() << '\n';
    }
    write_text_file(config_.workdir / dir / "completions.jsonl", log.str());
    outputs.push_back((dir / "completions.jsonl").string());

    ordered_json summary;
    summary["provider"] = provider_name;
    summary["model"] = client.spec().model_name;
    summary["style"] = std::string(to_string(style));
    summary["pairs"] = pairs.size();
    summary["unresolved"] = unresolved;
    summary["unparsable_responses"] = unparsable_responses;
    write_json_file(config_.workdir / dir / "summary.json", summary);
    outputs.push_back((dir / "summary.json").string());

    record_stage("annotate/" + provider_name + "/" + std::string(to_string(style)), outputs);
}

void PipelineRunner::run_annotate_conditions() {
    std::vector<Condition> conditions = config_.conditions;
    if (conditions.empty()) {
        for (const auto& provider : config_.annotation_providers)
            conditions.push_back({provider, PromptStyle::annotation_only});
    }
    if (conditions.empty())
        raise(ErrorCode::config_invalid, "no annotation conditions configured");
    for (const auto& condition : conditions)
        run_annotate(condition.provider, condition.style, AnnotateOrders::both);
}

void PipelineRunner::run_gen() {
    const auto claims = load_claims(require("ingest/claims.jsonl", "ingest"));
    if (config_.generation_providers.empty())
        raise(ErrorCode::config_invalid, "no generation providers configured");

    std::vector<std::string> outputs;
    for (const auto& name : config_.generation_providers) {
        auto client = make_chat_client(name);
        const auto [corpus, report] = build_corpus(
            claims, {{name, &client}}, CallOptions{}, TemplateSet::builtin(),
            client.spec().parallelism);

        const auto dir = std::filesystem::path("gen") / name;
        save_corpus(corpus, config_.workdir / dir / "corpus.jsonl");
        ordered_json rj;
        rj["provider"] = name;
        rj["planned"] = report.planned;
        rj["generated"] = report.generated;
        rj["failed"] = report.failed;
        rj["deduplicated"] = report.deduplicated;
        auto failures = ordered_json::array();
        for (const auto& f : report.failures) {
            failures.push_back({{"claim_id", f.task.claim_id},
                                {"target", std::string(to_string(f.task.target))},
                                {"order", std::string(to_string(f.task.order))},
                                {"reason", f.reason}});
        }
        rj["failures"] = std::move(failures);
        write_json_file(config_.workdir / dir / "report.json", rj);
        outputs.push_back((dir / "corpus.jsonl").string());
        outputs.push_back((dir / "report.json").string());
    }
    record_stage("gen", outputs);
}

void PipelineRunner::run_export(std::optional<MixChoice> mix_override) {
    const auto claims = load_claims(require("ingest/claims.jsonl", "ingest"));
    const auto claim_text = make_claim_lookup(claims);
    const MixChoice mix = mix_override.value_or(config_.mix);

    if (config_.generation_providers.empty())
        raise(ErrorCode::config_invalid, "no generation providers configured");

    std::vector<std::string> outputs;
    for (const auto& name : config_.generation_providers) {
        const auto corpus = load_corpus(
            require(std::filesystem::path("gen") / name / "corpus.jsonl", "gen"));
        const auto mix_spec = mix.resolve(corpus.size());
        const auto sampled = sample_mix(corpus, mix_spec, config_.base_seed);
        const auto records = make_train_records(sampled, claim_text);
        const auto [train, val] =
            split_train_val(records, config_.train_fraction, config_.base_seed + 1);

        const auto dir = std::filesystem::path("export") / name / std::string(mix.name());
        export_train_file(train, config_.workdir / dir / "train.jsonl");
        export_train_file(val, config_.workdir / dir / "val.jsonl");

        ordered_json summary;
        summary["provider"] = name;
        summary["mix"] = std::string(mix.name());
        summary["corpus_size"] = corpus.size();
        summary["sampled"] = sampled.size();
        summary["train"] = train.size();
        summary["val"] = val.size();
        const auto counts = mix_counts(mix_spec);
        ordered_json counts_json;
        for (const auto label : kAllLabels)
            counts_json[std::string(to_string(label))] =
                counts[static_cast<std::size_t>(label)];
        summary["label_counts"] = std::move(counts_json);
        write_json_file(config_.workdir / dir / "summary.json", summary);

        outputs.push_back((dir / "train.jsonl").string());
        outputs.push_back((dir / "val.jsonl").string());
        outputs.push_back((dir / "summary.json").string());
    }
    record_stage("export/" + std::string(mix.name()), outputs);
}

void PipelineRunner::run_eval() {
    if (config_.judgments_path.empty())
        raise(ErrorCode::config_invalid, "eval requires paths.judgments in the config");
    if (!std::filesystem::exists(config_.judgments_path))
        raise(ErrorCode::missing_input, "judgments file " + config_.judgments_path.string());
    manifest_.inputs["judgments"] = sha256_file(config_.judgments_path);
    const auto votes = load_judgments(config_.judgments_path);

    const auto annotate_root = config_.workdir / "annotate";
    if (!std::filesystem::exists(annotate_root))
        raise(ErrorCode::missing_input, annotate_root.string() + " is missing; run 'annotate' first");

    struct Found {
        std::string provider;
        std::string style;
        std::filesystem::path finals;
    };
    std::vector<Found> found;
    for (const auto& provider_dir : std::filesystem::directory_iterator(annotate_root)) {
        if (!provider_dir.is_directory()) continue;
        for (const auto& style_dir : std::filesystem::directory_iterator(provider_dir)) {
            const auto finals = style_dir.path() / "finals.jsonl";
            if (std::filesystem::exists(finals)) {
                found.push_back({provider_dir.path().filename().string(),
                                 style_dir.path().filename().string(), finals});
            }
        }
    }
    if (found.empty())
        raise(ErrorCode::missing_input, "no finals.jsonl under " + annotate_root.string());
    std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
        return std::tie(a.provider, a.style) < std::tie(b.provider, b.style);
    });

    std::vector<std::string> outputs;
    std::vector<EvalRow> rows;
    for (const auto& condition : found) {
        std::map<std::string, std::optional<EntailmentLabel>> preds;
        std::ifstream in(condition.finals, std::ios::binary);
        if (!in) raise(ErrorCode::io_failure, "cannot read " + condition.finals.string());
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded())
                raise(ErrorCode::io_failure, "malformed finals line in " +
                                                 condition.finals.string());
            const std::string final = j.at("final").get<std::string>();
            if (final == "UNRESOLVED") {
                preds[j.at("pair_id").get<std::string>()] = std::nullopt;
            } else {
                const auto label = label_from_string(final);
                if (!label)
                    raise(ErrorCode::io_failure, "bad final label '" + final + "' in " +
                                                     condition.finals.string());
                preds[j.at("pair_id").get<std::string>()] = label;
            }
        }

        const auto report = monte_carlo_evaluate(votes, preds, config_.n_draws,
                                                 config_.base_seed, config_.unresolved_policy);

        const auto dir = std::filesystem::path("eval") / condition.provider / condition.style;
        ordered_json rj;
        rj["provider"] = condition.provider;
        rj["style"] = condition.style;
        rj["n_draws"] = report.n_draws;
        rj["excluded_pairs"] = report.excluded_pairs;
        rj["macro_precision"] = {{"mean", report.macro_precision_mean},
                                 {"std", report.macro_precision_std}};
        rj["macro_recall"] = {{"mean", report.macro_recall_mean},
                              {"std", report.macro_recall_std}};
        rj["accuracy"] = {{"mean", report.accuracy_mean}, {"std", report.accuracy_std}};
        ordered_json per_class;
        for (const auto label : kAllLabels) {
            const auto i = static_cast<std::size_t>(label);
            per_class[std::string(to_string(label))] = {
                {"precision", report.per_class[i].precision_mean},
                {"recall", report.per_class[i].recall_mean},
                {"support", report.per_class[i].support_mean}};
        }
        rj["per_class"] = std::move(per_class);
        write_json_file(config_.workdir / dir / "report.json", rj);
        outputs.push_back((dir / "report.json").string());

        rows.push_back({condition.provider, condition.style, report});
    }

    write_text_file(config_.workdir / "eval/summary.txt", format_eval_table(rows));
    outputs.push_back("eval/summary.txt");

    // Ground-truth label distribution across tie-break realizations,
    // reported to one decimal place in mean counts.
    const auto realizations = realize_labels(votes, config_.n_draws, config_.base_seed);
    const auto dist = class_distribution(realizations);
    ordered_json dj;
    dj["total_pairs"] = dist.total_pairs;
    dj["n_draws"] = config_.n_draws;
    for (const auto label : kAllLabels) {
        const auto i = static_cast<std::size_t>(label);
        dj[std::string(to_string(label))] = {
            {"mean_count", std::round(dist.per_label[i].mean_count * 10.0) / 10.0},
            {"mean_percentage", std::round(dist.per_label[i].mean_percentage * 10.0) / 10.0}};
    }
    write_json_file(config_.workdir / "eval/class_distribution.json", dj);
    outputs.push_back("eval/class_distribution.json");

    record_stage("eval", outputs);
}

} // namespace factgpt
