#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "factgpt/bm25.hpp"
#include "factgpt/chat.hpp"
#include "factgpt/embedding.hpp"
#include "factgpt/eval.hpp"
#include "factgpt/ingest.hpp"
#include "factgpt/labels.hpp"
#include "factgpt/synth.hpp"

namespace factgpt {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// A provider entry from the config file: either a chat endpoint/mock or an
/// embedding endpoint/local hasher.
struct ProviderConfig {
    enum class Type { chat, embedding };
    Type type = Type::chat;
    ChatProviderSpec chat;
    EmbeddingProviderSpec embedding;
};

/// One (provider, style) cell of the annotation condition matrix.
struct Condition {
    std::string provider;
    PromptStyle style = PromptStyle::annotation_only;
};

enum class MixPreset { balanced, imbalanced, custom };

struct MixChoice {
    MixPreset preset = MixPreset::balanced;
    std::array<double, 3> fractions{};  // custom only
    std::size_t total = 0;              // 0: use the corpus size

    /// Resolves to a concrete MixSpec for a corpus of the given size.
    MixSpec resolve(std::size_t corpus_size) const;
    std::string_view name() const;
};

/// Everything a run needs. Defaults carry the reference values: +/-14-day
/// window, top 1000 candidates, 1 pair per claim, 1000 tie-break draws,
/// k1 = 1.2, b = 0.75, 80/20 split.
struct RunConfig {
    std::filesystem::path config_dir;  // directory the config file lives in

    std::filesystem::path claims_path;
    std::filesystem::path posts_path;
    std::filesystem::path judgments_path;  // optional until eval
    std::filesystem::path workdir = "workdir";

    Bm25Config bm25;
    int window_days = 14;
    int top_k = 1000;
    int per_claim = 1;
    int n_draws = 1000;
    std::uint64_t base_seed = 1;
    double train_fraction = 0.8;
    std::set<std::string> rating_allowlist = default_rating_allowlist();
    MixChoice mix;
    UnresolvedPolicy unresolved_policy = UnresolvedPolicy::exclude;

    std::string embedding_provider;
    std::vector<std::string> annotation_providers;
    std::vector<std::string> generation_providers;
    std::vector<Condition> conditions;
    std::map<std::string, ProviderConfig> providers;

    /// Parses a JSON config file. Relative paths resolve against the config
    /// file's directory. Throws ConfigInvalid on structural problems.
    static RunConfig load(const std::filesystem::path& path);

    /// Validates cross-references (provider names, ranges). Throws
    /// ConfigInvalid.
    void validate() const;

    /// SHA-256 over the canonical serialization of the effective config,
    /// including defaults and CLI overrides.
    std::string digest() const;
};

/// Per-run provenance, stored at <workdir>/manifest.json: the config digest,
/// input file digests, and each completed stage's output digests. Re-running
/// a stage with identical inputs, config and mock providers reproduces
/// identical digests (timestamps are recorded but excluded from that
/// guarantee).
struct RunManifest {
    std::string tool_version;
    std::string config_sha256;
    std::map<std::string, std::string> inputs;  // logical name -> sha256
    struct Stage {
        std::string completed_at;                    // ISO-8601 UTC
        std::map<std::string, std::string> outputs;  // workdir-relative -> sha256
    };
    std::map<std::string, Stage> stages;

    static RunManifest load_or_create(const std::filesystem::path& workdir,
                                      const std::string& config_digest);
    void save(const std::filesystem::path& workdir) const;
};

enum class AnnotateOrders { both, post_first_only, claim_first_only };

/// Stage orchestration over one working directory. Each stage reads its
/// prerequisites from the workdir (MissingInput when absent), writes its
/// outputs and updates the manifest. All stage outputs are deterministic
/// given the config, inputs and mock/local providers.
class PipelineRunner {
public:
    explicit PipelineRunner(RunConfig config);

    void run_ingest();
    void run_index();
    void run_pair(const std::string& provider_override = "");

    /// Annotates every selected pair with one model under one prompt style.
    /// With AnnotateOrders::both the bidirectional rule produces finals;
    /// single-order runs record judgments only.
    void run_annotate(const std::string& provider, PromptStyle style,
                      AnnotateOrders orders = AnnotateOrders::both);

    /// Sweeps the config's condition matrix (falling back to
    /// annotation_providers x annotation-only when none is given).
    void run_annotate_conditions();

    void run_gen();
    void run_export(std::optional<MixChoice> mix_override = std::nullopt);
    void run_eval();

    const RunConfig& config() const { return config_; }
    std::filesystem::path workdir() const { return config_.workdir; }

private:
    ChatClient make_chat_client(const std::string& name) const;
    EmbeddingClient make_embedding_client(const std::string& name) const;
    const ProviderConfig& provider(const std::string& name, ProviderConfig::Type type) const;
    std::filesystem::path require(const std::filesystem::path& relative,
                                  const std::string& produced_by) const;
    void record_stage(const std::string& stage, const std::vector<std::string>& outputs);

    RunConfig config_;
    RunManifest manifest_;
};

} // namespace factgpt
