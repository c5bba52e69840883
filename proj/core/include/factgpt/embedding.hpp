#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace factgpt {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

enum class EmbeddingKind { remote, deterministic_local };

struct EmbeddingProviderSpec {
    EmbeddingKind kind = EmbeddingKind::deterministic_local;
    std::string endpoint;      // required for remote
    std::string model_name;
    std::size_t dim = 384;
    std::string api_key_env;   // environment variable holding the bearer token
    int max_retries = 3;
    int timeout_ms = 30000;
    int backoff_ms = 500;      // doubled per retry
    std::size_t batch_size = 64;
    int parallelism = 1;       // concurrent batch requests (remote only)
};

/// (u . v) / (|u| |v|). Throws DimensionMismatch on unequal lengths and
/// ZeroVector when either norm is zero.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

/// Sentence-embedding access. The deterministic-local provider hashes the
/// token bag into `dim` buckets with signed hashing and L2-normalizes, making
/// it a pure function of the text bytes; it exists so the full pipeline runs
/// offline. The remote provider POSTs {model_name, texts} and expects
/// {vectors: [[...], ...]}, retrying transient failures with exponential
/// backoff.
class EmbeddingClient {
public:
    explicit EmbeddingClient(EmbeddingProviderSpec spec);

    /// Throws EmptyText for empty input, DimensionMismatch if the provider
    /// returns a wrong-size vector, ProviderUnavailable after retries.
    EmbeddingVector embed(const std::string& text) const;

    /// Batches remote requests in chunks of spec.batch_size, issuing up to
    /// spec.parallelism chunk requests concurrently. Output order matches
    /// input order.
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;

    const EmbeddingProviderSpec& spec() const { return spec_; }

private:
    EmbeddingVector embed_local(const std::string& text) const;
    std::vector<EmbeddingVector> embed_remote_chunk(const std::vector<std::string>& texts) const;

    EmbeddingProviderSpec spec_;
};

} // namespace factgpt
