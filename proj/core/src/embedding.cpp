#include "factgpt/embedding.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "factgpt/digest.hpp"
#include "factgpt/errors.hpp"
#include "factgpt/text.hpp"
#include "factgpt/tokenize.hpp"
#include "http_client.hpp"
#include "parallel.hpp"

namespace factgpt {

using nlohmann::json;

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim())
        raise(ErrorCode::dimension_mismatch,
              "cosine over dims " + std::to_string(u.dim()) + " and " + std::to_string(v.dim()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) raise(ErrorCode::zero_vector, "cosine of a zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

EmbeddingClient::EmbeddingClient(EmbeddingProviderSpec spec) : spec_(std::move(spec)) {
    if (spec_.dim == 0) raise(ErrorCode::config_invalid, "embedding dim must be positive");
    if (spec_.kind == EmbeddingKind::remote && spec_.endpoint.empty())
        raise(ErrorCode::config_invalid, "remote embedding provider requires an endpoint");
}

EmbeddingVector EmbeddingClient::embed(const std::string& text) const {
    return embed_batch({text}).front();
}

EmbeddingVector EmbeddingClient::embed_local(const std::string& text) const {
    EmbeddingVector v;
    v.values.assign(spec_.dim, 0.0);
    for (const auto& token : tokenize(text)) {
        const std::uint64_t h = fnv1a64(token);
        const std::size_t bucket = static_cast<std::size_t>(h % spec_.dim);
        v.values[bucket] += (h & 0x8000000000000000ull) ? -1.0 : 1.0;
    }
    double norm_sq = 0.0;
    for (const double x : v.values) norm_sq += x * x;
    if (norm_sq == 0.0) {
        // Tokens cancelled (or text tokenized to nothing): fall back to a
        // single deterministic bucket so the vector stays usable.
        v.values[static_cast<std::size_t>(fnv1a64(text) % spec_.dim)] = 1.0;
        norm_sq = 1.0;
    }
    const double norm = std::sqrt(norm_sq);
    for (double& x : v.values) x /= norm;
    return v;
}

std::vector<EmbeddingVector> EmbeddingClient::embed_remote_chunk(
    const std::vector<std::string>& texts) const {
    json request;
    request["model_name"] = spec_.model_name;
    request["texts"] = texts;
    const std::string body = request.dump();

    std::string token;
    if (!spec_.api_key_env.empty()) {
        if (const char* value = std::getenv(spec_.api_key_env.c_str())) token = value;
    }

    detail::HttpResponse response;
    const int attempts = 1 + std::max(0, spec_.max_retries);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(
                static_cast<long long>(spec_.backoff_ms) << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        response = detail::post_json(spec_.endpoint, body, token, spec_.timeout_ms);
        if (response.status == 200) break;
        const bool transient = response.status == 0 || response.status == 408 ||
                               response.status == 429 || response.status >= 500;
        if (!transient) break;
    }
    if (response.status != 200) {
        const std::string detail = response.status == 0
                                       ? response.error
                                       : "HTTP " + std::to_string(response.status);
        if (response.status == 0 && response.timed_out)
            raise(ErrorCode::timeout, "embedding endpoint timed out: " + detail);
        raise(ErrorCode::provider_unavailable, "embedding endpoint failed: " + detail);
    }

    json parsed = json::parse(response.body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("vectors") || !parsed["vectors"].is_array())
        raise(ErrorCode::provider_unavailable, "embedding response is not {vectors: [...]}");
    const auto& vectors = parsed["vectors"];
    if (vectors.size() != texts.size())
        raise(ErrorCode::provider_unavailable,
              "embedding response count " + std::to_string(vectors.size()) + " != request count " +
                  std::to_string(texts.size()));

    std::vector<EmbeddingVector> out;
    out.reserve(vectors.size());
    for (const auto& row : vectors) {
        EmbeddingVector v;
        v.values = row.get<std::vector<double>>();
        if (v.dim() != spec_.dim)
            raise(ErrorCode::dimension_mismatch,
                  "provider returned dim " + std::to_string(v.dim()) + ", expected " +
                      std::to_string(spec_.dim));
        for (const double x : v.values) {
            if (!std::isfinite(x))
                raise(ErrorCode::provider_unavailable, "embedding contains a non-finite value");
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> EmbeddingClient::embed_batch(
    const std::vector<std::string>& texts) const {
    for (const auto& text : texts) {
        if (trim(text).empty()) raise(ErrorCode::empty_text, "cannot embed empty text");
    }
    std::vector<EmbeddingVector> out(texts.size());
    if (spec_.kind == EmbeddingKind::deterministic_local) {
        for (std::size_t i = 0; i < texts.size(); ++i) out[i] = embed_local(texts[i]);
        return out;
    }

    const std::size_t chunk = std::max<std::size_t>(1, spec_.batch_size);
    const std::size_t n_chunks = (texts.size() + chunk - 1) / chunk;
    detail::parallel_for(n_chunks, spec_.parallelism, [&](std::size_t c) {
        const std::size_t begin = c * chunk;
        const std::size_t end = std::min(texts.size(), begin + chunk);
        const std::vector<std::string> slice(texts.begin() + begin, texts.begin() + end);
        auto vectors = embed_remote_chunk(slice);
        for (std::size_t i = 0; i < vectors.size(); ++i) out[begin + i] = std::move(vectors[i]);
    });
    return out;
}

} // namespace factgpt
