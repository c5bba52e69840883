#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace factgpt {

/// Deterministic random source. Built on std::mt19937_64, whose output
/// sequence is fixed by the standard, with hand-rolled bounded draws so that
/// results are identical across platforms and standard libraries
/// (std::uniform_int_distribution is implementation-defined).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Unbiased draw from [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    /// Fisher-Yates shuffle, deterministic given the seed and input order.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace factgpt
