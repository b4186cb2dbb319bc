#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace tvme {

/// SplitMix64 mixing step. Used to derive independent RNG streams from a
/// single user-facing seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream-splitting rule: replicate k of a run seeded with `base` draws from
/// mt19937_64 seeded with stream_seed(base, k). Results are therefore
/// independent of execution order and of the number of worker threads.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) + stream);
}

/// Named generator used throughout the library.
using Rng = std::mt19937_64;

inline Rng make_stream_rng(std::uint64_t base, std::uint64_t stream) {
    return Rng(stream_seed(base, stream));
}

/// Worker-thread cap: TVAR_THREADS env var if set, else hardware concurrency.
inline unsigned max_threads() {
    if (const char* env = std::getenv("TVAR_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n). Iterations must be independent; callers store
/// results by index so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned nt = std::min<std::size_t>(max_threads(), n == 0 ? 1 : n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nt);
    for (unsigned w = 0; w < nt; ++w) {
        workers.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += nt) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace tvme
