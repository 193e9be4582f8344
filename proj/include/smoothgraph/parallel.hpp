#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smoothgraph {

// Number of worker threads: an explicit request wins, then the
// SMOOTHGRAPH_THREADS environment variable, then the OpenMP default.
int resolve_threads(int requested);

// Caps OpenMP workers for the whole process.
void set_threads(int threads);

int current_max_threads();

template <class F>
void par_for(int64_t count, F&& body) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < count; ++i) body(i);
}

// All floating-point reductions go through fixed-size chunks: each chunk is
// accumulated serially in index order and the partials are combined serially
// in chunk order, so the result is bit-identical for any thread count.
inline constexpr int64_t kReduceChunk = 4096;

template <class F>
double chunked_sum(int64_t count, F&& term) {
    if (count <= 0) return 0.0;
    const int64_t nchunks = (count + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < nchunks; ++c) {
        const int64_t lo = c * kReduceChunk;
        const int64_t hi = lo + kReduceChunk < count ? lo + kReduceChunk : count;
        double acc = 0.0;
        for (int64_t i = lo; i < hi; ++i) acc += term(i);
        partial[c] = acc;
    }
    double total = 0.0;
    for (int64_t c = 0; c < nchunks; ++c) total += partial[c];
    return total;
}

template <class F>
double chunked_max(int64_t count, F&& term) {
    if (count <= 0) return 0.0;
    const int64_t nchunks = (count + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < nchunks; ++c) {
        const int64_t lo = c * kReduceChunk;
        const int64_t hi = lo + kReduceChunk < count ? lo + kReduceChunk : count;
        double best = 0.0;
        for (int64_t i = lo; i < hi; ++i) {
            const double v = term(i);
            if (v > best) best = v;
        }
        partial[c] = best;
    }
    double total = 0.0;
    for (int64_t c = 0; c < nchunks; ++c)
        if (partial[c] > total) total = partial[c];
    return total;
}

// SplitMix64: tiny deterministic generator used wherever seeded randomness is
// needed; machine-independent by construction.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound).
    uint64_t next_below(uint64_t bound) { return next() % bound; }
};

}  // namespace smoothgraph
