#include "smoothgraph/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "smoothgraph/core.hpp"
#include "smoothgraph/parallel.hpp"

namespace smoothgraph {

namespace {

double sq_dist(const FeatureMatrix& X, int64_t a, int64_t b) {
    const double* pa = X.row(a);
    const double* pb = X.row(b);
    double acc = 0.0;
    for (int64_t c = 0; c < X.d; ++c) {
        const double diff = pa[c] - pb[c];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

NeighborLists knn_exact(const FeatureMatrix& X, int64_t m) {
    validate_features(X);
    const int64_t n = X.n;
    if (m < 1 || m > n - 1) throw std::invalid_argument("neighbor count out of range");
    NeighborLists nl;
    nl.n = n;
    nl.m = m;
    nl.ids.resize(n * m);
    nl.dist.resize(n * m);
    par_for(n, [&](int64_t i) {
        std::vector<std::pair<double, int64_t>> cand;
        cand.reserve(n - 1);
        for (int64_t j = 0; j < n; ++j)
            if (j != i) cand.emplace_back(sq_dist(X, i, j), j);
        std::partial_sort(cand.begin(), cand.begin() + m, cand.end());
        for (int64_t s = 0; s < m; ++s) {
            nl.ids[i * m + s] = cand[s].second;
            nl.dist[i * m + s] = cand[s].first;
        }
    });
    return nl;
}

namespace {

// One node's candidate pool: fixed capacity K, kept sorted by (dist, id).
struct Pool {
    int64_t* ids;
    double* dist;
    uint8_t* fresh;
    int64_t size;

    bool contains(int64_t id) const {
        for (int64_t s = 0; s < size; ++s)
            if (ids[s] == id) return true;
        return false;
    }

    double worst() const { return dist[size - 1]; }

    // Returns true if the candidate entered the pool.
    bool insert(double d, int64_t id) {
        if (d > worst() || (d == worst() && id >= ids[size - 1])) return false;
        if (contains(id)) return false;
        int64_t pos = size - 1;
        while (pos > 0 && (dist[pos - 1] > d || (dist[pos - 1] == d && ids[pos - 1] > id))) {
            ids[pos] = ids[pos - 1];
            dist[pos] = dist[pos - 1];
            fresh[pos] = fresh[pos - 1];
            --pos;
        }
        ids[pos] = id;
        dist[pos] = d;
        fresh[pos] = 1;
        return true;
    }
};

constexpr int64_t kJoinBlock = 1024;

void dedup_sorted(std::vector<int64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

NeighborLists knn_approx(const FeatureMatrix& X, int64_t m, const AnnParams& params) {
    validate_features(X);
    const int64_t n = X.n;
    if (m < 1 || m > n - 1) throw std::invalid_argument("neighbor count out of range");
    if (params.max_candidates < 1 || params.max_rounds < 1 || params.sample_rate <= 0.0 ||
        params.sample_rate > 1.0)
        throw std::invalid_argument("invalid A-NN parameters");

    const int64_t K = std::min(n - 1, std::max(m, params.max_candidates));
    const int64_t S = std::max<int64_t>(1, std::llround(params.sample_rate * static_cast<double>(K)));

    std::vector<int64_t> pool_ids(n * K);
    std::vector<double> pool_dist(n * K);
    std::vector<uint8_t> pool_fresh(n * K, 1);
    auto pool = [&](int64_t u) {
        return Pool{pool_ids.data() + u * K, pool_dist.data() + u * K, pool_fresh.data() + u * K, K};
    };

    par_for(n, [&](int64_t u) {
        SplitMix64 rng(params.seed ^ (static_cast<uint64_t>(u) + 1) * 0x9E3779B97F4A7C15ULL);
        std::vector<int64_t> chosen;
        chosen.reserve(K);
        while (static_cast<int64_t>(chosen.size()) < K) {
            int64_t c = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(n - 1)));
            if (c >= u) ++c;
            if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) chosen.push_back(c);
        }
        std::vector<std::pair<double, int64_t>> init(K);
        for (int64_t s = 0; s < K; ++s) init[s] = {sq_dist(X, u, chosen[s]), chosen[s]};
        std::sort(init.begin(), init.end());
        for (int64_t s = 0; s < K; ++s) {
            pool_ids[u * K + s] = init[s].second;
            pool_dist[u * K + s] = init[s].first;
        }
    });

    std::vector<std::vector<int64_t>> own_new(n), own_old(n), rev_new(n), rev_old(n);
    std::vector<std::vector<std::pair<int64_t, std::pair<double, int64_t>>>> emitted(kJoinBlock);

    for (int64_t round = 0; round < params.max_rounds; ++round) {
        par_for(n, [&](int64_t u) {
            own_new[u].clear();
            own_old[u].clear();
            auto P = pool(u);
            int64_t taken = 0;
            for (int64_t s = 0; s < K; ++s) {
                if (P.fresh[s] && taken < S) {
                    own_new[u].push_back(P.ids[s]);
                    P.fresh[s] = 0;
                    ++taken;
                } else if (!P.fresh[s]) {
                    own_old[u].push_back(P.ids[s]);
                }
            }
        });
        for (int64_t u = 0; u < n; ++u) {
            rev_new[u].clear();
            rev_old[u].clear();
        }
        for (int64_t u = 0; u < n; ++u) {
            for (int64_t t : own_new[u])
                if (static_cast<int64_t>(rev_new[t].size()) < S) rev_new[t].push_back(u);
            for (int64_t t : own_old[u])
                if (static_cast<int64_t>(rev_old[t].size()) < S) rev_old[t].push_back(u);
        }

        int64_t updates = 0;
        for (int64_t block = 0; block < n; block += kJoinBlock) {
            const int64_t bend = std::min(block + kJoinBlock, n);
            par_for(bend - block, [&](int64_t off) {
                const int64_t u = block + off;
                auto& out = emitted[off];
                out.clear();
                std::vector<int64_t> fresh_ids = own_new[u];
                fresh_ids.insert(fresh_ids.end(), rev_new[u].begin(), rev_new[u].end());
                dedup_sorted(fresh_ids);
                std::vector<int64_t> stale_ids = own_old[u];
                stale_ids.insert(stale_ids.end(), rev_old[u].begin(), rev_old[u].end());
                dedup_sorted(stale_ids);
                auto propose = [&](int64_t a, int64_t b, double d) {
                    if (d < pool(a).worst()) out.push_back({a, {d, b}});
                    if (d < pool(b).worst()) out.push_back({b, {d, a}});
                };
                for (size_t x = 0; x < fresh_ids.size(); ++x) {
                    for (size_t y = x + 1; y < fresh_ids.size(); ++y)
                        propose(fresh_ids[x], fresh_ids[y],
                                sq_dist(X, fresh_ids[x], fresh_ids[y]));
                    for (int64_t b : stale_ids)
                        if (b != fresh_ids[x]) propose(fresh_ids[x], b, sq_dist(X, fresh_ids[x], b));
                }
            });
            // Group proposals per target; block-serial order keeps this
            // independent of thread count.
            std::vector<int64_t> touched;
            std::vector<std::vector<std::pair<double, int64_t>>> bucket_store;
            {
                std::vector<std::pair<int64_t, std::pair<double, int64_t>>> flat;
                size_t total = 0;
                for (int64_t off = 0; off < bend - block; ++off) total += emitted[off].size();
                flat.reserve(total);
                for (int64_t off = 0; off < bend - block; ++off)
                    flat.insert(flat.end(), emitted[off].begin(), emitted[off].end());
                std::stable_sort(flat.begin(), flat.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
                for (size_t idx = 0; idx < flat.size(); ++idx) {
                    if (idx == 0 || flat[idx].first != flat[idx - 1].first) {
                        touched.push_back(flat[idx].first);
                        bucket_store.emplace_back();
                    }
                    bucket_store.back().push_back(flat[idx].second);
                }
            }
            std::vector<int64_t> per_target_updates(touched.size(), 0);
            par_for(static_cast<int64_t>(touched.size()), [&](int64_t ti) {
                auto& cand = bucket_store[ti];
                std::sort(cand.begin(), cand.end());
                cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
                auto P = pool(touched[ti]);
                int64_t ins = 0;
                for (const auto& [d, id] : cand) {
                    if (d > P.worst()) break;
                    if (id == touched[ti]) continue;
                    if (P.insert(d, id)) ++ins;
                }
                per_target_updates[ti] = ins;
            });
            for (int64_t c : per_target_updates) updates += c;
        }
        if (static_cast<double>(updates) < 0.001 * static_cast<double>(n) * static_cast<double>(K))
            break;
    }

    NeighborLists nl;
    nl.n = n;
    nl.m = m;
    nl.ids.resize(n * m);
    nl.dist.resize(n * m);
    par_for(n, [&](int64_t u) {
        for (int64_t s = 0; s < m; ++s) {
            nl.ids[u * m + s] = pool_ids[u * K + s];
            nl.dist[u * m + s] = pool_dist[u * K + s];
        }
    });
    return nl;
}

double mean_recall(const NeighborLists& approx, const NeighborLists& exact) {
    if (approx.n != exact.n || approx.m != exact.m)
        throw std::invalid_argument("neighbor lists are not comparable");
    const int64_t n = approx.n;
    const int64_t m = approx.m;
    return chunked_sum(n, [&](int64_t u) {
               int64_t hits = 0;
               for (int64_t a = 0; a < m; ++a)
                   for (int64_t b = 0; b < m; ++b)
                       if (approx.id(u, a) == exact.id(u, b)) {
                           ++hits;
                           break;
                       }
               return static_cast<double>(hits) / static_cast<double>(m);
           }) /
           static_cast<double>(n);
}

double estimate_recall(const FeatureMatrix& X, const NeighborLists& nl, int64_t sample_cap) {
    const int64_t n = nl.n;
    const int64_t m = nl.m;
    const int64_t samples = std::min(n, sample_cap);
    std::vector<double> recall(samples);
    par_for(samples, [&](int64_t s) {
        const int64_t u = s * n / samples;
        std::vector<std::pair<double, int64_t>> cand;
        cand.reserve(n - 1);
        for (int64_t j = 0; j < n; ++j)
            if (j != u) cand.emplace_back(sq_dist(X, u, j), j);
        std::partial_sort(cand.begin(), cand.begin() + m, cand.end());
        int64_t hits = 0;
        for (int64_t a = 0; a < m; ++a)
            for (int64_t b = 0; b < m; ++b)
                if (nl.id(u, a) == cand[b].second) {
                    ++hits;
                    break;
                }
        recall[s] = static_cast<double>(hits) / static_cast<double>(m);
    });
    return chunked_sum(samples, [&](int64_t s) { return recall[s]; }) /
           static_cast<double>(samples);
}

EdgeCandidateSet build_allowed_support(const NeighborLists& nl, int64_t k, int64_t r,
                                       const FeatureMatrix& X) {
    if (k < 1 || r < 1) throw std::invalid_argument("k and r must be positive");
    if (nl.m < k * r && nl.m < nl.n - 1)
        throw std::invalid_argument("neighbor lists shorter than k*r");
    if (nl.n != X.n) throw std::invalid_argument("neighbor lists and features disagree on n");
    const int64_t n = nl.n;
    const int64_t take = std::min(k * r, nl.m);
    struct Entry {
        int64_t i, j;
        double z;
        bool operator<(const Entry& o) const { return i < o.i || (i == o.i && j < o.j); }
    };
    std::vector<Entry> entries;
    entries.reserve(n * take);
    for (int64_t u = 0; u < n; ++u)
        for (int64_t s = 0; s < take; ++s) {
            const int64_t v = nl.id(u, s);
            entries.push_back({std::min(u, v), std::max(u, v), nl.d2(u, s)});
        }
    std::sort(entries.begin(), entries.end());
    EdgeCandidateSet E;
    E.n = n;
    for (size_t idx = 0; idx < entries.size(); ++idx) {
        if (idx > 0 && entries[idx].i == entries[idx - 1].i && entries[idx].j == entries[idx - 1].j)
            continue;
        E.ei.push_back(entries[idx].i);
        E.ej.push_back(entries[idx].j);
        E.z.push_back(entries[idx].z);
    }
    const auto degs = allowed_degrees(E);
    for (int64_t i = 0; i < n; ++i)
        if (degs[i] < 1) throw infeasible_error("node " + std::to_string(i) + " has no allowed edges");
    return E;
}

std::vector<int64_t> allowed_degrees(const EdgeCandidateSet& E) {
    std::vector<int64_t> deg(E.n, 0);
    for (int64_t e = 0; e < E.edge_count(); ++e) {
        ++deg[E.ei[e]];
        ++deg[E.ej[e]];
    }
    return deg;
}

}  // namespace smoothgraph
