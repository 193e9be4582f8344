// Times the OpenMP kernels against their single-threaded reference twins and
// checks that both produce bit-identical output. Exit code 0 only if every
// kernel matches. Pass --quick for the small sizes used in CI.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "smoothgraph/core.hpp"
#include "smoothgraph/neighbors.hpp"
#include "smoothgraph/parallel.hpp"
#include "smoothgraph/reference.hpp"

using namespace smoothgraph;

namespace {

double normal(SplitMix64& rng) {
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586 * u2);
}

template <typename F>
double time_median(int reps, F&& fn) {
    std::vector<double> samples;
    fn();  // warm-up, also materializes the result for the identity check
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

bool report(const char* kernel, const char* size, double t_serial, double t_parallel,
            bool identical) {
    std::printf("%-18s %-14s %10.3f ms %10.3f ms %7.2fx   %s\n", kernel, size,
                t_serial * 1e3, t_parallel * 1e3, t_serial / t_parallel,
                identical ? "identical" : "MISMATCH");
    return identical;
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--quick") quick = true;

    const int64_t n_nodes = quick ? 2000 : 50000;
    const int64_t d = quick ? 16 : 32;
    const int64_t per_node = quick ? 20 : 30;
    const int64_t knn_n = quick ? 800 : 4000;
    const int64_t knn_m = quick ? 8 : 10;
    const int reps = quick ? 5 : 7;

    SplitMix64 rng(42);
    FeatureMatrix X;
    X.n = n_nodes;
    X.d = d;
    X.data.resize(n_nodes * d);
    for (double& v : X.data) v = normal(rng);

    std::vector<std::pair<int64_t, int64_t>> pairs;
    pairs.reserve(n_nodes * per_node);
    for (int64_t i = 0; i < n_nodes; ++i)
        for (int64_t t = 0; t < per_node; ++t) {
            const int64_t j = static_cast<int64_t>(rng.next_below(n_nodes));
            if (j != i) pairs.emplace_back(std::min(i, j), std::max(i, j));
        }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<int64_t> ei, ej;
    for (const auto& [i, j] : pairs) {
        ei.push_back(i);
        ej.push_back(j);
    }
    const int64_t m_edges = static_cast<int64_t>(ei.size());
    const DegreeOperator S = build_degree_operator(n_nodes, ei, ej);

    std::vector<double> w(m_edges);
    for (double& v : w) v = rng.next_double();
    std::vector<double> node_vals(n_nodes);
    for (double& v : node_vals) v = normal(rng);

    char edge_size[32], node_size[32], knn_size[32];
    std::snprintf(edge_size, sizeof(edge_size), "%lld edges", static_cast<long long>(m_edges));
    std::snprintf(node_size, sizeof(node_size), "%lldx%lld", static_cast<long long>(n_nodes),
                  static_cast<long long>(d));
    std::snprintf(knn_size, sizeof(knn_size), "%lld pts m=%lld", static_cast<long long>(knn_n),
                  static_cast<long long>(knn_m));

    std::printf("threads: %d\n", current_max_threads());
    std::printf("%-18s %-14s %13s %13s %9s   %s\n", "kernel", "size", "serial", "parallel",
                "speedup", "check");

    bool all_ok = true;

    {
        std::vector<double> out_s, out_p;
        const double ts = time_median(reps, [&] { reference::degree_apply(S, w, out_s); });
        const double tp = time_median(reps, [&] { degree_apply(S, w, out_p); });
        all_ok &= report("degree_apply", edge_size, ts, tp, out_s == out_p);
    }
    {
        std::vector<double> out_s, out_p;
        const double ts = time_median(reps, [&] { reference::degree_adjoint(S, node_vals, out_s); });
        const double tp = time_median(reps, [&] { degree_adjoint(S, node_vals, out_p); });
        all_ok &= report("degree_adjoint", edge_size, ts, tp, out_s == out_p);
    }
    {
        std::vector<double> out_s, out_p;
        const double ts = time_median(reps, [&] { out_s = reference::pairwise_sq_dists(X, ei, ej); });
        const double tp = time_median(reps, [&] { out_p = pairwise_sq_dists(X, ei, ej); });
        all_ok &= report("pairwise_sq_dists", edge_size, ts, tp, out_s == out_p);
    }
    {
        SparseWeightedGraph W;
        W.n = n_nodes;
        W.ei = ei;
        W.ej = ej;
        W.w = w;
        double out_s = 0.0, out_p = 0.0;
        const double ts = time_median(reps, [&] { out_s = reference::dirichlet_energy(X, W); });
        const double tp = time_median(reps, [&] { out_p = dirichlet_energy(X, W); });
        all_ok &= report("dirichlet_energy", edge_size, ts, tp, out_s == out_p);
    }
    {
        double out_s = 0.0, out_p = 0.0;
        const double ts = time_median(reps, [&] { out_s = reference::chunked_sum(X.data); });
        const double tp = time_median(reps, [&] {
            out_p = chunked_sum(static_cast<int64_t>(X.data.size()),
                                [&](int64_t i) { return X.data[i]; });
        });
        all_ok &= report("chunked_sum", node_size, ts, tp, out_s == out_p);
    }
    {
        FeatureMatrix Xk;
        Xk.n = knn_n;
        Xk.d = d;
        Xk.data.assign(X.data.begin(), X.data.begin() + knn_n * d);
        NeighborLists out_s, out_p;
        const int knn_reps = quick ? 3 : 3;
        const double ts = time_median(knn_reps, [&] { out_s = reference::knn_exact(Xk, knn_m); });
        const double tp = time_median(knn_reps, [&] { out_p = knn_exact(Xk, knn_m); });
        all_ok &= report("knn_exact", knn_size, ts, tp,
                         out_s.ids == out_p.ids && out_s.dist == out_p.dist);
    }

    if (!all_ok) {
        std::fprintf(stderr, "kernel outputs differ between serial and parallel paths\n");
        return 1;
    }
    return 0;
}
