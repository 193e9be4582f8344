#include "smoothgraph/reference.hpp"

#include <algorithm>
#include <cmath>

#include "smoothgraph/parallel.hpp"

namespace smoothgraph::reference {

double chunked_sum(const std::vector<double>& values) {
    const int64_t count = static_cast<int64_t>(values.size());
    if (count <= 0) return 0.0;
    const int64_t nchunks = (count + kReduceChunk - 1) / kReduceChunk;
    double total = 0.0;
    for (int64_t c = 0; c < nchunks; ++c) {
        const int64_t lo = c * kReduceChunk;
        const int64_t hi = std::min(lo + kReduceChunk, count);
        double acc = 0.0;
        for (int64_t i = lo; i < hi; ++i) acc += values[i];
        total += acc;
    }
    return total;
}

void degree_apply(const DegreeOperator& S, const std::vector<double>& w,
                  std::vector<double>& out) {
    out.resize(S.n);
    for (int64_t i = 0; i < S.n; ++i) {
        double acc = 0.0;
        for (int64_t p = S.offsets[i]; p < S.offsets[i + 1]; ++p) acc += w[S.incident[p]];
        out[i] = acc;
    }
}

void degree_adjoint(const DegreeOperator& S, const std::vector<double>& v,
                    std::vector<double>& out) {
    const int64_t m = S.edge_count();
    out.resize(m);
    for (int64_t e = 0; e < m; ++e) out[e] = v[S.ei[e]] + v[S.ej[e]];
}

std::vector<double> pairwise_sq_dists(const FeatureMatrix& X,
                                      const std::vector<int64_t>& ei,
                                      const std::vector<int64_t>& ej) {
    const int64_t m = static_cast<int64_t>(ei.size());
    std::vector<double> out(m);
    for (int64_t e = 0; e < m; ++e) {
        const double* a = X.row(ei[e]);
        const double* b = X.row(ej[e]);
        double acc = 0.0;
        for (int64_t c = 0; c < X.d; ++c) {
            const double diff = a[c] - b[c];
            acc += diff * diff;
        }
        out[e] = acc;
    }
    return out;
}

double dirichlet_energy(const FeatureMatrix& X, const SparseWeightedGraph& W) {
    const int64_t m = W.edge_count();
    std::vector<double> terms(m);
    for (int64_t e = 0; e < m; ++e) {
        const double* a = X.row(W.ei[e]);
        const double* b = X.row(W.ej[e]);
        double acc = 0.0;
        for (int64_t c = 0; c < X.d; ++c) {
            const double diff = a[c] - b[c];
            acc += diff * diff;
        }
        terms[e] = W.w[e] * acc;
    }
    return chunked_sum(terms);
}

NeighborLists knn_exact(const FeatureMatrix& X, int64_t m) {
    const int64_t n = X.n;
    if (m < 1 || m > n - 1) throw std::invalid_argument("neighbor count out of range");
    NeighborLists nl;
    nl.n = n;
    nl.m = m;
    nl.ids.resize(n * m);
    nl.dist.resize(n * m);
    std::vector<std::pair<double, int64_t>> cand(n - 1);
    for (int64_t i = 0; i < n; ++i) {
        int64_t pos = 0;
        for (int64_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* a = X.row(i);
            const double* b = X.row(j);
            double acc = 0.0;
            for (int64_t c = 0; c < X.d; ++c) {
                const double diff = a[c] - b[c];
                acc += diff * diff;
            }
            cand[pos++] = {acc, j};
        }
        std::partial_sort(cand.begin(), cand.begin() + m, cand.end());
        for (int64_t s = 0; s < m; ++s) {
            nl.ids[i * m + s] = cand[s].second;
            nl.dist[i * m + s] = cand[s].first;
        }
    }
    return nl;
}

}  // namespace smoothgraph::reference
