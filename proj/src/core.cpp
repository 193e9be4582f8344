#include "smoothgraph/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smoothgraph/parallel.hpp"

namespace smoothgraph {

DegreeOperator build_degree_operator(int64_t n, const std::vector<int64_t>& ei,
                                     const std::vector<int64_t>& ej) {
    if (ei.size() != ej.size()) throw std::invalid_argument("edge arrays differ in length");
    DegreeOperator S;
    S.n = n;
    S.ei = ei;
    S.ej = ej;
    const int64_t m = S.edge_count();
    std::vector<int64_t> counts(n, 0);
    for (int64_t e = 0; e < m; ++e) {
        if (ei[e] < 0 || ei[e] >= n || ej[e] < 0 || ej[e] >= n)
            throw std::invalid_argument("edge endpoint out of range");
        ++counts[ei[e]];
        ++counts[ej[e]];
    }
    S.offsets.assign(n + 1, 0);
    for (int64_t i = 0; i < n; ++i) S.offsets[i + 1] = S.offsets[i] + counts[i];
    S.incident.resize(S.offsets[n]);
    std::vector<int64_t> cursor(S.offsets.begin(), S.offsets.end() - 1);
    for (int64_t e = 0; e < m; ++e) {
        S.incident[cursor[ei[e]]++] = e;
        S.incident[cursor[ej[e]]++] = e;
    }
    return S;
}

DegreeOperator build_degree_operator(const EdgeCandidateSet& support) {
    return build_degree_operator(support.n, support.ei, support.ej);
}

void degree_apply(const DegreeOperator& S, const std::vector<double>& w,
                  std::vector<double>& out) {
    if (static_cast<int64_t>(w.size()) != S.edge_count())
        throw std::invalid_argument("weight vector length does not match edge count");
    out.resize(S.n);
    par_for(S.n, [&](int64_t i) {
        double acc = 0.0;
        for (int64_t p = S.offsets[i]; p < S.offsets[i + 1]; ++p) acc += w[S.incident[p]];
        out[i] = acc;
    });
}

void degree_adjoint(const DegreeOperator& S, const std::vector<double>& v,
                    std::vector<double>& out) {
    if (static_cast<int64_t>(v.size()) != S.n)
        throw std::invalid_argument("node vector length does not match node count");
    const int64_t m = S.edge_count();
    out.resize(m);
    par_for(m, [&](int64_t e) { out[e] = v[S.ei[e]] + v[S.ej[e]]; });
}

double operator_norm_estimate(const DegreeOperator& S) {
    const int64_t m = S.edge_count();
    if (m == 0) throw std::invalid_argument("operator norm of an empty support");
    const int64_t n = S.n;
    std::vector<double> u(n), t(m), u2(n);
    par_for(n, [&](int64_t i) {
        SplitMix64 rng(0x5EEDF00Du ^ static_cast<uint64_t>(i) * 0x9E3779B97F4A7C15ULL);
        u[i] = rng.next_double() - 0.5;
    });
    double lambda = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        degree_adjoint(S, u, t);
        degree_apply(S, t, u2);
        const double norm = std::sqrt(chunked_sum(n, [&](int64_t i) { return u2[i] * u2[i]; }));
        if (norm == 0.0) break;
        par_for(n, [&](int64_t i) { u[i] = u2[i] / norm; });
        const double prev = lambda;
        lambda = norm;
        if (iter > 0 && std::abs(lambda - prev) <= 1e-6 * lambda) break;
    }
    int64_t max_count = 0;
    for (int64_t i = 0; i < n; ++i) max_count = std::max(max_count, S.node_edge_count(i));
    const double cap = std::sqrt(2.0 * static_cast<double>(max_count));
    return std::min(std::sqrt(lambda) * 1.005, cap);
}

std::vector<double> pairwise_sq_dists(const FeatureMatrix& X,
                                      const std::vector<int64_t>& ei,
                                      const std::vector<int64_t>& ej) {
    if (ei.size() != ej.size()) throw std::invalid_argument("pair arrays differ in length");
    validate_features(X);
    const int64_t m = static_cast<int64_t>(ei.size());
    for (int64_t e = 0; e < m; ++e)
        if (ei[e] < 0 || ei[e] >= X.n || ej[e] < 0 || ej[e] >= X.n)
            throw std::invalid_argument("pair index out of range");
    std::vector<double> out(m);
    par_for(m, [&](int64_t e) {
        const double* a = X.row(ei[e]);
        const double* b = X.row(ej[e]);
        double acc = 0.0;
        for (int64_t c = 0; c < X.d; ++c) {
            const double diff = a[c] - b[c];
            acc += diff * diff;
        }
        out[e] = acc;
    });
    return out;
}

double dirichlet_energy(const FeatureMatrix& X, const SparseWeightedGraph& W) {
    if (W.n != X.n) throw std::invalid_argument("graph and features disagree on node count");
    const int64_t m = W.edge_count();
    return chunked_sum(m, [&](int64_t e) {
        const double* a = X.row(W.ei[e]);
        const double* b = X.row(W.ej[e]);
        double acc = 0.0;
        for (int64_t c = 0; c < X.d; ++c) {
            const double diff = a[c] - b[c];
            acc += diff * diff;
        }
        return W.w[e] * acc;
    });
}

void validate_features(const FeatureMatrix& X) {
    if (X.n < 1 || X.d < 1) throw std::invalid_argument("feature matrix must be n >= 1, d >= 1");
    if (static_cast<int64_t>(X.data.size()) != X.n * X.d)
        throw std::invalid_argument("feature matrix data size mismatch");
    const int64_t total = X.n * X.d;
    for (int64_t i = 0; i < total; ++i)
        if (!std::isfinite(X.data[i]))
            throw std::invalid_argument("feature matrix contains a non-finite value");
}

}  // namespace smoothgraph
