#include "smoothgraph/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <tuple>

#include "smoothgraph/parallel.hpp"

namespace smoothgraph {

namespace {

void check_graph(const SparseWeightedGraph& W, const char* who) {
    if (W.ei.size() != W.ej.size() || W.ei.size() != W.w.size())
        throw std::invalid_argument(std::string(who) + ": edge arrays differ in length");
    for (int64_t e = 0; e < W.edge_count(); ++e)
        if (W.ei[e] < 0 || W.ei[e] >= W.n || W.ej[e] < 0 || W.ej[e] >= W.n)
            throw std::invalid_argument(std::string(who) + ": edge endpoint out of range");
}

// Adjacency over edges with w > 0, CSR with parallel weight array.
struct Adjacency {
    std::vector<int64_t> offsets;
    std::vector<int64_t> nbr;
    std::vector<double> wts;
};

Adjacency build_adjacency(const SparseWeightedGraph& W) {
    Adjacency A;
    std::vector<int64_t> counts(W.n, 0);
    for (int64_t e = 0; e < W.edge_count(); ++e) {
        if (W.w[e] > 0.0) {
            ++counts[W.ei[e]];
            ++counts[W.ej[e]];
        }
    }
    A.offsets.assign(W.n + 1, 0);
    for (int64_t i = 0; i < W.n; ++i) A.offsets[i + 1] = A.offsets[i] + counts[i];
    A.nbr.resize(A.offsets[W.n]);
    A.wts.resize(A.offsets[W.n]);
    std::vector<int64_t> cursor(A.offsets.begin(), A.offsets.end() - 1);
    for (int64_t e = 0; e < W.edge_count(); ++e) {
        if (!(W.w[e] > 0.0)) continue;
        const int64_t i = W.ei[e];
        const int64_t j = W.ej[e];
        A.nbr[cursor[i]] = j;
        A.wts[cursor[i]++] = W.w[e];
        A.nbr[cursor[j]] = i;
        A.wts[cursor[j]++] = W.w[e];
    }
    return A;
}

// Component id per node, ids assigned in order of discovery by ascending root.
std::vector<int64_t> components_of(const Adjacency& A, int64_t n, int64_t& count) {
    std::vector<int64_t> comp(n, -1);
    std::deque<int64_t> queue;
    count = 0;
    for (int64_t root = 0; root < n; ++root) {
        if (comp[root] >= 0) continue;
        const int64_t id = count++;
        comp[root] = id;
        queue.push_back(root);
        while (!queue.empty()) {
            const int64_t u = queue.front();
            queue.pop_front();
            for (int64_t t = A.offsets[u]; t < A.offsets[u + 1]; ++t) {
                const int64_t v = A.nbr[t];
                if (comp[v] < 0) {
                    comp[v] = id;
                    queue.push_back(v);
                }
            }
        }
    }
    return comp;
}

}  // namespace

double rel_l1_error(const SparseWeightedGraph& A, const SparseWeightedGraph& B) {
    check_graph(A, "rel_l1_error");
    check_graph(B, "rel_l1_error");
    if (A.n != B.n) throw std::invalid_argument("rel_l1_error: node counts differ");

    auto canonical = [](const SparseWeightedGraph& G) {
        std::vector<std::tuple<int64_t, int64_t, double>> edges(G.edge_count());
        for (int64_t e = 0; e < G.edge_count(); ++e)
            edges[e] = {std::min(G.ei[e], G.ej[e]), std::max(G.ei[e], G.ej[e]), G.w[e]};
        std::sort(edges.begin(), edges.end());
        return edges;
    };
    const auto ea = canonical(A);
    const auto eb = canonical(B);

    double diff = 0.0;
    double denom = 0.0;
    size_t ia = 0, ib = 0;
    while (ia < ea.size() || ib < eb.size()) {
        const bool take_a =
            ib == eb.size() ||
            (ia < ea.size() && std::pair{std::get<0>(ea[ia]), std::get<1>(ea[ia])} <
                                   std::pair{std::get<0>(eb[ib]), std::get<1>(eb[ib])});
        const bool take_b =
            ia == ea.size() ||
            (ib < eb.size() && std::pair{std::get<0>(eb[ib]), std::get<1>(eb[ib])} <
                                   std::pair{std::get<0>(ea[ia]), std::get<1>(ea[ia])});
        if (take_a) {
            diff += std::abs(std::get<2>(ea[ia]));
            ++ia;
        } else if (take_b) {
            diff += std::abs(std::get<2>(eb[ib]));
            denom += std::abs(std::get<2>(eb[ib]));
            ++ib;
        } else {
            diff += std::abs(std::get<2>(ea[ia]) - std::get<2>(eb[ib]));
            denom += std::abs(std::get<2>(eb[ib]));
            ++ia;
            ++ib;
        }
    }
    if (denom <= 0.0) throw std::invalid_argument("rel_l1_error: reference graph has zero weight");
    return diff / denom;
}

ConnectivityHistogram connectivity_histogram(const SparseWeightedGraph& W,
                                             const LabelVector& labels) {
    check_graph(W, "connectivity_histogram");
    if (labels.n != W.n || static_cast<int64_t>(labels.labels.size()) != W.n)
        throw std::invalid_argument("connectivity_histogram: label count does not match nodes");
    for (int64_t i = 0; i < W.n; ++i)
        if (labels.labels[i] < 0)
            throw std::invalid_argument("connectivity_histogram: node " + std::to_string(i) +
                                        " is unlabeled");

    ConnectivityHistogram H;
    H.classes.assign(labels.labels.begin(), labels.labels.end());
    std::sort(H.classes.begin(), H.classes.end());
    H.classes.erase(std::unique(H.classes.begin(), H.classes.end()), H.classes.end());
    H.intra.assign(H.classes.size(), 0.0);

    auto class_slot = [&](int64_t c) {
        return std::lower_bound(H.classes.begin(), H.classes.end(), c) - H.classes.begin();
    };

    double total = 0.0;
    for (int64_t e = 0; e < W.edge_count(); ++e) {
        const double w = W.w[e];
        if (!(w >= 0.0)) throw std::invalid_argument("connectivity_histogram: negative weight");
        total += w;
        const int64_t li = labels.labels[W.ei[e]];
        const int64_t lj = labels.labels[W.ej[e]];
        if (li == lj)
            H.intra[class_slot(li)] += w;
        else
            H.wrong += w;
    }
    if (total <= 0.0)
        throw std::invalid_argument("connectivity_histogram: graph has zero total weight");
    for (double& f : H.intra) f /= total;
    H.wrong /= total;
    return H;
}

DiameterResult graph_diameter(const SparseWeightedGraph& W) {
    check_graph(W, "graph_diameter");
    if (W.n < 1) throw std::invalid_argument("graph_diameter: empty node set");

    const Adjacency A = build_adjacency(W);
    DiameterResult R;
    const std::vector<int64_t> comp = components_of(A, W.n, R.components);

    std::vector<int64_t> sizes(R.components, 0);
    for (int64_t i = 0; i < W.n; ++i) ++sizes[comp[i]];
    const int64_t big =
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin();

    std::vector<int64_t> members;
    for (int64_t i = 0; i < W.n; ++i)
        if (comp[i] == big) members.push_back(i);

    std::vector<int64_t> ecc(members.size(), 0);
    par_for(static_cast<int64_t>(members.size()), [&](int64_t s) {
        std::vector<int64_t> dist(W.n, -1);
        std::deque<int64_t> queue;
        dist[members[s]] = 0;
        queue.push_back(members[s]);
        int64_t far = 0;
        while (!queue.empty()) {
            const int64_t u = queue.front();
            queue.pop_front();
            for (int64_t t = A.offsets[u]; t < A.offsets[u + 1]; ++t) {
                const int64_t v = A.nbr[t];
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    if (dist[v] > far) far = dist[v];
                    queue.push_back(v);
                }
            }
        }
        ecc[s] = far;
    });
    for (int64_t e : ecc)
        if (e > R.diameter) R.diameter = e;
    return R;
}

PropagationResult label_propagation(const SparseWeightedGraph& W, const LabelVector& labels) {
    check_graph(W, "label_propagation");
    if (labels.n != W.n || static_cast<int64_t>(labels.labels.size()) != W.n)
        throw std::invalid_argument("label_propagation: label count does not match nodes");

    std::vector<int64_t> classes;
    for (int64_t l : labels.labels)
        if (l >= 0) classes.push_back(l);
    if (classes.empty()) throw std::invalid_argument("label_propagation: no known labels");
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const int64_t C = static_cast<int64_t>(classes.size());

    auto class_slot = [&](int64_t c) {
        return std::lower_bound(classes.begin(), classes.end(), c) - classes.begin();
    };

    const Adjacency A = build_adjacency(W);
    int64_t ncomp = 0;
    const std::vector<int64_t> comp = components_of(A, W.n, ncomp);
    std::vector<uint8_t> comp_known(ncomp, 0);
    for (int64_t i = 0; i < W.n; ++i)
        if (labels.labels[i] >= 0) comp_known[comp[i]] = 1;

    std::vector<int64_t> active;  // unlabeled nodes reachable from a label
    for (int64_t i = 0; i < W.n; ++i)
        if (labels.labels[i] < 0 && comp_known[comp[i]]) active.push_back(i);

    std::vector<double> f(static_cast<size_t>(W.n) * C, 0.0);
    for (int64_t i = 0; i < W.n; ++i)
        if (labels.labels[i] >= 0) f[i * C + class_slot(labels.labels[i])] = 1.0;

    std::vector<double> fresh(C);
    PropagationResult R;
    for (int64_t sweep = 1; sweep <= 10000; ++sweep) {
        double change = 0.0;
        for (int64_t u : active) {
            std::fill(fresh.begin(), fresh.end(), 0.0);
            double d = 0.0;
            for (int64_t t = A.offsets[u]; t < A.offsets[u + 1]; ++t) {
                const int64_t v = A.nbr[t];
                const double w = A.wts[t];
                d += w;
                for (int64_t c = 0; c < C; ++c) fresh[c] += w * f[v * C + c];
            }
            for (int64_t c = 0; c < C; ++c) {
                const double nv = fresh[c] / d;
                change = std::max(change, std::abs(nv - f[u * C + c]));
                f[u * C + c] = nv;
            }
        }
        R.sweeps = sweep;
        if (change < 1e-6) break;
        if (active.empty()) break;
    }

    R.predicted.n = W.n;
    R.predicted.labels.assign(W.n, LabelVector::unknown);
    for (int64_t i = 0; i < W.n; ++i) {
        if (labels.labels[i] >= 0) {
            R.predicted.labels[i] = labels.labels[i];
            continue;
        }
        if (!comp_known[comp[i]]) {
            ++R.unclassifiable;
            continue;
        }
        int64_t best = 0;
        for (int64_t c = 1; c < C; ++c)
            if (f[i * C + c] > f[i * C + best]) best = c;
        R.predicted.labels[i] = classes[best];
    }
    return R;
}

DegreeStats degree_stats(const SparseWeightedGraph& W) {
    check_graph(W, "degree_stats");
    DegreeStats D;
    if (W.n == 0) return D;

    std::vector<int64_t> deg(W.n, 0);
    int64_t nnz = 0;
    for (int64_t e = 0; e < W.edge_count(); ++e) {
        if (W.w[e] > 0.0) {
            ++deg[W.ei[e]];
            ++deg[W.ej[e]];
            ++nnz;
        }
    }
    D.mean = 2.0 * static_cast<double>(nnz) / static_cast<double>(W.n);
    D.min = *std::min_element(deg.begin(), deg.end());
    D.max = *std::max_element(deg.begin(), deg.end());
    D.isolated = std::count(deg.begin(), deg.end(), int64_t{0});
    return D;
}

}  // namespace smoothgraph
