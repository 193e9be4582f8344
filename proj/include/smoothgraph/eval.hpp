#pragma once

#include <vector>

#include "smoothgraph/types.hpp"

namespace smoothgraph {

struct ConnectivityHistogram {
    std::vector<int64_t> classes;  // distinct class ids, ascending
    std::vector<double> intra;     // weight fraction on intra-class edges, per class
    double wrong = 0.0;            // weight fraction on edges joining different classes
};

struct DiameterResult {
    int64_t diameter = 0;  // hop diameter of the largest component
    int64_t components = 0;
};

struct PropagationResult {
    LabelVector predicted;
    int64_t unclassifiable = 0;  // nodes in components with no known label
    int64_t sweeps = 0;
};

struct DegreeStats {
    double mean = 0.0;  // 2 * |{w > 0}| / n
    int64_t min = 0;
    int64_t max = 0;
    int64_t isolated = 0;
};

// ||A - B||_1,1 / ||B||_1,1 over the union of the two supports.
double rel_l1_error(const SparseWeightedGraph& A, const SparseWeightedGraph& B);

// Weight fractions after normalizing total weight to 1: one entry per class
// for intra-class edges, one shared entry for inter-class edges. Requires
// every node labeled.
ConnectivityHistogram connectivity_histogram(const SparseWeightedGraph& W,
                                             const LabelVector& labels);

// Unweighted hop diameter of the largest connected component of the w > 0
// graph, plus the component count.
DiameterResult graph_diameter(const SparseWeightedGraph& W);

// Harmonic propagation of known labels: unlabeled nodes take the
// degree-weighted average of their neighbors until the sweep change drops
// below 1e-6 (or 10,000 sweeps), then argmax with index tie-break. Nodes in
// components without any known label come back unknown and are counted.
PropagationResult label_propagation(const SparseWeightedGraph& W, const LabelVector& labels);

DegreeStats degree_stats(const SparseWeightedGraph& W);

}  // namespace smoothgraph
