#pragma once

#include <vector>

#include "smoothgraph/types.hpp"

namespace smoothgraph {

// Exact m nearest neighbors per node by brute force, squared Euclidean
// distance, ties broken by lower index.
NeighborLists knn_exact(const FeatureMatrix& X, int64_t m);

// NN-Descent: iterated local join over the evolving neighbor graph with
// sampled new/old candidate lists, random initial pools from params.seed.
// Deterministic for a fixed seed regardless of thread count.
NeighborLists knn_approx(const FeatureMatrix& X, int64_t m, const AnnParams& params);

// Mean fraction of exact neighbors recovered, list by list.
double mean_recall(const NeighborLists& approx, const NeighborLists& exact);

// Recall estimated on a deterministic control sample of nodes (brute-force
// scan per sampled node), so large runs never need the full exact solve.
double estimate_recall(const FeatureMatrix& X, const NeighborLists& nl,
                       int64_t sample_cap = 256);

// Symmetrized union of the first k*r directed neighbor pairs of every node,
// canonical i < j, deduplicated, z taken from the stored distances.
EdgeCandidateSet build_allowed_support(const NeighborLists& nl, int64_t k, int64_t r,
                                       const FeatureMatrix& X);

// Per-node incident-edge counts of a support.
std::vector<int64_t> allowed_degrees(const EdgeCandidateSet& E);

}  // namespace smoothgraph
