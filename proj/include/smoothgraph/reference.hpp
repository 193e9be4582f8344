#pragma once

#include <vector>

#include "smoothgraph/core.hpp"
#include "smoothgraph/types.hpp"

namespace smoothgraph::reference {

// Plain single-threaded twins of the parallel kernels. They follow the exact
// summation order of the parallel versions (per-chunk accumulation combined
// in chunk order), so outputs must be bit-identical, not just close. Tests
// compare the two; the kernel benchmark times them against each other.

double chunked_sum(const std::vector<double>& values);

void degree_apply(const DegreeOperator& S, const std::vector<double>& w,
                  std::vector<double>& out);

void degree_adjoint(const DegreeOperator& S, const std::vector<double>& v,
                    std::vector<double>& out);

std::vector<double> pairwise_sq_dists(const FeatureMatrix& X,
                                      const std::vector<int64_t>& ei,
                                      const std::vector<int64_t>& ej);

double dirichlet_energy(const FeatureMatrix& X, const SparseWeightedGraph& W);

NeighborLists knn_exact(const FeatureMatrix& X, int64_t m);

}  // namespace smoothgraph::reference
