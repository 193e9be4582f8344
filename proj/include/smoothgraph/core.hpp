#pragma once

#include <vector>

#include "smoothgraph/types.hpp"

namespace smoothgraph {

// Incidence of the allowed support: for each node the ascending list of
// incident edge indices (CSR layout). Degrees are computed by gathering over
// this structure, never by scattering, so parallel runs stay deterministic.
struct DegreeOperator {
    int64_t n = 0;
    std::vector<int64_t> ei;
    std::vector<int64_t> ej;
    std::vector<int64_t> offsets;   // n + 1
    std::vector<int64_t> incident;  // edge ids grouped by node

    int64_t edge_count() const { return static_cast<int64_t>(ei.size()); }
    int64_t node_edge_count(int64_t i) const { return offsets[i + 1] - offsets[i]; }
};

DegreeOperator build_degree_operator(int64_t n, const std::vector<int64_t>& ei,
                                     const std::vector<int64_t>& ej);
DegreeOperator build_degree_operator(const EdgeCandidateSet& support);

// (Sw)_i = sum of w_e over edges incident to node i.
void degree_apply(const DegreeOperator& S, const std::vector<double>& w,
                  std::vector<double>& out);

// (S^T v)_e = v_i + v_j for edge e = (i, j).
void degree_adjoint(const DegreeOperator& S, const std::vector<double>& v,
                    std::vector<double>& out);

// Estimate of the spectral norm of S via power iteration on S S^T, accurate
// to about 1% and capped by the exact bound sqrt(2 * max node edge count).
double operator_norm_estimate(const DegreeOperator& S);

// Squared Euclidean distances between the listed row pairs of X.
std::vector<double> pairwise_sq_dists(const FeatureMatrix& X,
                                      const std::vector<int64_t>& ei,
                                      const std::vector<int64_t>& ej);

// Sum over edges of w_e * ||x_i - x_j||^2 (each unordered pair once).
double dirichlet_energy(const FeatureMatrix& X, const SparseWeightedGraph& W);

void validate_features(const FeatureMatrix& X);

}  // namespace smoothgraph
