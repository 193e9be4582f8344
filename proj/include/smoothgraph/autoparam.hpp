#pragma once

#include <vector>

#include "smoothgraph/types.hpp"

namespace smoothgraph {

// Analytic minimizer of the one-node problem: scan the sorted distances,
// accumulate prefix sums, and stop at the first index whose candidate
// multiplier fails the activation test.
OneNodeSolution solve_one_node(const std::vector<double>& z_sorted, double theta);

// (lower, upper] range of theta for which the one-node solution has exactly
// k non-zeros. upper is +infinity when the k-th denominator vanishes (always
// at k = 1, and whenever leading distances tie); lower is 0 for k = n.
ThetaInterval theta_interval_one_node(const std::vector<double>& z_sorted, int64_t k);

// Per-node intervals averaged over all nodes with at least k+1 incident
// candidate edges; nodes with fewer are skipped and counted.
ThetaInterval theta_interval_graph(const EdgeCandidateSet& E, int64_t k);

// Geometric mean of the interval bounds; 2*lower when upper is infinite.
double select_theta(const ThetaInterval& interval);
double select_theta(const EdgeCandidateSet& E, int64_t k);

// Zero distances (duplicate nodes) clamped to a tiny positive value relative
// to the median positive distance, keeping the interval formulas finite.
std::vector<double> clamp_distances(const std::vector<double>& z);

// Weights learned at alpha = beta = 1 on theta-scaled distances, multiplied
// by delta = sqrt(alpha/beta), give the solution for general (alpha, beta).
SparseWeightedGraph rescale_solution(const SparseWeightedGraph& W, double alpha, double beta);

}  // namespace smoothgraph
