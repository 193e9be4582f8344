#pragma once

#include <utility>
#include <vector>

#include "smoothgraph/types.hpp"

namespace smoothgraph {

// Log-degree model on the fixed support: minimizes
//   2 w'z - alpha * sum_i log((Sw)_i) + beta * ||w||^2,  w >= 0,
// by forward-backward primal-dual iterations. Every node keeps a strictly
// positive degree; weights never exceed sqrt(alpha/beta) (plus float slack).
std::pair<SparseWeightedGraph, SolverReport> learn_log_graph(const EdgeCandidateSet& E,
                                                             double alpha, double beta,
                                                             const SolverOptions& opts = {});

// Largest stationarity violation of W for the log model: per edge,
// g = 2z + 2*beta*w - alpha/d_i - alpha/d_j must vanish where w > 0 and be
// non-negative where w = 0.
double kkt_residual_log(const SparseWeightedGraph& W, const EdgeCandidateSet& E, double alpha,
                        double beta);

// Degree-regularized model with the total-mass constraint: minimizes
//   2 w'z + alpha * ||Sw||^2 + 2 * alpha * ||w||^2,  w >= 0, 2 * sum(w) = n,
// by the same primal-dual scheme with a simplex projection step.
std::pair<SparseWeightedGraph, SolverReport> learn_l2_graph(const EdgeCandidateSet& E,
                                                            double alpha,
                                                            const SolverOptions& opts = {});

// Euclidean projection onto {x >= 0, sum(x) = s} (sort-based pivot).
std::vector<double> project_simplex(const std::vector<double>& y, double s);

// Baseline with hard degree constraints: minimizes ||Mw||^2 subject to
// w >= 0 and Sw >= 1, where Mw stacks per-node rows sum_e w_e (x_i - x_j).
// Degenerate duplicate points are resolved to the minimum-norm feasible
// weights.
std::pair<SparseWeightedGraph, SolverReport> learn_daitch_hard(const EdgeCandidateSet& E,
                                                               const FeatureMatrix& X,
                                                               const SolverOptions& opts = {});

// Soft-penalty variant: minimizes ||Mw||^2 + mu * ||max(1 - Sw, 0)||^2 over
// w >= 0 by accelerated projected gradient.
std::pair<SparseWeightedGraph, SolverReport> learn_daitch_soft(const EdgeCandidateSet& E,
                                                               const FeatureMatrix& X, double mu,
                                                               const SolverOptions& opts = {});

}  // namespace smoothgraph
