#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothgraph {

// Thrown when a requested computation has no feasible answer (e.g. a support
// with an isolated node handed to the log model). The CLI maps this to its
// own exit code, distinct from config and I/O errors.
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct FeatureMatrix {
    int64_t n = 0;
    int64_t d = 0;
    std::vector<double> data;  // row-major, n*d

    double at(int64_t i, int64_t j) const { return data[i * d + j]; }
    const double* row(int64_t i) const { return data.data() + i * d; }
};

// Allowed support: unordered pairs stored once with i < j, plus the squared
// Euclidean distance of each pair.
struct EdgeCandidateSet {
    int64_t n = 0;
    std::vector<int64_t> ei;
    std::vector<int64_t> ej;
    std::vector<double> z;

    int64_t edge_count() const { return static_cast<int64_t>(ei.size()); }
};

struct SparseWeightedGraph {
    int64_t n = 0;
    std::vector<int64_t> ei;
    std::vector<int64_t> ej;
    std::vector<double> w;

    int64_t edge_count() const { return static_cast<int64_t>(ei.size()); }
};

// Directed m-nearest-neighbor lists, row-major n*m, each row sorted by
// ascending squared distance (ties by lower index).
struct NeighborLists {
    int64_t n = 0;
    int64_t m = 0;
    std::vector<int64_t> ids;
    std::vector<double> dist;

    int64_t id(int64_t node, int64_t slot) const { return ids[node * m + slot]; }
    double d2(int64_t node, int64_t slot) const { return dist[node * m + slot]; }
};

struct AnnParams {
    int64_t max_candidates = 50;
    int64_t max_rounds = 12;
    double sample_rate = 1.0;
    uint64_t seed = 42;
};

struct ThetaInterval {
    double lower = 0.0;              // exclusive
    double upper = 0.0;              // inclusive; may be +infinity
    int64_t k = 0;
    int64_t skipped_columns = 0;     // nodes excluded from the graph-level averages
    bool support_too_small = false;  // more than 10% of columns skipped
};

struct OneNodeSolution {
    std::vector<double> w;
    double lambda_star = 0.0;
    int64_t k = 0;  // count of strictly positive entries
};

struct SolverOptions {
    int64_t max_iter = 500;
    double tol = 1e-4;
    double step_scale = 0.9;
    bool record_objective = false;
};

enum class StopReason { converged, max_iter };

struct SolverReport {
    int64_t iterations = 0;
    StopReason stop_reason = StopReason::max_iter;
    double final_objective = 0.0;
    double rel_change = 0.0;
    double wall_time = 0.0;  // seconds
    // Populated by the log model only; NaN otherwise.
    double kkt_residual = std::numeric_limits<double>::quiet_NaN();
    // Per-iteration objective values when record_objective is set.
    std::vector<double> trace;
};

// Per-node class ids; negative means unknown.
struct LabelVector {
    int64_t n = 0;
    std::vector<int64_t> labels;

    static constexpr int64_t unknown = -1;
};

}  // namespace smoothgraph
