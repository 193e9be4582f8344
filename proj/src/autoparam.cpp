#include "smoothgraph/autoparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "smoothgraph/core.hpp"
#include "smoothgraph/parallel.hpp"

namespace smoothgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sorted_positive(const std::vector<double>& z, const char* who) {
    if (z.empty()) throw std::invalid_argument(std::string(who) + ": empty distance vector");
    double prev = 0.0;
    for (double v : z) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(who) + ": distances must be positive and finite");
        if (v < prev)
            throw std::invalid_argument(std::string(who) + ": distances must be sorted ascending");
        prev = v;
    }
}

}  // namespace

OneNodeSolution solve_one_node(const std::vector<double>& z_sorted, double theta) {
    check_sorted_positive(z_sorted, "solve_one_node");
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("solve_one_node: theta must be positive and finite");

    const int64_t n = static_cast<int64_t>(z_sorted.size());
    double b = 0.0;
    double lambda_prev = 0.0;
    int64_t k = n;
    double lambda_star = 0.0;
    bool found = false;
    for (int64_t i = 1; i <= n; ++i) {
        b += z_sorted[i - 1];
        const double tb = theta * b;
        const double lambda_i =
            (tb + std::sqrt(tb * tb + 4.0 * static_cast<double>(i))) / (2.0 * static_cast<double>(i));
        if (!(lambda_i > theta * z_sorted[i - 1])) {
            k = i - 1;
            lambda_star = lambda_prev;
            found = true;
            break;
        }
        lambda_prev = lambda_i;
    }
    if (!found) lambda_star = lambda_prev;

    OneNodeSolution sol;
    sol.k = k;
    sol.lambda_star = lambda_star;
    sol.w.resize(z_sorted.size());
    for (size_t e = 0; e < z_sorted.size(); ++e)
        sol.w[e] = std::max(0.0, lambda_star - theta * z_sorted[e]);
    return sol;
}

ThetaInterval theta_interval_one_node(const std::vector<double>& z_sorted, int64_t k) {
    check_sorted_positive(z_sorted, "theta_interval_one_node");
    const int64_t n = static_cast<int64_t>(z_sorted.size());
    if (k < 1 || k > n) throw std::invalid_argument("theta_interval_one_node: k out of range");

    double b_k = 0.0;
    for (int64_t i = 0; i < k; ++i) b_k += z_sorted[i];

    ThetaInterval iv;
    iv.k = k;
    const double zk = z_sorted[k - 1];
    const double denom_u = static_cast<double>(k) * zk * zk - b_k * zk;
    iv.upper = denom_u > 0.0 ? 1.0 / std::sqrt(denom_u) : kInf;
    if (k == n) {
        iv.lower = 0.0;
    } else {
        const double zk1 = z_sorted[k];
        const double denom_l = static_cast<double>(k) * zk1 * zk1 - b_k * zk1;
        iv.lower = denom_l > 0.0 ? 1.0 / std::sqrt(denom_l) : kInf;
    }
    return iv;
}

std::vector<double> clamp_distances(const std::vector<double>& z) {
    std::vector<double> positive;
    positive.reserve(z.size());
    for (double v : z)
        if (v > 0.0) positive.push_back(v);

    double eps = 1e-12;
    if (!positive.empty()) {
        const size_t mid = positive.size() / 2;
        std::nth_element(positive.begin(), positive.begin() + mid, positive.end());
        eps = 1e-12 * positive[mid];
    }

    std::vector<double> out(z);
    for (double& v : out) v = std::max(v, eps);
    return out;
}

ThetaInterval theta_interval_graph(const EdgeCandidateSet& E, int64_t k) {
    if (k < 1) throw std::invalid_argument("theta_interval_graph: k must be >= 1");
    for (double v : E.z)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument(
                "theta_interval_graph: distances must be non-negative and finite");

    const std::vector<double> z = clamp_distances(E.z);
    const DegreeOperator S = build_degree_operator(E);

    std::vector<double> lower_j(E.n, 0.0);
    std::vector<double> upper_j(E.n, 0.0);
    std::vector<uint8_t> used(E.n, 0);

    par_for(E.n, [&](int64_t j) {
        const int64_t begin = S.offsets[j];
        const int64_t end = S.offsets[j + 1];
        const int64_t deg = end - begin;
        if (deg < k + 1) return;
        std::vector<double> col(deg);
        for (int64_t t = 0; t < deg; ++t) col[t] = z[S.incident[begin + t]];
        std::sort(col.begin(), col.end());
        const ThetaInterval iv = theta_interval_one_node(col, k);
        lower_j[j] = iv.lower;
        upper_j[j] = iv.upper;
        used[j] = 1;
    });

    int64_t included = 0;
    double lower_sum = 0.0;
    double upper_sum = 0.0;
    for (int64_t j = 0; j < E.n; ++j) {
        if (!used[j]) continue;
        ++included;
        lower_sum += lower_j[j];
        upper_sum += upper_j[j];
    }
    if (included == 0)
        throw std::invalid_argument(
            "theta_interval_graph: no node has more than k incident candidate edges");

    ThetaInterval iv;
    iv.k = k;
    iv.skipped_columns = E.n - included;
    iv.support_too_small = iv.skipped_columns * 10 > E.n;
    iv.lower = lower_sum / static_cast<double>(included);
    iv.upper = upper_sum / static_cast<double>(included);
    return iv;
}

double select_theta(const ThetaInterval& interval) {
    if (!std::isfinite(interval.lower) || !(interval.lower > 0.0))
        throw std::invalid_argument("select_theta: lower interval bound is not finite and positive");
    if (std::isfinite(interval.upper)) return std::sqrt(interval.lower * interval.upper);
    return 2.0 * interval.lower;
}

double select_theta(const EdgeCandidateSet& E, int64_t k) {
    return select_theta(theta_interval_graph(E, k));
}

SparseWeightedGraph rescale_solution(const SparseWeightedGraph& W, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("rescale_solution: alpha and beta must be positive and finite");
    const double delta = std::sqrt(alpha / beta);
    SparseWeightedGraph out(W);
    for (double& w : out.w) w *= delta;
    return out;
}

}  // namespace smoothgraph
