#include "smoothgraph/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "smoothgraph/core.hpp"
#include "smoothgraph/parallel.hpp"

namespace smoothgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelFloor = 1e-12;

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void check_options(const SolverOptions& opts) {
    if (opts.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (!(opts.step_scale > 0.0) || !(opts.step_scale < 1.0))
        throw std::invalid_argument("step_scale must be in (0, 1)");
}

void check_distances(const EdgeCandidateSet& E) {
    if (E.z.size() != E.ei.size())
        throw std::invalid_argument("distance array does not match edge count");
    for (double v : E.z)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("distances must be non-negative and finite");
}

double norm_sq(const std::vector<double>& a) {
    return chunked_sum(static_cast<int64_t>(a.size()), [&](int64_t i) { return a[i] * a[i]; });
}

double rel_change(double diff_norm_sq, double ref_norm_sq) {
    return std::sqrt(diff_norm_sq) / std::max(std::sqrt(ref_norm_sq), kRelFloor);
}

double min_value(const std::vector<double>& a) {
    double best = kInf;
    for (double v : a)
        if (v < best) best = v;
    return best;
}

// Per-node feature-difference rows R_i = sum over incident edges w_e (x_i - x_j),
// then out_e = <R_i - R_j, x_i - x_j>: together one application of the
// smoothness quadratic's matrix to an edge vector.
void quad_apply(const DegreeOperator& S, const FeatureMatrix& X, const std::vector<double>& w,
                std::vector<double>& rows, std::vector<double>& out) {
    const int64_t d = X.d;
    rows.assign(static_cast<size_t>(S.n) * d, 0.0);
    par_for(S.n, [&](int64_t i) {
        double* r = rows.data() + i * d;
        for (int64_t t = S.offsets[i]; t < S.offsets[i + 1]; ++t) {
            const int64_t e = S.incident[t];
            const int64_t other = S.ei[e] == i ? S.ej[e] : S.ei[e];
            const double we = w[e];
            const double* xi = X.row(i);
            const double* xo = X.row(other);
            for (int64_t c = 0; c < d; ++c) r[c] += we * (xi[c] - xo[c]);
        }
    });
    out.resize(w.size());
    par_for(S.edge_count(), [&](int64_t e) {
        const int64_t i = S.ei[e];
        const int64_t j = S.ej[e];
        const double* ri = rows.data() + i * d;
        const double* rj = rows.data() + j * d;
        const double* xi = X.row(i);
        const double* xj = X.row(j);
        double acc = 0.0;
        for (int64_t c = 0; c < d; ++c) acc += (ri[c] - rj[c]) * (xi[c] - xj[c]);
        out[e] = acc;
    });
}

// Largest eigenvalue of a PSD operator on edge vectors, by power iteration
// with a fixed seeded start.
template <class Apply>
double power_lambda(int64_t m, Apply&& apply) {
    std::vector<double> u(m);
    SplitMix64 rng(0x5EEDF00DULL);
    for (int64_t e = 0; e < m; ++e) u[e] = rng.next_double() + 0.5;
    std::vector<double> t(m);
    double lambda = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        apply(u, t);
        const double nrm = std::sqrt(norm_sq(t));
        if (nrm <= 0.0) return 0.0;
        par_for(m, [&](int64_t e) { u[e] = t[e] / nrm; });
        const double prev = lambda;
        lambda = nrm;
        if (iter > 0 && std::abs(lambda - prev) <= 1e-6 * lambda) break;
    }
    return lambda;
}

}  // namespace

std::pair<SparseWeightedGraph, SolverReport> learn_log_graph(const EdgeCandidateSet& E,
                                                             double alpha, double beta,
                                                             const SolverOptions& opts) {
    check_options(opts);
    check_distances(E);
    if (E.n < 1) throw std::invalid_argument("learn_log_graph: empty node set");
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("learn_log_graph: alpha and beta must be positive and finite");

    Stopwatch clock;
    const DegreeOperator S = build_degree_operator(E);
    for (int64_t i = 0; i < S.n; ++i)
        if (S.node_edge_count(i) == 0)
            throw infeasible_error("learn_log_graph: node " + std::to_string(i) +
                                   " has no candidate edge, its degree cannot be positive");

    const int64_t m = S.edge_count();
    const int64_t n = S.n;
    const std::vector<double>& z = E.z;
    // Forward-backward-forward step: gamma * (L + ||S||) < 1 with L = 2*beta,
    // the Lipschitz constant of the gradient of beta*||w||^2.
    const double gamma = opts.step_scale / (2.0 * beta + operator_norm_estimate(S));

    std::vector<double> w(m, 0.0), v(n, 1.0);
    std::vector<double> y(m), p(m), q(m), ybar(n), pbar(n), qbar(n);
    std::vector<double> Sw(n), Sp(n), Stv(m), Stpbar(m);

    SolverReport report;
    double relw = kInf, relv = kInf;
    for (int64_t it = 1; it <= opts.max_iter; ++it) {
        degree_apply(S, w, Sw);
        degree_adjoint(S, v, Stv);
        par_for(m, [&](int64_t e) { y[e] = w[e] - gamma * (2.0 * beta * w[e] + Stv[e]); });
        par_for(n, [&](int64_t i) { ybar[i] = v[i] + gamma * Sw[i]; });
        par_for(m, [&](int64_t e) { p[e] = std::max(0.0, y[e] - 2.0 * gamma * z[e]); });
        par_for(n, [&](int64_t i) {
            pbar[i] = 0.5 * (ybar[i] - std::sqrt(ybar[i] * ybar[i] + 4.0 * alpha * gamma));
        });
        degree_apply(S, p, Sp);
        degree_adjoint(S, pbar, Stpbar);
        par_for(m, [&](int64_t e) { q[e] = p[e] - gamma * (2.0 * beta * p[e] + Stpbar[e]); });
        par_for(n, [&](int64_t i) { qbar[i] = pbar[i] + gamma * Sp[i]; });
        par_for(m, [&](int64_t e) { w[e] += q[e] - y[e]; });
        par_for(n, [&](int64_t i) { v[i] += qbar[i] - ybar[i]; });

        const double dw = chunked_sum(m, [&](int64_t e) {
            const double d = q[e] - y[e];
            return d * d;
        });
        const double dv = chunked_sum(n, [&](int64_t i) {
            const double d = qbar[i] - ybar[i];
            return d * d;
        });
        relw = rel_change(dw, norm_sq(w));
        relv = rel_change(dv, norm_sq(v));

        if (opts.record_objective) {
            const double dmin = min_value(Sp);
            double obj = kInf;
            if (dmin > 0.0) {
                obj = 2.0 * chunked_sum(m, [&](int64_t e) { return p[e] * z[e]; }) -
                      alpha * chunked_sum(n, [&](int64_t i) { return std::log(Sp[i]); }) +
                      beta * norm_sq(p);
            }
            report.trace.push_back(obj);
        }

        report.iterations = it;
        if (std::max(relw, relv) < opts.tol) {
            report.stop_reason = StopReason::converged;
            break;
        }
    }
    report.rel_change = std::max(relw, relv);

    // The proximal primal point is exactly zero on inactive edges, unlike the
    // running iterate. Edges whose zero-weight stationarity already holds at
    // the final degrees are dust left by finite tolerance; drop them.
    degree_apply(S, p, Sp);
    par_for(m, [&](int64_t e) {
        const double g0 = 2.0 * z[e] - alpha / Sp[S.ei[e]] - alpha / Sp[S.ej[e]];
        if (g0 >= 0.0) p[e] = 0.0;
    });

    SparseWeightedGraph W;
    W.n = n;
    W.ei = E.ei;
    W.ej = E.ej;
    W.w = p;

    degree_apply(S, p, Sp);
    const double dmin = min_value(Sp);
    if (dmin > 0.0) {
        report.final_objective = 2.0 * chunked_sum(m, [&](int64_t e) { return p[e] * z[e]; }) -
                                 alpha * chunked_sum(n, [&](int64_t i) { return std::log(Sp[i]); }) +
                                 beta * norm_sq(p);
        report.kkt_residual = kkt_residual_log(W, E, alpha, beta);
    } else {
        report.final_objective = kInf;
    }
    report.wall_time = clock.seconds();
    return {std::move(W), std::move(report)};
}

double kkt_residual_log(const SparseWeightedGraph& W, const EdgeCandidateSet& E, double alpha,
                        double beta) {
    if (W.edge_count() != E.edge_count() || W.n != E.n)
        throw std::invalid_argument("kkt_residual_log: graph does not match the candidate set");
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("kkt_residual_log: alpha and beta must be positive");

    const DegreeOperator S = build_degree_operator(E);
    std::vector<double> d(W.n);
    degree_apply(S, W.w, d);
    for (int64_t i = 0; i < W.n; ++i)
        if (!(d[i] > 0.0))
            throw std::invalid_argument("kkt_residual_log: node " + std::to_string(i) +
                                        " has zero degree");

    return chunked_max(W.edge_count(), [&](int64_t e) {
        const double g =
            2.0 * E.z[e] + 2.0 * beta * W.w[e] - alpha / d[W.ei[e]] - alpha / d[W.ej[e]];
        if (W.w[e] > 0.0) return std::min(std::abs(g), W.w[e]);
        return std::max(0.0, -g);
    });
}

std::vector<double> project_simplex(const std::vector<double>& y, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("project_simplex: s must be positive");
    const size_t n = y.size();
    if (n == 0) return {};

    std::vector<double> u(y);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double tau = 0.0;
    for (size_t j = 1; j <= n; ++j) {
        css += u[j - 1];
        const double cand = (css - s) / static_cast<double>(j);
        if (u[j - 1] - cand > 0.0) tau = cand;
    }
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = std::max(0.0, y[i] - tau);
    return out;
}

std::pair<SparseWeightedGraph, SolverReport> learn_l2_graph(const EdgeCandidateSet& E, double alpha,
                                                            const SolverOptions& opts) {
    check_options(opts);
    check_distances(E);
    if (E.edge_count() < 1) throw std::invalid_argument("learn_l2_graph: empty support");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("learn_l2_graph: alpha must be positive and finite");

    Stopwatch clock;
    const DegreeOperator S = build_degree_operator(E);
    const int64_t m = S.edge_count();
    const int64_t n = S.n;
    const std::vector<double>& z = E.z;
    const double mass = 0.5 * static_cast<double>(n);
    // Forward-backward-forward step: gamma * (L + ||S||) < 1 with L = 4*alpha,
    // the Lipschitz constant of the gradient of 2*alpha*||w||^2.
    const double gamma = opts.step_scale / (4.0 * alpha + operator_norm_estimate(S));
    const double dual_shrink = 2.0 * alpha / (gamma + 2.0 * alpha);

    std::vector<double> w(m, mass / static_cast<double>(m));
    std::vector<double> v(n);
    degree_apply(S, w, v);

    std::vector<double> y(m), p(m), q(m), t(m), ybar(n), pbar(n), qbar(n);
    std::vector<double> Sw(n), Sp(n), Stv(m), Stpbar(m);

    SolverReport report;
    double relw = kInf, relv = kInf;
    for (int64_t it = 1; it <= opts.max_iter; ++it) {
        degree_apply(S, w, Sw);
        degree_adjoint(S, v, Stv);
        par_for(m, [&](int64_t e) { y[e] = w[e] - gamma * (4.0 * alpha * w[e] + Stv[e]); });
        par_for(n, [&](int64_t i) { ybar[i] = v[i] + gamma * Sw[i]; });
        par_for(m, [&](int64_t e) { t[e] = y[e] - 2.0 * gamma * z[e]; });
        p = project_simplex(t, mass);
        par_for(n, [&](int64_t i) { pbar[i] = dual_shrink * ybar[i]; });
        degree_apply(S, p, Sp);
        degree_adjoint(S, pbar, Stpbar);
        par_for(m, [&](int64_t e) { q[e] = p[e] - gamma * (4.0 * alpha * p[e] + Stpbar[e]); });
        par_for(n, [&](int64_t i) { qbar[i] = pbar[i] + gamma * Sp[i]; });
        par_for(m, [&](int64_t e) { w[e] += q[e] - y[e]; });
        par_for(n, [&](int64_t i) { v[i] += qbar[i] - ybar[i]; });

        const double dw = chunked_sum(m, [&](int64_t e) {
            const double d = q[e] - y[e];
            return d * d;
        });
        const double dv = chunked_sum(n, [&](int64_t i) {
            const double d = qbar[i] - ybar[i];
            return d * d;
        });
        relw = rel_change(dw, norm_sq(w));
        relv = rel_change(dv, norm_sq(v));

        if (opts.record_objective) {
            const double obj = 2.0 * chunked_sum(m, [&](int64_t e) { return p[e] * z[e]; }) +
                               alpha * norm_sq(Sp) + 2.0 * alpha * norm_sq(p);
            report.trace.push_back(obj);
        }

        report.iterations = it;
        if (std::max(relw, relv) < opts.tol) {
            report.stop_reason = StopReason::converged;
            break;
        }
    }
    report.rel_change = std::max(relw, relv);

    SparseWeightedGraph W;
    W.n = n;
    W.ei = E.ei;
    W.ej = E.ej;
    W.w = p;

    degree_apply(S, p, Sp);
    report.final_objective = 2.0 * chunked_sum(m, [&](int64_t e) { return p[e] * z[e]; }) +
                             alpha * norm_sq(Sp) + 2.0 * alpha * norm_sq(p);
    report.wall_time = clock.seconds();
    return {std::move(W), std::move(report)};
}

std::pair<SparseWeightedGraph, SolverReport> learn_daitch_hard(const EdgeCandidateSet& E,
                                                               const FeatureMatrix& X,
                                                               const SolverOptions& opts) {
    check_options(opts);
    check_distances(E);
    validate_features(X);
    if (E.edge_count() < 1) throw std::invalid_argument("learn_daitch_hard: empty support");
    if (X.n != E.n) throw std::invalid_argument("learn_daitch_hard: feature rows do not match nodes");

    Stopwatch clock;
    const DegreeOperator S = build_degree_operator(E);
    const int64_t m = S.edge_count();
    const int64_t n = S.n;

    std::vector<double> rows;
    std::vector<double> quad(m);
    double curvature = power_lambda(m, [&](const std::vector<double>& u, std::vector<double>& out) {
        quad_apply(S, X, u, rows, out);
    });
    if (curvature <= 1e-12) curvature = 1.0;

    // A vanishing quadratic (duplicate points) leaves the minimum-norm choice
    // open; this tiny ridge pins it without moving non-degenerate solutions.
    const double tie = 1e-12;
    const double scale = 2.0 / curvature;
    const double gamma = opts.step_scale / (2.0 + 2.0 * tie + operator_norm_estimate(S));

    std::vector<double> w(m, 0.0), v(n, 0.0);
    std::vector<double> y(m), p(m, 0.0), q(m), ybar(n), pbar(n), qbar(n);
    std::vector<double> Sw(n), Sp(n, 0.0), Stv(m), Stpbar(m);

    SolverReport report;
    double relw = kInf, relv = kInf;
    bool feasible = false;
    for (int64_t it = 1; it <= opts.max_iter; ++it) {
        quad_apply(S, X, w, rows, quad);
        degree_apply(S, w, Sw);
        degree_adjoint(S, v, Stv);
        par_for(m, [&](int64_t e) {
            y[e] = w[e] - gamma * (scale * quad[e] + 2.0 * tie * w[e] + Stv[e]);
        });
        par_for(n, [&](int64_t i) { ybar[i] = v[i] + gamma * Sw[i]; });
        par_for(m, [&](int64_t e) { p[e] = std::max(0.0, y[e]); });
        par_for(n, [&](int64_t i) { pbar[i] = std::min(ybar[i] - gamma, 0.0); });
        quad_apply(S, X, p, rows, quad);
        degree_apply(S, p, Sp);
        degree_adjoint(S, pbar, Stpbar);
        par_for(m, [&](int64_t e) {
            q[e] = p[e] - gamma * (scale * quad[e] + 2.0 * tie * p[e] + Stpbar[e]);
        });
        par_for(n, [&](int64_t i) { qbar[i] = pbar[i] + gamma * Sp[i]; });
        par_for(m, [&](int64_t e) { w[e] += q[e] - y[e]; });
        par_for(n, [&](int64_t i) { v[i] += qbar[i] - ybar[i]; });

        const double dw = chunked_sum(m, [&](int64_t e) {
            const double d = q[e] - y[e];
            return d * d;
        });
        const double dv = chunked_sum(n, [&](int64_t i) {
            const double d = qbar[i] - ybar[i];
            return d * d;
        });
        relw = rel_change(dw, norm_sq(w));
        relv = rel_change(dv, norm_sq(v));
        feasible = min_value(Sp) >= 1.0 - 1e-3;

        if (opts.record_objective) {
            quad_apply(S, X, p, rows, quad);
            report.trace.push_back(chunked_sum(m, [&](int64_t e) { return p[e] * quad[e]; }));
        }

        report.iterations = it;
        if (std::max(relw, relv) < opts.tol && feasible) {
            report.stop_reason = StopReason::converged;
            break;
        }
    }
    report.rel_change = std::max(relw, relv);

    std::vector<double> out = p;

    // Edges between (near-)duplicate points contribute nothing to the
    // objective, so the main iteration barely moves them. Re-solve them as a
    // least-norm problem against the degree still missing at their endpoints,
    // then top up exactly.
    const double zmax = m > 0 ? *std::max_element(E.z.begin(), E.z.end()) : 0.0;
    const double zeps = 1e-12 * std::max(zmax, 1.0);
    std::vector<int64_t> z0;
    for (int64_t e = 0; e < m; ++e)
        if (E.z[e] <= zeps) z0.push_back(e);

    if (!z0.empty()) {
        std::vector<double> masked = out;
        for (int64_t e : z0) masked[e] = 0.0;
        std::vector<double> d_other(n);
        degree_apply(S, masked, d_other);

        std::vector<int64_t> node_map(n, -1);
        int64_t n_sub = 0;
        for (int64_t e : z0) {
            if (node_map[E.ei[e]] < 0) node_map[E.ei[e]] = 0;
            if (node_map[E.ej[e]] < 0) node_map[E.ej[e]] = 0;
        }
        for (int64_t i = 0; i < n; ++i)
            if (node_map[i] == 0) node_map[i] = n_sub++;
            else node_map[i] = -1;

        const int64_t mz = static_cast<int64_t>(z0.size());
        std::vector<int64_t> sei(mz), sej(mz);
        for (int64_t t = 0; t < mz; ++t) {
            sei[t] = node_map[E.ei[z0[t]]];
            sej[t] = node_map[E.ej[z0[t]]];
        }
        const DegreeOperator Ssub = build_degree_operator(n_sub, sei, sej);
        std::vector<double> need(n_sub, 0.0);
        for (int64_t i = 0; i < n; ++i)
            if (node_map[i] >= 0) need[node_map[i]] = std::max(0.0, 1.0 - d_other[i]);

        const double gs = opts.step_scale / (2.0 + operator_norm_estimate(Ssub));
        std::vector<double> ws(mz), vs(n_sub, 0.0);
        for (int64_t t = 0; t < mz; ++t) ws[t] = out[z0[t]];
        std::vector<double> ys(mz), ps(ws), qs(mz), ybs(n_sub), pbs(n_sub), qbs(n_sub);
        std::vector<double> Sws(n_sub), Sps(n_sub), Stvs(mz), Stpbs(mz);

        for (int64_t it = 1; it <= opts.max_iter; ++it) {
            degree_apply(Ssub, ws, Sws);
            degree_adjoint(Ssub, vs, Stvs);
            for (int64_t e = 0; e < mz; ++e) ys[e] = ws[e] - gs * (2.0 * ws[e] + Stvs[e]);
            for (int64_t i = 0; i < n_sub; ++i) ybs[i] = vs[i] + gs * Sws[i];
            for (int64_t e = 0; e < mz; ++e) ps[e] = std::max(0.0, ys[e]);
            for (int64_t i = 0; i < n_sub; ++i) pbs[i] = std::min(ybs[i] - gs * need[i], 0.0);
            degree_apply(Ssub, ps, Sps);
            degree_adjoint(Ssub, pbs, Stpbs);
            for (int64_t e = 0; e < mz; ++e) qs[e] = ps[e] - gs * (2.0 * ps[e] + Stpbs[e]);
            for (int64_t i = 0; i < n_sub; ++i) qbs[i] = pbs[i] + gs * Sps[i];
            double dw = 0.0, dv = 0.0;
            for (int64_t e = 0; e < mz; ++e) {
                const double d = qs[e] - ys[e];
                ws[e] += d;
                dw += d * d;
            }
            for (int64_t i = 0; i < n_sub; ++i) {
                const double d = qbs[i] - ybs[i];
                vs[i] += d;
                dv += d * d;
            }
            double nw = 0.0, nv = 0.0;
            for (int64_t e = 0; e < mz; ++e) nw += ws[e] * ws[e];
            for (int64_t i = 0; i < n_sub; ++i) nv += vs[i] * vs[i];
            if (std::max(rel_change(dw, nw), rel_change(dv, nv)) < opts.tol) break;
        }
        for (int64_t t = 0; t < mz; ++t) out[z0[t]] = ps[t];

        std::vector<double> deg(n);
        degree_apply(S, out, deg);
        for (int64_t e : z0) {
            const int64_t i = E.ei[e];
            const int64_t j = E.ej[e];
            const double add = std::max(0.0, std::max(1.0 - deg[i], 1.0 - deg[j]));
            if (add > 0.0) {
                out[e] += add;
                deg[i] += add;
                deg[j] += add;
            }
        }
    }

    if (report.stop_reason == StopReason::converged) {
        std::vector<double> deg(n);
        degree_apply(S, out, deg);
        const double dmin = min_value(deg);
        if (dmin > 0.0 && dmin < 1.0)
            par_for(m, [&](int64_t e) { out[e] /= dmin; });
    }

    SparseWeightedGraph W;
    W.n = n;
    W.ei = E.ei;
    W.ej = E.ej;
    W.w = out;

    quad_apply(S, X, out, rows, quad);
    report.final_objective = chunked_sum(m, [&](int64_t e) { return out[e] * quad[e]; });
    report.wall_time = clock.seconds();
    return {std::move(W), std::move(report)};
}

std::pair<SparseWeightedGraph, SolverReport> learn_daitch_soft(const EdgeCandidateSet& E,
                                                               const FeatureMatrix& X, double mu,
                                                               const SolverOptions& opts) {
    check_options(opts);
    check_distances(E);
    validate_features(X);
    if (E.edge_count() < 1) throw std::invalid_argument("learn_daitch_soft: empty support");
    if (X.n != E.n) throw std::invalid_argument("learn_daitch_soft: feature rows do not match nodes");
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("learn_daitch_soft: mu must be non-negative and finite");

    Stopwatch clock;
    const DegreeOperator S = build_degree_operator(E);
    const int64_t m = S.edge_count();
    const int64_t n = S.n;

    std::vector<double> rows;
    std::vector<double> quad(m), deg(n), slack(n), pen(m);
    double L = power_lambda(m, [&](const std::vector<double>& u, std::vector<double>& out) {
        quad_apply(S, X, u, rows, out);
        degree_apply(S, u, deg);
        degree_adjoint(S, deg, pen);
        par_for(m, [&](int64_t e) { out[e] = 2.0 * out[e] + 2.0 * mu * pen[e]; });
    });
    if (L <= 1e-12) L = 1.0;
    const double step = opts.step_scale / L;

    auto objective = [&](const std::vector<double>& x) {
        quad_apply(S, X, x, rows, quad);
        degree_apply(S, x, deg);
        const double smooth = chunked_sum(m, [&](int64_t e) { return x[e] * quad[e]; });
        const double penalty = chunked_sum(n, [&](int64_t i) {
            const double s = std::max(0.0, 1.0 - deg[i]);
            return s * s;
        });
        return smooth + mu * penalty;
    };

    std::vector<double> w(m, 0.0), yv(m, 0.0), wnew(m), grad(m);
    double t = 1.0;
    SolverReport report;
    double rel = kInf;
    for (int64_t it = 1; it <= opts.max_iter; ++it) {
        quad_apply(S, X, yv, rows, quad);
        degree_apply(S, yv, deg);
        par_for(n, [&](int64_t i) { slack[i] = std::max(0.0, 1.0 - deg[i]); });
        degree_adjoint(S, slack, pen);
        par_for(m, [&](int64_t e) { grad[e] = 2.0 * quad[e] - 2.0 * mu * pen[e]; });
        par_for(m, [&](int64_t e) { wnew[e] = std::max(0.0, yv[e] - step * grad[e]); });

        const double tnew = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / tnew;
        const double dw = chunked_sum(m, [&](int64_t e) {
            const double d = wnew[e] - w[e];
            return d * d;
        });
        par_for(m, [&](int64_t e) { yv[e] = wnew[e] + momentum * (wnew[e] - w[e]); });
        rel = rel_change(dw, norm_sq(wnew));
        w = wnew;
        t = tnew;

        if (opts.record_objective) report.trace.push_back(objective(w));

        report.iterations = it;
        if (rel < opts.tol) {
            report.stop_reason = StopReason::converged;
            break;
        }
    }
    report.rel_change = rel;

    SparseWeightedGraph W;
    W.n = n;
    W.ei = E.ei;
    W.ej = E.ej;
    W.w = w;

    report.final_objective = objective(w);
    report.wall_time = clock.seconds();
    return {std::move(W), std::move(report)};
}

}  // namespace smoothgraph
