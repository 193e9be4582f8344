#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smoothgraph/autoparam.hpp"
#include "smoothgraph/core.hpp"
#include "smoothgraph/eval.hpp"
#include "smoothgraph/io.hpp"
#include "smoothgraph/neighbors.hpp"
#include "smoothgraph/parallel.hpp"
#include "smoothgraph/solvers.hpp"
#include "smoothgraph/types.hpp"

namespace sg = smoothgraph;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInfeasible = 4;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// NaN and infinity have no JSON encoding; emit null for them.
json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int64_t list_size(int64_t n, int64_t k, int64_t r) { return std::min(k * r, n - 1); }

struct KnnConfig {
    std::string input;
    std::string out;
    int64_t k = 10;
    int64_t r = 3;
    bool exact = false;
    uint64_t seed = 42;
};

int run_knn(const KnnConfig& cfg) {
    const sg::FeatureMatrix X = sg::read_features(cfg.input);
    const int64_t m = list_size(X.n, cfg.k, cfg.r);
    if (m < 1) throw std::invalid_argument("knn: need at least two nodes");

    sg::NeighborLists lists;
    double recall = 1.0;
    if (cfg.exact) {
        lists = sg::knn_exact(X, m);
    } else {
        sg::AnnParams params;
        params.seed = cfg.seed;
        lists = sg::knn_approx(X, m, params);
        recall = sg::estimate_recall(X, lists);
    }
    const sg::EdgeCandidateSet E = sg::build_allowed_support(lists, cfg.k, cfg.r, X);
    sg::write_support_tsv(cfg.out, E);

    emit(json{{"n", E.n}, {"m", E.edge_count()}, {"mean_recall", recall}});
    return 0;
}

struct SelectThetaConfig {
    std::string input;
    int64_t k = 10;
    int64_t r = 3;
    uint64_t seed = 42;
};

int run_select_theta(const SelectThetaConfig& cfg) {
    const sg::FeatureMatrix X = sg::read_features(cfg.input);
    const int64_t m = list_size(X.n, cfg.k, cfg.r);
    if (m < 1) throw std::invalid_argument("select-theta: need at least two nodes");

    sg::AnnParams params;
    params.seed = cfg.seed;
    const sg::NeighborLists lists = sg::knn_approx(X, m, params);
    const sg::EdgeCandidateSet E = sg::build_allowed_support(lists, cfg.k, cfg.r, X);

    const sg::ThetaInterval iv = sg::theta_interval_graph(E, cfg.k);
    if (iv.support_too_small)
        std::cerr << "warning: " << iv.skipped_columns << " of " << E.n
                  << " nodes have fewer than k+1 candidate edges; "
                     "the theta interval may be unreliable\n";
    const double theta = sg::select_theta(iv);

    emit(json{{"k", iv.k},
              {"theta_lower", number_or_null(iv.lower)},
              {"theta_upper", number_or_null(iv.upper)},
              {"theta", theta},
              {"skipped_columns", iv.skipped_columns}});
    return 0;
}

struct LearnConfig {
    std::string input;
    std::string model = "log";
    int64_t k = 10;
    int64_t r = 3;
    double theta = 0.0;
    bool has_theta = false;
    double alpha = 0.0;
    bool has_alpha = false;
    double beta = 0.0;
    bool has_beta = false;
    double mu = 1.0;
    bool has_mu = false;
    int64_t max_iter = 500;
    double tol = 1e-4;
    uint64_t seed = 42;
    std::string out;
    std::string report_path;
    std::string trace_path;
};

void write_report_json(const std::string& path, const sg::SolverReport& rep) {
    json j{{"iterations", rep.iterations},
           {"stop_reason", rep.stop_reason == sg::StopReason::converged ? "converged" : "max_iter"},
           {"final_objective", number_or_null(rep.final_objective)},
           {"rel_change", rep.rel_change},
           {"wall_time", rep.wall_time},
           {"kkt_residual", number_or_null(rep.kkt_residual)}};
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f << j.dump(2) << "\n";
}

void write_trace_csv(const std::string& path, const std::vector<double>& trace) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f << "iter,objective\n";
    for (size_t i = 0; i < trace.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, trace[i]);
        f << buf;
    }
}

int run_learn(const LearnConfig& cfg) {
    if (cfg.model == "log") {
        if (cfg.has_mu) throw std::invalid_argument("--mu applies to daitch-soft only");
        if (cfg.has_alpha != cfg.has_beta)
            throw std::invalid_argument("--alpha and --beta must be given together");
    } else if (cfg.model == "l2") {
        if (cfg.has_beta || cfg.has_mu)
            throw std::invalid_argument("--beta/--mu do not apply to the l2 model");
    } else if (cfg.model == "daitch-hard") {
        if (cfg.has_theta || cfg.has_alpha || cfg.has_beta || cfg.has_mu)
            throw std::invalid_argument("daitch-hard takes no model parameters");
    } else if (cfg.model == "daitch-soft") {
        if (cfg.has_theta || cfg.has_alpha || cfg.has_beta)
            throw std::invalid_argument("daitch-soft takes only --mu");
    }

    const sg::FeatureMatrix X = sg::read_features(cfg.input);
    const int64_t m = list_size(X.n, cfg.k, cfg.r);
    if (m < 1) throw std::invalid_argument("learn: need at least two nodes");

    const double t0 = now_seconds();
    sg::AnnParams params;
    params.seed = cfg.seed;
    const sg::NeighborLists lists = sg::knn_approx(X, m, params);
    sg::EdgeCandidateSet E = sg::build_allowed_support(lists, cfg.k, cfg.r, X);
    const double t_ann = now_seconds() - t0;

    sg::SolverOptions opts;
    opts.max_iter = cfg.max_iter;
    opts.tol = cfg.tol;
    opts.record_objective = !cfg.trace_path.empty();

    const double t1 = now_seconds();
    sg::SparseWeightedGraph W;
    sg::SolverReport rep;
    double theta_used = std::numeric_limits<double>::quiet_NaN();

    if (cfg.model == "log") {
        double theta;
        if (cfg.has_theta) {
            theta = cfg.theta;
        } else if (cfg.has_alpha) {
            theta = 1.0 / std::sqrt(cfg.alpha * cfg.beta);
        } else {
            theta = sg::select_theta(E, cfg.k);
        }
        sg::EdgeCandidateSet scaled = E;
        for (double& z : scaled.z) z *= theta;
        std::tie(W, rep) = sg::learn_log_graph(scaled, 1.0, 1.0, opts);
        if (cfg.has_alpha) W = sg::rescale_solution(W, cfg.alpha, cfg.beta);
        theta_used = theta;
    } else if (cfg.model == "l2") {
        sg::EdgeCandidateSet scaled = E;
        if (cfg.has_theta) {
            for (double& z : scaled.z) z *= cfg.theta;
            theta_used = cfg.theta;
        }
        const double alpha = cfg.has_alpha ? cfg.alpha : 1.0;
        std::tie(W, rep) = sg::learn_l2_graph(scaled, alpha, opts);
    } else if (cfg.model == "daitch-hard") {
        std::tie(W, rep) = sg::learn_daitch_hard(E, X, opts);
    } else {
        std::tie(W, rep) = sg::learn_daitch_soft(E, X, cfg.mu, opts);
    }
    const double t_solve = now_seconds() - t1;

    // Keep only the edges that carry weight; the candidate support is
    // reproducible from the knn subcommand.
    sg::SparseWeightedGraph sparse;
    sparse.n = W.n;
    for (int64_t e = 0; e < W.edge_count(); ++e) {
        if (W.w[e] <= 0.0) continue;
        sparse.ei.push_back(W.ei[e]);
        sparse.ej.push_back(W.ej[e]);
        sparse.w.push_back(W.w[e]);
    }
    sg::write_edges_tsv(cfg.out, sparse);
    if (!cfg.report_path.empty()) write_report_json(cfg.report_path, rep);
    if (!cfg.trace_path.empty()) write_trace_csv(cfg.trace_path, rep.trace);

    emit(json{{"theta_used", number_or_null(theta_used)},
              {"requested_k", cfg.k},
              {"obtained_mean_degree", sg::degree_stats(W).mean},
              {"iterations", rep.iterations},
              {"wall_time_ann", t_ann},
              {"wall_time_solve", t_solve}});
    return 0;
}

struct EvalConfig {
    std::string graph;
    std::string labels;
    std::string metric;
    std::string other_graph;
    std::string input;
    std::string out;
    double labeled_fraction = 1.0;
    uint64_t seed = 42;
    double sigma2 = 0.0;
    bool has_sigma2 = false;
};

// Keep a deterministic sample of the known labels, hide the rest.
sg::LabelVector mask_labels(const sg::LabelVector& full, double fraction, uint64_t seed) {
    std::vector<int64_t> known;
    for (int64_t i = 0; i < full.n; ++i)
        if (full.labels[i] >= 0) known.push_back(i);
    if (known.empty()) throw std::invalid_argument("labels file has no known labels");

    sg::SplitMix64 rng(seed);
    for (size_t i = known.size(); i > 1; --i)
        std::swap(known[i - 1], known[rng.next_below(i)]);
    const size_t keep = std::max<size_t>(
        1, static_cast<size_t>(std::llround(fraction * static_cast<double>(known.size()))));

    sg::LabelVector masked;
    masked.n = full.n;
    masked.labels.assign(full.n, sg::LabelVector::unknown);
    for (size_t t = 0; t < keep && t < known.size(); ++t)
        masked.labels[known[t]] = full.labels[known[t]];
    return masked;
}

int run_eval(const EvalConfig& cfg) {
    sg::SparseWeightedGraph G = sg::read_edges_tsv(cfg.graph);
    if (cfg.has_sigma2) {
        if (!(cfg.sigma2 > 0.0)) throw std::invalid_argument("--sigma2 must be positive");
        for (double& w : G.w) w = std::exp(-w / cfg.sigma2);
    }

    if (cfg.metric == "diameter") {
        const sg::DiameterResult R = sg::graph_diameter(G);
        emit(json{{"diameter", R.diameter}, {"components", R.components}});
        return 0;
    }

    if (cfg.metric == "degrees") {
        const sg::DegreeStats D = sg::degree_stats(G);
        emit(json{{"mean", D.mean}, {"min", D.min}, {"max", D.max}, {"isolated", D.isolated}});
        return 0;
    }

    if (cfg.metric == "energy") {
        if (cfg.input.empty()) throw std::invalid_argument("--metric energy needs --input features");
        const sg::FeatureMatrix X = sg::read_features(cfg.input);
        emit(json{{"energy", sg::dirichlet_energy(X, G)}});
        return 0;
    }

    if (cfg.metric == "rel-l1") {
        if (cfg.other_graph.empty())
            throw std::invalid_argument("--metric rel-l1 needs --other-graph as the reference");
        const sg::SparseWeightedGraph B = sg::read_edges_tsv(cfg.other_graph);
        emit(json{{"rel_l1_error", sg::rel_l1_error(G, B)}});
        return 0;
    }

    if (cfg.metric == "connectivity") {
        if (cfg.labels.empty()) throw std::invalid_argument("--metric connectivity needs --labels");
        const sg::LabeledNodes L = sg::read_labels_csv(cfg.labels, G.n);
        const sg::ConnectivityHistogram H = sg::connectivity_histogram(G, L.labels);
        json classes = json::object();
        for (size_t t = 0; t < H.classes.size(); ++t)
            classes[L.class_names[H.classes[t]]] = H.intra[t];
        emit(json{{"classes", classes}, {"wrong", H.wrong}});
        if (!cfg.out.empty()) {
            std::ofstream f(cfg.out);
            if (!f) throw std::runtime_error(cfg.out + ": cannot open for writing");
            f << "class,fraction\n";
            for (size_t t = 0; t < H.classes.size(); ++t) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), ",%.17g\n", H.intra[t]);
                f << L.class_names[H.classes[t]] << buf;
            }
            char buf[64];
            std::snprintf(buf, sizeof(buf), "wrong,%.17g\n", H.wrong);
            f << buf;
        }
        return 0;
    }

    if (cfg.metric == "labelprop") {
        if (cfg.labels.empty()) throw std::invalid_argument("--metric labelprop needs --labels");
        const sg::LabeledNodes L = sg::read_labels_csv(cfg.labels, G.n);
        const sg::LabelVector masked =
            cfg.labeled_fraction < 1.0 ? mask_labels(L.labels, cfg.labeled_fraction, cfg.seed)
                                       : L.labels;
        const sg::PropagationResult R = sg::label_propagation(G, masked);

        int64_t evaluated = 0;
        int64_t wrong = 0;
        for (int64_t i = 0; i < G.n; ++i) {
            if (masked.labels[i] >= 0) continue;          // was visible to the solver
            if (L.labels.labels[i] < 0) continue;         // no ground truth
            if (R.predicted.labels[i] < 0) continue;      // unclassifiable
            ++evaluated;
            if (R.predicted.labels[i] != L.labels.labels[i]) ++wrong;
        }
        json err = nullptr;
        if (evaluated > 0) err = static_cast<double>(wrong) / static_cast<double>(evaluated);
        emit(json{{"error", err},
                  {"evaluated", evaluated},
                  {"unclassifiable", R.unclassifiable},
                  {"sweeps", R.sweeps}});
        return 0;
    }

    throw std::invalid_argument("unknown metric: " + cfg.metric);
}

struct BenchConfig {
    std::vector<int64_t> sizes;
    int64_t d = 10;
    int64_t k = 10;
    int64_t r = 3;
    uint64_t seed = 42;
    std::string out;
};

sg::FeatureMatrix gaussian_cloud(int64_t n, int64_t d, uint64_t seed) {
    sg::FeatureMatrix X;
    X.n = n;
    X.d = d;
    X.data.resize(static_cast<size_t>(n) * d);
    sg::SplitMix64 rng(seed);
    for (double& v : X.data) {
        const double u1 = rng.next_double();
        const double u2 = rng.next_double();
        v = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    return X;
}

int run_bench(const BenchConfig& cfg) {
    std::string csv = "n,k,r,t_ann_seconds,t_solve_seconds,iters\n";
    for (const int64_t n : cfg.sizes) {
        if (n < 2) throw std::invalid_argument("bench: sizes must be >= 2");
        const sg::FeatureMatrix X = gaussian_cloud(n, cfg.d, cfg.seed);
        const int64_t m = list_size(n, cfg.k, cfg.r);

        const double t0 = now_seconds();
        sg::AnnParams params;
        params.seed = cfg.seed;
        const sg::NeighborLists lists = sg::knn_approx(X, m, params);
        const sg::EdgeCandidateSet E = sg::build_allowed_support(lists, cfg.k, cfg.r, X);
        const double t_ann = now_seconds() - t0;

        const double t1 = now_seconds();
        const double theta = sg::select_theta(E, cfg.k);
        sg::EdgeCandidateSet scaled = E;
        for (double& z : scaled.z) z *= theta;
        const auto [W, rep] = sg::learn_log_graph(scaled, 1.0, 1.0);
        const double t_solve = now_seconds() - t1;

        char row[160];
        std::snprintf(row, sizeof(row), "%lld,%lld,%lld,%.6f,%.6f,%lld\n",
                      static_cast<long long>(n), static_cast<long long>(cfg.k),
                      static_cast<long long>(cfg.r), t_ann, t_solve,
                      static_cast<long long>(rep.iterations));
        csv += row;
    }
    if (cfg.out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error(cfg.out + ": cannot open for writing");
        f << csv;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smoothgraph: learn sparse graphs on which the given signals are smooth"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = auto)");

    KnnConfig knn_cfg;
    CLI::App* knn = app.add_subcommand("knn", "Build a k*r nearest-neighbor candidate support");
    knn->add_option("--input", knn_cfg.input, "Feature file (CSV or SGF1)")->required();
    knn->add_option("--k", knn_cfg.k, "Target degree")->required()->check(CLI::PositiveNumber);
    knn->add_option("--r", knn_cfg.r, "Oversampling factor")->check(CLI::PositiveNumber);
    auto* exact_flag = knn->add_flag("--exact", knn_cfg.exact, "Brute-force neighbors");
    knn->add_flag("--approx", "NN-Descent neighbors (default)")->excludes(exact_flag);
    knn->add_option("--seed", knn_cfg.seed, "Random seed");
    knn->add_option("--out", knn_cfg.out, "Edge TSV output (i, j, squared distance)")->required();

    SelectThetaConfig st_cfg;
    CLI::App* st = app.add_subcommand("select-theta", "Pick the sparsity parameter for a degree");
    st->add_option("--input", st_cfg.input, "Feature file (CSV or SGF1)")->required();
    st->add_option("--k", st_cfg.k, "Target degree")->required()->check(CLI::PositiveNumber);
    st->add_option("--r", st_cfg.r, "Oversampling factor")->check(CLI::PositiveNumber);
    st->add_option("--seed", st_cfg.seed, "Random seed");

    LearnConfig learn_cfg;
    CLI::App* learn = app.add_subcommand("learn", "Learn edge weights on a candidate support");
    learn->add_option("--input", learn_cfg.input, "Feature file (CSV or SGF1)")->required();
    learn->add_option("--model", learn_cfg.model, "log | l2 | daitch-hard | daitch-soft")
        ->check(CLI::IsMember({"log", "l2", "daitch-hard", "daitch-soft"}));
    learn->add_option("--k", learn_cfg.k, "Target degree")->check(CLI::PositiveNumber);
    learn->add_option("--r", learn_cfg.r, "Oversampling factor")->check(CLI::PositiveNumber);
    auto* theta_opt = learn->add_option("--theta", learn_cfg.theta, "Sparsity parameter");
    auto* alpha_opt = learn->add_option("--alpha", learn_cfg.alpha, "Degree term weight");
    auto* beta_opt = learn->add_option("--beta", learn_cfg.beta, "Density term weight");
    theta_opt->excludes(alpha_opt)->excludes(beta_opt);
    learn->add_option("--mu", learn_cfg.mu, "Degree penalty weight (daitch-soft)");
    learn->add_option("--max-iter", learn_cfg.max_iter, "Iteration cap")
        ->check(CLI::PositiveNumber);
    learn->add_option("--tol", learn_cfg.tol, "Relative-change stop tolerance");
    learn->add_option("--seed", learn_cfg.seed, "Random seed");
    learn->add_option("--out", learn_cfg.out, "Edge TSV output")->required();
    learn->add_option("--report", learn_cfg.report_path, "Solver report JSON path");
    learn->add_option("--trace", learn_cfg.trace_path, "Per-iteration objective CSV path");

    EvalConfig eval_cfg;
    CLI::App* ev = app.add_subcommand("eval", "Metrics on a learned graph");
    ev->add_option("--graph", eval_cfg.graph, "Edge TSV")->required();
    ev->add_option("--metric", eval_cfg.metric,
                   "diameter | labelprop | connectivity | energy | degrees | rel-l1")
        ->required()
        ->check(CLI::IsMember(
            {"diameter", "labelprop", "connectivity", "energy", "degrees", "rel-l1"}));
    ev->add_option("--labels", eval_cfg.labels, "Labels CSV (node_id,label)");
    ev->add_option("--other-graph", eval_cfg.other_graph, "Reference edge TSV for rel-l1");
    ev->add_option("--input", eval_cfg.input, "Feature file (for energy)");
    ev->add_option("--labeled-fraction", eval_cfg.labeled_fraction,
                   "Fraction of known labels kept visible")
        ->check(CLI::Range(0.0, 1.0));
    ev->add_option("--seed", eval_cfg.seed, "Random seed for label masking");
    ev->add_option("--sigma2", eval_cfg.sigma2,
                   "Turn stored squared distances into weights exp(-z / sigma2)");
    ev->add_option("--out", eval_cfg.out, "Histogram CSV path (connectivity)");

    BenchConfig bench_cfg;
    CLI::App* bench = app.add_subcommand("bench", "Time the pipeline on synthetic clouds");
    bench->add_option("--n", bench_cfg.sizes, "Point counts, one run each")->required();
    bench->add_option("--d", bench_cfg.d, "Feature dimension")->check(CLI::PositiveNumber);
    bench->add_option("--k", bench_cfg.k, "Target degree")->check(CLI::PositiveNumber);
    bench->add_option("--r", bench_cfg.r, "Oversampling factor")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_cfg.seed, "Random seed");
    bench->add_option("--out", bench_cfg.out, "CSV path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    learn_cfg.has_theta = theta_opt->count() > 0;
    learn_cfg.has_alpha = alpha_opt->count() > 0;
    learn_cfg.has_beta = beta_opt->count() > 0;
    learn_cfg.has_mu = learn->get_option("--mu")->count() > 0;
    eval_cfg.has_sigma2 = ev->get_option("--sigma2")->count() > 0;

    try {
        sg::set_threads(sg::resolve_threads(threads));
        if (knn->parsed()) return run_knn(knn_cfg);
        if (st->parsed()) return run_select_theta(st_cfg);
        if (learn->parsed()) return run_learn(learn_cfg);
        if (ev->parsed()) return run_eval(eval_cfg);
        if (bench->parsed()) return run_bench(bench_cfg);
        std::cerr << "error: no subcommand\n";
        return kExitConfig;
    } catch (const sg::infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
