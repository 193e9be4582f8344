#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "smoothgraph/io.hpp"
#include "smoothgraph/parallel.hpp"

using namespace smoothgraph;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SMOOTHGRAPH_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path dir;
    TempDir() {
        char tmpl[] = "/tmp/sg_cli_XXXXXX";
        dir = mkdtemp(tmpl);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Two well-separated blobs in 3-d.
std::string write_blobs_csv(const TempDir& td, int64_t n, uint64_t seed) {
    SplitMix64 rng(seed);
    FeatureMatrix X;
    X.n = n;
    X.d = 3;
    X.data.resize(n * 3);
    for (int64_t i = 0; i < n; ++i) {
        const double center = (i < n / 2) ? 0.0 : 8.0;
        for (int64_t c = 0; c < 3; ++c) {
            const double u1 = rng.next_double();
            const double u2 = rng.next_double();
            X.data[i * 3 + c] =
                center + std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586 * u2);
        }
    }
    const std::string path = td.path("features.csv");
    write_features_csv(path, X);
    return path;
}

void write_path_graph(const std::string& path, int64_t n) {
    SparseWeightedGraph W;
    W.n = n;
    for (int64_t i = 0; i + 1 < n; ++i) {
        W.ei.push_back(i);
        W.ej.push_back(i + 1);
        W.w.push_back(1.0);
    }
    write_edges_tsv(path, W);
}

}  // namespace

TEST_CASE("knn writes a support and reports recall") {
    const TempDir td;
    const std::string input = write_blobs_csv(td, 60, 1);
    const std::string out = td.path("support.tsv");

    const CliResult r = run_cli("knn --input " + input + " --k 3 --r 2 --exact --out " + out);
    REQUIRE(r.exit_code == 0);

    const json j = json::parse(r.out);
    CHECK(j["n"] == 60);
    CHECK(j["m"].get<int64_t>() > 0);
    CHECK(j["mean_recall"] == 1.0);

    const SparseWeightedGraph support = read_edges_tsv(out);
    CHECK(support.edge_count() == j["m"].get<int64_t>());

    const CliResult approx =
        run_cli("knn --input " + input + " --k 3 --r 2 --out " + td.path("s2.tsv"));
    REQUIRE(approx.exit_code == 0);
    CHECK(json::parse(approx.out)["mean_recall"].get<double>() >= 0.9);
}

TEST_CASE("select-theta reports a bracketed value") {
    const TempDir td;
    const std::string input = write_blobs_csv(td, 80, 2);

    const CliResult r = run_cli("select-theta --input " + input + " --k 4 --r 3");
    REQUIRE(r.exit_code == 0);

    const json j = json::parse(r.out);
    CHECK(j["k"] == 4);
    CHECK(j["skipped_columns"].get<int64_t>() >= 0);
    const double theta = j["theta"].get<double>();
    CHECK(theta > 0.0);
    if (!j["theta_lower"].is_null() && !j["theta_upper"].is_null()) {
        CHECK(theta >= j["theta_lower"].get<double>());
        CHECK(theta <= j["theta_upper"].get<double>());
    }
}

TEST_CASE("learn log end to end") {
    const TempDir td;
    const std::string input = write_blobs_csv(td, 100, 3);
    const std::string out = td.path("graph.tsv");
    const std::string report = td.path("report.json");
    const std::string trace = td.path("trace.csv");

    const CliResult r = run_cli("learn --input " + input + " --model log --k 4 --r 3 --out " +
                                out + " --report " + report + " --trace " + trace);
    REQUIRE(r.exit_code == 0);

    const json j = json::parse(r.out);
    CHECK(j["requested_k"] == 4);
    CHECK(j["theta_used"].get<double>() > 0.0);
    const double deg = j["obtained_mean_degree"].get<double>();
    CHECK(deg >= 2.0);
    CHECK(deg <= 8.0);
    CHECK(j["iterations"].get<int64_t>() >= 1);
    CHECK(j["wall_time_ann"].get<double>() >= 0.0);
    CHECK(j["wall_time_solve"].get<double>() >= 0.0);

    const SparseWeightedGraph W = read_edges_tsv(out);
    CHECK(W.edge_count() > 0);

    const json rep = json::parse(read_file(report));
    CHECK(rep.contains("iterations"));
    CHECK(rep.contains("stop_reason"));
    CHECK(rep.contains("kkt_residual"));

    std::ifstream tr(trace);
    std::string header;
    std::getline(tr, header);
    CHECK(header == "iter,objective");
    std::string first_row;
    CHECK(static_cast<bool>(std::getline(tr, first_row)));
}

TEST_CASE("learn is deterministic for a fixed seed") {
    const TempDir td;
    const std::string input = write_blobs_csv(td, 70, 4);
    const std::string g1 = td.path("g1.tsv");
    const std::string g2 = td.path("g2.tsv");

    REQUIRE(run_cli("learn --input " + input + " --model log --k 3 --seed 7 --out " + g1)
                .exit_code == 0);
    REQUIRE(run_cli("learn --input " + input + " --model log --k 3 --seed 7 --out " + g2)
                .exit_code == 0);
    CHECK(read_file(g1) == read_file(g2));
    CHECK(!read_file(g1).empty());
}

TEST_CASE("learn other models run") {
    const TempDir td;
    const std::string input = write_blobs_csv(td, 40, 5);

    for (const std::string model : {"l2", "daitch-hard", "daitch-soft"}) {
        const std::string out = td.path("g_" + model + ".tsv");
        const CliResult r =
            run_cli("learn --input " + input + " --model " + model + " --k 3 --out " + out);
        REQUIRE(r.exit_code == 0);
        CHECK(read_edges_tsv(out).n > 0);
    }
}

TEST_CASE("conflicting or incomplete flags exit with the config code") {
    const TempDir td;
    const std::string input = write_blobs_csv(td, 30, 6);
    const std::string out = td.path("g.tsv");

    CHECK(run_cli("learn --input " + input + " --theta 0.5 --alpha 1 --beta 1 --out " + out)
              .exit_code == 2);
    CHECK(run_cli("learn --input " + input + " --alpha 1 --out " + out).exit_code == 2);
    CHECK(run_cli("learn --input " + input + " --model l2 --beta 2 --out " + out).exit_code == 2);
    CHECK(run_cli("learn --input " + input + " --model daitch-hard --mu 1 --out " + out)
              .exit_code == 2);
    CHECK(run_cli("learn --input " + input + " --model nope --out " + out).exit_code == 2);
    CHECK(run_cli("learn --input " + input + " --k 0 --out " + out).exit_code == 2);
    CHECK(run_cli("bench --d 3").exit_code == 2);
    CHECK(run_cli("eval --graph " + out + " --metric nope").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("missing files exit with the io code") {
    const TempDir td;
    CHECK(run_cli("learn --input /nonexistent.csv --out " + td.path("g.tsv")).exit_code == 3);
    CHECK(run_cli("eval --graph /nonexistent.tsv --metric diameter").exit_code == 3);
}

TEST_CASE("eval diameter and degrees") {
    const TempDir td;
    const std::string g = td.path("path.tsv");
    write_path_graph(g, 4);

    const CliResult dia = run_cli("eval --graph " + g + " --metric diameter");
    REQUIRE(dia.exit_code == 0);
    CHECK(json::parse(dia.out)["diameter"] == 3);
    CHECK(json::parse(dia.out)["components"] == 1);

    const CliResult deg = run_cli("eval --graph " + g + " --metric degrees");
    REQUIRE(deg.exit_code == 0);
    CHECK(json::parse(deg.out)["mean"].get<double>() == doctest::Approx(1.5));
    CHECK(json::parse(deg.out)["isolated"] == 0);
}

TEST_CASE("eval rel-l1 against a reference graph") {
    const TempDir td;
    const std::string g = td.path("g.tsv");
    write_path_graph(g, 5);

    const CliResult same =
        run_cli("eval --graph " + g + " --metric rel-l1 --other-graph " + g);
    REQUIRE(same.exit_code == 0);
    CHECK(json::parse(same.out)["rel_l1_error"] == 0.0);

    CHECK(run_cli("eval --graph " + g + " --metric rel-l1").exit_code == 2);
}

TEST_CASE("eval energy needs features") {
    const TempDir td;
    const std::string g = td.path("g.tsv");
    write_path_graph(g, 3);
    FeatureMatrix X;
    X.n = 3;
    X.d = 1;
    X.data = {0.0, 1.0, 3.0};
    const std::string f = td.path("x.csv");
    write_features_csv(f, X);

    const CliResult r = run_cli("eval --graph " + g + " --metric energy --input " + f);
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["energy"].get<double>() == doctest::Approx(5.0));

    CHECK(run_cli("eval --graph " + g + " --metric energy").exit_code == 2);
}

TEST_CASE("eval connectivity writes the histogram csv") {
    const TempDir td;
    const std::string g = td.path("g.tsv");
    write_path_graph(g, 4);
    const std::string labels = td.path("labels.csv");
    {
        std::ofstream f(labels);
        f << "node_id,label\n0,a\n1,a\n2,b\n3,b\n";
    }
    const std::string hist = td.path("hist.csv");

    const CliResult r = run_cli("eval --graph " + g + " --metric connectivity --labels " +
                                labels + " --out " + hist);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["classes"]["a"].get<double>() == doctest::Approx(1.0 / 3.0));
    CHECK(j["classes"]["b"].get<double>() == doctest::Approx(1.0 / 3.0));
    CHECK(j["wrong"].get<double>() == doctest::Approx(1.0 / 3.0));

    const std::string csv = read_file(hist);
    CHECK(csv.find("class,fraction") == 0);
    CHECK(csv.find("wrong,") != std::string::npos);
}

TEST_CASE("eval labelprop masks labels and scores the holdout") {
    const TempDir td;
    const std::string g = td.path("g.tsv");
    write_path_graph(g, 6);
    const std::string labels = td.path("labels.csv");
    {
        std::ofstream f(labels);
        f << "node_id,label\n0,a\n1,a\n2,a\n3,b\n4,b\n5,b\n";
    }

    const CliResult full = run_cli("eval --graph " + g + " --metric labelprop --labels " + labels);
    REQUIRE(full.exit_code == 0);
    CHECK(json::parse(full.out)["evaluated"] == 0);
    CHECK(json::parse(full.out)["error"].is_null());

    const CliResult held = run_cli("eval --graph " + g + " --metric labelprop --labels " +
                                   labels + " --labeled-fraction 0.34 --seed 3");
    REQUIRE(held.exit_code == 0);
    const json j = json::parse(held.out);
    CHECK(j["evaluated"].get<int64_t>() == 4);
    CHECK(j["error"].get<double>() >= 0.0);
    CHECK(j["error"].get<double>() <= 1.0);
    CHECK(j["sweeps"].get<int64_t>() >= 1);

    CHECK(run_cli("eval --graph " + g + " --metric labelprop").exit_code == 2);
}

TEST_CASE("eval sigma2 turns distances into weights") {
    const TempDir td;
    const std::string g = td.path("dist.tsv");
    {
        SparseWeightedGraph D;
        D.n = 3;
        D.ei = {0, 1};
        D.ej = {1, 2};
        D.w = {1.0, 100.0};
        write_edges_tsv(g, D);
    }
    const CliResult r =
        run_cli("eval --graph " + g + " --metric degrees --sigma2 1.0");
    REQUIRE(r.exit_code == 0);
    // exp(-100) underflows to a positive subnormal, so both edges stay.
    CHECK(json::parse(r.out)["mean"].get<double>() > 0.0);

    CHECK(run_cli("eval --graph " + g + " --metric degrees --sigma2 -1").exit_code == 2);
}

TEST_CASE("bench emits one csv row per size") {
    const TempDir td;
    const std::string out = td.path("bench.csv");
    const CliResult r = run_cli("bench --n 40 --n 80 --d 3 --k 3 --r 2 --out " + out);
    REQUIRE(r.exit_code == 0);

    std::ifstream f(out);
    std::string line;
    std::getline(f, line);
    CHECK(line == "n,k,r,t_ann_seconds,t_solve_seconds,iters");
    int rows = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);

    const CliResult stdout_run = run_cli("bench --n 30 --d 3 --k 3 --r 2");
    REQUIRE(stdout_run.exit_code == 0);
    CHECK(stdout_run.out.find("n,k,r,") == 0);
}

TEST_CASE("help exits zero") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("learn --help").exit_code == 0);
}
