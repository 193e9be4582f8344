#include "smoothgraph/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "smoothgraph/core.hpp"

namespace smoothgraph {

namespace {

[[noreturn]] void io_fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(line);
    while (std::getline(ss, tok, delim)) out.push_back(tok);
    return out;
}

bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

uint64_t load_u64_le(const unsigned char* b) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

void store_u64_le(uint64_t v, unsigned char* b) {
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
}

}  // namespace

FeatureMatrix read_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open");
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, "SGF1", 4) == 0) return read_features_sgf1(path);
    return read_features_csv(path);
}

FeatureMatrix read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) io_fail(path, "cannot open");
    FeatureMatrix X;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto toks = split(line, ',');
        std::vector<double> row(toks.size());
        bool numeric = true;
        for (size_t c = 0; c < toks.size(); ++c)
            if (!parse_double(toks[c], row[c])) {
                numeric = false;
                break;
            }
        if (!numeric) {
            if (first) {
                first = false;  // single header row
                continue;
            }
            io_fail(path, "non-numeric value outside the header row");
        }
        first = false;
        if (X.d == 0)
            X.d = static_cast<int64_t>(row.size());
        else if (X.d != static_cast<int64_t>(row.size()))
            io_fail(path, "inconsistent column count");
        X.data.insert(X.data.end(), row.begin(), row.end());
        ++X.n;
    }
    if (X.n == 0) io_fail(path, "no data rows");
    validate_features(X);
    return X;
}

FeatureMatrix read_features_sgf1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open");
    unsigned char header[20];
    in.read(reinterpret_cast<char*>(header), 20);
    if (in.gcount() != 20 || std::memcmp(header, "SGF1", 4) != 0)
        io_fail(path, "not an SGF1 file");
    FeatureMatrix X;
    X.n = static_cast<int64_t>(load_u64_le(header + 4));
    X.d = static_cast<int64_t>(load_u64_le(header + 12));
    if (X.n < 1 || X.d < 1 || X.n > (int64_t{1} << 40) || X.d > (int64_t{1} << 30))
        io_fail(path, "implausible SGF1 dimensions");
    const int64_t total = X.n * X.d;
    std::vector<unsigned char> raw(static_cast<size_t>(total) * 8);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) io_fail(path, "truncated SGF1 payload");
    X.data.resize(total);
    for (int64_t i = 0; i < total; ++i)
        X.data[i] = std::bit_cast<double>(load_u64_le(raw.data() + i * 8));
    validate_features(X);
    return X;
}

void write_features_sgf1(const std::string& path, const FeatureMatrix& X) {
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    unsigned char header[20];
    std::memcpy(header, "SGF1", 4);
    store_u64_le(static_cast<uint64_t>(X.n), header + 4);
    store_u64_le(static_cast<uint64_t>(X.d), header + 12);
    out.write(reinterpret_cast<const char*>(header), 20);
    const int64_t total = X.n * X.d;
    std::vector<unsigned char> raw(static_cast<size_t>(total) * 8);
    for (int64_t i = 0; i < total; ++i)
        store_u64_le(std::bit_cast<uint64_t>(X.data[i]), raw.data() + i * 8);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) io_fail(path, "write failed");
}

void write_features_csv(const std::string& path, const FeatureMatrix& X) {
    std::ofstream out(path);
    if (!out) io_fail(path, "cannot open for writing");
    char buf[64];
    for (int64_t i = 0; i < X.n; ++i) {
        for (int64_t c = 0; c < X.d; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", X.at(i, c));
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) io_fail(path, "write failed");
}

namespace {

void write_tsv(const std::string& path, int64_t m, const int64_t* ei, const int64_t* ej,
               const double* val) {
    std::ofstream out(path);
    if (!out) io_fail(path, "cannot open for writing");
    char buf[64];
    for (int64_t e = 0; e < m; ++e) {
        std::snprintf(buf, sizeof(buf), "%.17g", val[e]);
        out << ei[e] << '\t' << ej[e] << '\t' << buf << '\n';
    }
    if (!out) io_fail(path, "write failed");
}

}  // namespace

void write_edges_tsv(const std::string& path, const SparseWeightedGraph& W) {
    write_tsv(path, W.edge_count(), W.ei.data(), W.ej.data(), W.w.data());
}

void write_support_tsv(const std::string& path, const EdgeCandidateSet& E) {
    write_tsv(path, E.edge_count(), E.ei.data(), E.ej.data(), E.z.data());
}

SparseWeightedGraph read_edges_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) io_fail(path, "cannot open");
    SparseWeightedGraph W;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int64_t i = 0, j = 0;
        double v = 0.0;
        char extra;
        if (std::sscanf(line.c_str(), "%ld\t%ld\t%lf %c", &i, &j, &v, &extra) != 3)
            io_fail(path, "malformed TSV at line " + std::to_string(lineno));
        if (i < 0 || j <= i || !std::isfinite(v) || v < 0.0)
            io_fail(path, "invalid edge at line " + std::to_string(lineno));
        W.ei.push_back(i);
        W.ej.push_back(j);
        W.w.push_back(v);
        W.n = std::max(W.n, j + 1);
    }
    return W;
}

LabeledNodes read_labels_csv(const std::string& path, int64_t n) {
    std::ifstream in(path);
    if (!in) io_fail(path, "cannot open");
    std::vector<std::pair<int64_t, std::string>> rows;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto toks = split(line, ',');
        if (toks.size() != 2) io_fail(path, "expected node_id,label at line " + std::to_string(lineno));
        double id;
        if (!parse_double(toks[0], id)) {
            if (lineno == 1) continue;  // header
            io_fail(path, "non-numeric node id at line " + std::to_string(lineno));
        }
        const int64_t node = static_cast<int64_t>(id);
        if (node < 0 || node >= n) io_fail(path, "node id out of range at line " + std::to_string(lineno));
        rows.emplace_back(node, toks[1]);
    }
    std::map<std::string, int64_t> classes;
    for (const auto& [node, name] : rows) classes.emplace(name, 0);
    LabeledNodes out;
    out.class_names.reserve(classes.size());
    for (auto& [name, id] : classes) {
        id = static_cast<int64_t>(out.class_names.size());
        out.class_names.push_back(name);
    }
    out.labels.n = n;
    out.labels.labels.assign(n, LabelVector::unknown);
    for (const auto& [node, name] : rows) out.labels.labels[node] = classes[name];
    return out;
}

}  // namespace smoothgraph
