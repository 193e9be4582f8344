#pragma once

#include <string>
#include <vector>

#include "smoothgraph/types.hpp"

namespace smoothgraph {

// Feature input. CSV: one row per node, numeric comma-separated columns, an
// optional single header row detected automatically. SGF1: magic "SGF1",
// u64 n, u64 d, then n*d little-endian 64-bit floats, row-major. read_features
// sniffs the magic bytes to pick the format.
FeatureMatrix read_features(const std::string& path);
FeatureMatrix read_features_csv(const std::string& path);
FeatureMatrix read_features_sgf1(const std::string& path);
void write_features_sgf1(const std::string& path, const FeatureMatrix& X);
void write_features_csv(const std::string& path, const FeatureMatrix& X);

// Graph files: TSV lines "i\tj\tvalue" with 0-based i < j, value printed with
// 17 significant digits. The value column is a weight for learned graphs and
// a squared distance for knn output; the format is the same.
void write_edges_tsv(const std::string& path, const SparseWeightedGraph& W);
void write_support_tsv(const std::string& path, const EdgeCandidateSet& E);
SparseWeightedGraph read_edges_tsv(const std::string& path);

// Labels CSV: "node_id,label" rows, optional header. Labels are arbitrary
// strings mapped to dense class ids in first-seen order of the sorted
// distinct label set; nodes absent from the file stay unknown.
struct LabeledNodes {
    LabelVector labels;
    std::vector<std::string> class_names;
};
LabeledNodes read_labels_csv(const std::string& path, int64_t n);

}  // namespace smoothgraph
