#pragma once

#include "gsbm/graph.hpp"
#include "gsbm/harness.hpp"
#include "gsbm/inference.hpp"
#include "gsbm/mcgd.hpp"
#include "gsbm/sbm.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gsbm {

/// Undirected edge list: one "u v" pair of labels per line, `#` starts a
/// comment. Labels get dense indices in order of first appearance, after
/// `preset_labels` if given (so "--num-nodes 5" keeps labels "0".."4" at their
/// own index and isolated nodes in the graph). Duplicate edges collapse;
/// self-loops are dropped with a warning. The mask is all-observed.
/// Throws ParseError with the line number for a line without exactly two tokens.
ObservedGraph parse_edge_list(std::string_view text, std::vector<std::string>* warnings = nullptr,
                              const std::vector<std::string>& preset_labels = {});

enum class MaskMode { observed, missing };

MaskMode parse_mask_mode(const std::string& s);

/// Pair list "i j" of dense indices. `observed`: the listed dyads are
/// observed, nothing else. `missing`: every off-diagonal dyad except the
/// listed ones is observed. Pairs with i == j are ignored.
/// Throws ParseError for malformed lines or indices outside [0, n).
SymMatrix parse_mask(std::string_view text, Eigen::Index n, MaskMode mode);

/// "i j" for i < j with a nonzero entry, using `names` when given.
std::string format_edge_list(const SymMatrix& a, const std::vector<std::string>& names = {});

/// "i j" for every i < j with mask_ij == 0 (read back with MaskMode::missing).
std::string format_missing_pairs(const SymMatrix& mask);

/// Two-column "node community" lines keyed by label. Nodes absent from the
/// file, or with a negative community (outliers), get -1. Throws ParseError.
std::vector<int> parse_labels(std::string_view text, const std::vector<std::string>& node_names);

/// Fit artifact, text format "gsbm-fit v1 n=<n>" followed by the sections
/// [config], [nodes], [trace], [L_hat], [S_hat] and [end]. Numbers use the
/// shortest round-trip decimal form, so loading restores every bit.
struct StoredFit {
    FitResult fit;
    std::vector<std::string> node_names;
};

std::string serialize_fit(const FitResult& fit, const std::vector<std::string>& node_names);
/// Throws VersionError for another format version, ParseError otherwise.
StoredFit deserialize_fit(std::string_view text);

void save_fit(const std::filesystem::path& path, const FitResult& fit,
              const std::vector<std::string>& node_names);
StoredFit load_fit(const std::filesystem::path& path);

/// Ground truth summary as JSON: config echo, communities, outliers.
std::string truth_to_json(const GroundTruth& truth);

/// CSV "i,j,score" with node labels.
std::string format_predictions(const Prediction& p, const std::vector<std::string>& names);

/// CSV "node,col_norm,cert_lhs,detected".
std::string format_outlier_report(const OutlierReport& r, const std::vector<std::string>& names);

/// Reads a whole file. Throws InputError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gsbm
