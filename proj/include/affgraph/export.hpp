#pragma once

#include <string>
#include <vector>

#include "affgraph/clustering.hpp"
#include "affgraph/evaluation.hpp"

namespace affgraph {

/// Tree with leaf provenance and optional flat cluster ids. Round-trips.
std::string dendrogram_to_json(const Dendrogram& d, const std::vector<std::string>& leaf_ids,
                               const FlatClustering* clustering = nullptr);
void dendrogram_from_json(const std::string& text, Dendrogram& d, std::vector<std::string>& leaf_ids);

/// Graphviz rendering: one node per leaf and merge, leaves labeled with
/// their graph id and filled with a color per flat cluster.
std::string dendrogram_to_dot(const Dendrogram& d, const std::vector<std::string>& leaf_ids,
                              const FlatClustering& clustering);

/// "graph_id<TAB>cluster" lines.
void write_clusters(const std::string& path, const std::vector<std::string>& ids, const FlatClustering& fc);
void read_clusters(const std::string& path, std::vector<std::string>& ids, FlatClustering& fc);

/// "id,cluster,pc1,...,pck" with a header row.
void write_pca_csv(const std::string& path, const std::vector<std::string>& ids, const FlatClustering& fc,
                   const PcaResult& pca);

/// h, c and v to four decimals plus counts.
std::string format_metrics(const VMeasure& m, std::size_t graphs, int clusters, double threshold);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace affgraph
