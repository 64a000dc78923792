#include "affgraph/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "affgraph/error.hpp"

namespace affgraph {

using nlohmann::json;

std::string dendrogram_to_json(const Dendrogram& d, const std::vector<std::string>& leaf_ids,
                               const FlatClustering* clustering) {
  if (leaf_ids.size() != d.leaf_count) throw UsageError("dendrogram export: leaf id count mismatch");
  json leaves = json::array();
  for (std::size_t i = 0; i < d.leaf_count; ++i) {
    json leaf = {{"node", i}, {"id", leaf_ids[i]}};
    if (clustering) leaf["cluster"] = clustering->labels[i];
    leaves.push_back(std::move(leaf));
  }
  json merges = json::array();
  for (std::size_t k = 0; k < d.merges.size(); ++k) {
    const auto& m = d.merges[k];
    merges.push_back({{"node", d.leaf_count + k}, {"children", {m.left, m.right}}, {"height", m.height}, {"size", m.size}});
  }
  return json{{"leaf_count", d.leaf_count}, {"leaves", leaves}, {"merges", merges}}.dump(1) + "\n";
}

void dendrogram_from_json(const std::string& text, Dendrogram& d, std::vector<std::string>& leaf_ids) {
  try {
    const json j = json::parse(text);
    d = {};
    d.leaf_count = j.at("leaf_count").get<std::size_t>();
    leaf_ids.assign(d.leaf_count, {});
    for (const auto& leaf : j.at("leaves")) {
      const auto node = leaf.at("node").get<std::size_t>();
      if (node >= d.leaf_count) throw DataError("dendrogram json: leaf node out of range");
      leaf_ids[node] = leaf.at("id").get<std::string>();
    }
    for (const auto& m : j.at("merges")) {
      const auto& ch = m.at("children");
      d.merges.push_back({ch.at(0).get<int>(), ch.at(1).get<int>(), m.at("height").get<double>(),
                          m.at("size").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("dendrogram json: ") + e.what());
  }
}

std::string dendrogram_to_dot(const Dendrogram& d, const std::vector<std::string>& leaf_ids,
                              const FlatClustering& clustering) {
  if (leaf_ids.size() != d.leaf_count || clustering.labels.size() != d.leaf_count)
    throw UsageError("dendrogram export: size mismatch");
  std::ostringstream out;
  out << "graph dendrogram {\n  node [shape=box, style=filled, fontsize=9];\n";
  const int k = std::max(1, clustering.cluster_count);
  for (std::size_t i = 0; i < d.leaf_count; ++i) {
    char color[32];
    std::snprintf(color, sizeof color, "%.3f 0.45 0.95", static_cast<double>(clustering.labels[i]) / k);
    std::string label = leaf_ids[i];
    for (std::size_t p = 0; (p = label.find('"', p)) != std::string::npos; p += 2) label.insert(p, "\\");
    out << "  n" << i << " [label=\"" << label << "\", fillcolor=\"" << color << "\"];\n";
  }
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    char height[32];
    std::snprintf(height, sizeof height, "%.4f", d.merges[m].height);
    out << "  n" << d.leaf_count + m << " [shape=point, label=\"" << height << "\", xlabel=\"" << height << "\"];\n";
  }
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    out << "  n" << d.leaf_count + m << " -- n" << d.merges[m].left << ";\n";
    out << "  n" << d.leaf_count + m << " -- n" << d.merges[m].right << ";\n";
  }
  out << "}\n";
  return out.str();
}

void write_clusters(const std::string& path, const std::vector<std::string>& ids, const FlatClustering& fc) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << '\t' << fc.labels[i] << '\n';
  write_text(path, out.str());
}

void read_clusters(const std::string& path, std::vector<std::string>& ids, FlatClustering& fc) {
  std::istringstream in(read_text(path));
  ids.clear();
  fc = {};
  std::string line;
  int max_label = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw DataError(path + ": expected graph_id<TAB>cluster");
    ids.push_back(line.substr(0, tab));
    try {
      fc.labels.push_back(std::stoi(line.substr(tab + 1)));
    } catch (const std::exception&) {
      throw DataError(path + ": bad cluster id in '" + line + "'");
    }
    max_label = std::max(max_label, fc.labels.back());
  }
  fc.cluster_count = max_label + 1;
}

void write_pca_csv(const std::string& path, const std::vector<std::string>& ids, const FlatClustering& fc,
                   const PcaResult& pca) {
  std::ostringstream out;
  out << "id,cluster";
  const std::size_t k = pca.explained_variance_ratio.size();
  for (std::size_t c = 0; c < k; ++c) out << ",pc" << c + 1;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i] << ',' << fc.labels[i];
    for (double v : pca.coordinates[i]) {
      std::snprintf(buf, sizeof buf, ",%.10g", v);
      out << buf;
    }
    out << '\n';
  }
  write_text(path, out.str());
}

std::string format_metrics(const VMeasure& m, std::size_t graphs, int clusters, double threshold) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "homogeneity: %.4f\ncompleteness: %.4f\nv_measure: %.4f\ngraphs: %zu\nclusters: %d\nthreshold: %.6g\n",
                m.homogeneity, m.completeness, m.v, graphs, clusters, threshold);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace affgraph
