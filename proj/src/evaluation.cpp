#include "affgraph/evaluation.hpp"

#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "affgraph/error.hpp"

namespace affgraph {

namespace {

double entropy(const std::map<int, double>& counts, double total) {
  double h = 0;
  for (const auto& [_, c] : counts)
    if (c > 0) h -= (c / total) * std::log(c / total);
  return h;
}

}  // namespace

VMeasure v_measure(const std::vector<std::vector<std::string>>& truth, const std::vector<int>& clusters) {
  if (truth.size() != clusters.size()) throw UsageError("v_measure: label and cluster counts differ");
  std::map<std::string, int> class_id;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> class_count, cluster_count;
  double n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (const auto& label : truth[i]) {
      const int c = class_id.emplace(label, static_cast<int>(class_id.size())).first->second;
      const int k = clusters[i];
      joint[{c, k}] += 1;
      class_count[c] += 1;
      cluster_count[k] += 1;
      n += 1;
    }
  }
  if (n == 0) throw DataError("v_measure: no labeled datapoints");

  const double h_class = entropy(class_count, n);
  const double h_cluster = entropy(cluster_count, n);
  double h_class_given_cluster = 0, h_cluster_given_class = 0;
  for (const auto& [ck, nck] : joint) {
    const auto [c, k] = ck;
    h_class_given_cluster -= (nck / n) * std::log(nck / cluster_count[k]);
    h_cluster_given_class -= (nck / n) * std::log(nck / class_count[c]);
  }
  VMeasure m;
  m.homogeneity = h_class == 0 ? 1.0 : 1.0 - h_class_given_cluster / h_class;
  m.completeness = h_cluster == 0 ? 1.0 : 1.0 - h_cluster_given_class / h_cluster;
  m.v = m.homogeneity + m.completeness == 0
            ? 0.0
            : 2.0 * m.homogeneity * m.completeness / (m.homogeneity + m.completeness);
  return m;
}

PcaResult pca_project(const EmbeddingTable& points, int k) {
  if (points.empty()) throw DataError("pca_project: no points");
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto dim = static_cast<Eigen::Index>(points.front().size());
  if (k <= 0 || k > dim) throw UsageError("pca_project: k must lie in [1, dimension]");
  if (n < k + 1) throw UsageError("pca_project: need at least k+1 points");

  Eigen::MatrixXd X(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(points[static_cast<std::size_t>(i)].size()) != dim)
      throw DataError("pca_project: ragged embedding table");
    for (Eigen::Index j = 0; j < dim; ++j) X(i, j) = points[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  X.rowwise() -= X.colwise().mean();
  const Eigen::MatrixXd cov = (X.transpose() * X) / static_cast<double>(n > 1 ? n - 1 : 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("pca_project: eigen decomposition failed");

  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = solver.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  const double total = std::max(values.sum(), 0.0);
  const double tol = 1e-12 * std::max(1.0, values(0));

  PcaResult out;
  out.coordinates.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int c = 0; c < k; ++c) {
    if (values(c) <= tol) {
      out.warnings.push_back("component " + std::to_string(c + 1) + " has no variance; padded with zeros");
      out.explained_variance_ratio.push_back(0.0);
      continue;
    }
    Eigen::VectorXd proj = X * vectors.col(c);
    Eigen::Index arg = 0;
    proj.cwiseAbs().maxCoeff(&arg);
    if (proj(arg) < 0) proj = -proj;
    for (Eigen::Index i = 0; i < n; ++i) out.coordinates[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = proj(i);
    out.explained_variance_ratio.push_back(total > 0 ? values(c) / total : 0.0);
  }
  return out;
}

}  // namespace affgraph
