#pragma once

#include "core/kernels.hpp"

#include <Eigen/Core>
#include <string>
#include <vector>

namespace epl {

/// Symmetric kNN graph over labeled + unlabeled-train nodes, built on a single
/// designated descriptor group.
struct NeighborGraph {
    std::vector<std::size_t> node_ids;
    Eigen::MatrixXd weights; // symmetric, zero diagonal
    int k_nn = 0;
};

/// Edges from each node to its k_nn nearest neighbors under the chi-square
/// distance on reg_group; weight exp(-d / sigma) with sigma the mean pairwise
/// distance over the nodes; symmetrized by W = max(W, W^T).
NeighborGraph build_knn_graph(const DescriptorSet& nodes, int reg_group, int k_nn);

/// Unnormalized Laplacian L = D - W.
Eigen::MatrixXd graph_laplacian(const NeighborGraph& graph);

/// Optional normalized form D^-1/2 L D^-1/2 (off by default in experiments).
Eigen::MatrixXd normalized_graph_laplacian(const NeighborGraph& graph);

/// Kernel-expansion classifier with a squared-loss manifold penalty.
/// coefficients column c holds the expansion over all l+u nodes for class c.
struct ManifoldModel {
    Eigen::MatrixXd coefficients;
    Eigen::VectorXd bias; // per class; zero for the closed-form solve
    double gamma_ambient = 0.0;
    double gamma_intrinsic = 0.0;
    KernelId kernel_id = KernelId::chi2_exp;
    double bandwidth = 0.0;
};

/// Closed-form per-class solve of
///   a = (J K + gamma_A l I + gamma_I l/(l+u)^2 L K)^-1 J y_c
/// where J marks the first n_labeled rows and y_c is +1/-1 on labeled rows of
/// class c / other classes and 0 on unlabeled rows. K and L must follow the
/// same node ordering, labeled rows first.
ManifoldModel train_manifold(const GramMatrix& K, const Eigen::MatrixXd& laplacian,
                             const std::vector<int>& labeled_labels, int class_count,
                             double gamma_ambient, double gamma_intrinsic);

/// Per-class scores of a point given its kernel row against all nodes.
Eigen::VectorXd manifold_scores(const ManifoldModel& model,
                                const Eigen::Ref<const Eigen::VectorXd>& k_row);

/// Edge-list CSV "i,j,weight" with i < j, only nonzero edges.
void save_graph_csv(const NeighborGraph& graph, const std::string& path);

} // namespace epl
