#include "core/manifold.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace epl {

NeighborGraph build_knn_graph(const DescriptorSet& nodes, int reg_group, int k_nn) {
    const std::size_t n = nodes.n_samples();
    if (k_nn < 1 || static_cast<std::size_t>(k_nn) >= n)
        raise(ErrorKind::invalid_argument,
              "k_nn must be in [1, node count); got " + std::to_string(k_nn) + " for " +
                  std::to_string(n) + " nodes");

    const Eigen::MatrixXd dist = averaged_chi2_distances(nodes, nodes, reg_group);
    const double sigma = mean_distance_bandwidth(nodes, reg_group);

    NeighborGraph graph;
    graph.node_ids = nodes.source_ids;
    graph.k_nn = k_nn;
    graph.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        // Nearest first; ties by lowest index. Self excluded below.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double da = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
            const double db = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
            return da != db ? da < db : a < b;
        });
        int taken = 0;
        for (std::size_t r = 0; r < n && taken < k_nn; ++r) {
            const std::size_t j = order[r];
            if (j == i) continue;
            graph.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::exp(-dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
                         sigma);
            ++taken;
        }
    }
    // Union symmetrization keeps every chosen edge.
    graph.weights = graph.weights.cwiseMax(graph.weights.transpose().eval());
    return graph;
}

Eigen::MatrixXd graph_laplacian(const NeighborGraph& graph) {
    Eigen::MatrixXd laplacian = -graph.weights;
    laplacian.diagonal() += graph.weights.rowwise().sum();
    return laplacian;
}

Eigen::MatrixXd normalized_graph_laplacian(const NeighborGraph& graph) {
    const Eigen::VectorXd degree = graph.weights.rowwise().sum();
    Eigen::VectorXd inv_sqrt(degree.size());
    for (Eigen::Index i = 0; i < degree.size(); ++i)
        inv_sqrt[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
    const Eigen::MatrixXd laplacian = graph_laplacian(graph);
    return inv_sqrt.asDiagonal() * laplacian * inv_sqrt.asDiagonal();
}

ManifoldModel train_manifold(const GramMatrix& K, const Eigen::MatrixXd& laplacian,
                             const std::vector<int>& labeled_labels, int class_count,
                             double gamma_ambient, double gamma_intrinsic) {
    const Eigen::Index total = K.values.rows();
    const auto n_labeled = static_cast<Eigen::Index>(labeled_labels.size());
    if (K.values.cols() != total)
        raise(ErrorKind::invalid_argument, "training Gram matrix must be square");
    if (laplacian.rows() != total || laplacian.cols() != total)
        raise(ErrorKind::dimension_mismatch, "Laplacian size does not match Gram size");
    if (n_labeled < 1 || n_labeled > total)
        raise(ErrorKind::invalid_argument, "labeled count out of range");
    if (gamma_ambient < 0.0 || gamma_intrinsic < 0.0)
        raise(ErrorKind::invalid_argument, "gamma parameters must be non-negative");
    if (class_count < 2) raise(ErrorKind::invalid_argument, "need at least 2 classes");
    std::vector<bool> present(static_cast<std::size_t>(class_count), false);
    for (int label : labeled_labels) {
        if (label < 0 || label >= class_count)
            raise(ErrorKind::domain, "label " + std::to_string(label) + " out of range");
        present[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < class_count; ++c)
        if (!present[static_cast<std::size_t>(c)])
            raise(ErrorKind::degenerate_labels,
                  "class " + std::to_string(c) + " missing from labeled set");

    const double l = static_cast<double>(n_labeled);
    const double lu = static_cast<double>(total);

    // System matrix: J K + gamma_A l I + (gamma_I l / (l+u)^2) L K.
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(total, total);
    system.topRows(n_labeled) = K.values.topRows(n_labeled);
    system.diagonal().array() += gamma_ambient * l;
    if (gamma_intrinsic > 0.0)
        system.noalias() += (gamma_intrinsic * l / (lu * lu)) * (laplacian * K.values);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu_decomp(system);
    const double rcond = lu_decomp.rcond();
    if (!(rcond > 1e-14))
        raise(ErrorKind::numerical,
              "manifold system is numerically singular (rcond estimate " +
                  format_double(rcond) + "); increase gamma_A");

    ManifoldModel model;
    model.coefficients.resize(total, class_count);
    model.bias = Eigen::VectorXd::Zero(class_count);
    model.gamma_ambient = gamma_ambient;
    model.gamma_intrinsic = gamma_intrinsic;
    model.kernel_id = K.kernel_id;
    model.bandwidth = K.bandwidth;

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
    for (int c = 0; c < class_count; ++c) {
        for (Eigen::Index i = 0; i < n_labeled; ++i)
            rhs[i] = labeled_labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        model.coefficients.col(c) = lu_decomp.solve(rhs);
    }
    return model;
}

Eigen::VectorXd manifold_scores(const ManifoldModel& model,
                                const Eigen::Ref<const Eigen::VectorXd>& k_row) {
    if (k_row.size() != model.coefficients.rows())
        raise(ErrorKind::dimension_mismatch,
              "manifold_scores: row length " + std::to_string(k_row.size()) +
                  ", model has " + std::to_string(model.coefficients.rows()));
    return model.coefficients.transpose() * k_row + model.bias;
}

void save_graph_csv(const NeighborGraph& graph, const std::string& path) {
    std::ostringstream out;
    out << "i,j,weight\n";
    const Eigen::Index n = graph.weights.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (graph.weights(i, j) != 0.0)
                out << i << "," << j << "," << format_double(graph.weights(i, j)) << "\n";
    write_file(path, out.str());
}

} // namespace epl
