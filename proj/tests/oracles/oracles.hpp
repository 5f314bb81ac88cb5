#pragma once

// Independent brute-force references used by the unit and acceptance suites.
// Nothing here may call into the solver paths it is checking.

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace oracle {

/// Multiscale grid refinement for smooth convex objectives over R^dim.
/// Evaluates a 13^dim grid, re-centers on the argmin and halves the range,
/// `levels` times. Returns the best objective value found.
double grid_minimize(const std::function<double(const Eigen::VectorXd&)>& objective, int dim,
                     double initial_range = 20.0, int levels = 60);

struct DualSolution {
    double objective = 0.0; // max of sum a - 1/2 a'Qa
    Eigen::VectorXd alpha;
};

/// Exact C-SVM dual maximum by enumerating all {lower, upper, free}^n active
/// sets and solving the equality-constrained KKT system on each face.
/// Intended for n <= 9 with non-degenerate kernels.
DualSolution enumerate_svm_dual_max(const Eigen::MatrixXd& K, const std::vector<int>& y,
                                    double C);

/// Average precision by explicit precision@k recounting at every rank.
double ap_bruteforce(const Eigen::VectorXd& scores, const std::vector<bool>& relevance);

/// Indices of the k nearest neighbors of row i (self excluded), sorted by
/// (distance, index), from a full distance matrix.
std::vector<std::size_t> knn_bruteforce(const Eigen::MatrixXd& dist, std::size_t i,
                                        std::size_t k);

} // namespace oracle
