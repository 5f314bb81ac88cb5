#pragma once

#include "core/kernels.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace epl {

/// C-SVM trained on a precomputed Gram matrix. coefficients[i] is alpha_i*y_i
/// over the training rows, so a new point scores
/// sum_i coefficients[i] * k(x_i, x) + bias.
struct KernelModel {
    Eigen::VectorXd coefficients;
    double bias = 0.0;
    std::vector<std::size_t> training_ids;
    KernelId kernel_id = KernelId::linear;
    double bandwidth = 0.0;
    double regularization_c = 1.0;
};

/// Solves the standard C-SVM dual by sequential minimal optimization with
/// deterministic most-violating-pair selection (ties broken by lowest index).
/// Terminates when the KKT violation drops below tol or after 1e5 iterations.
KernelModel train_kernel_binary(const GramMatrix& K, const std::vector<int>& y, double C,
                                double tol = 1e-3, std::uint64_t seed = 0);

/// k_row[i] holds k(x, training sample i).
double kernel_decision(const KernelModel& model, const Eigen::Ref<const Eigen::VectorXd>& k_row);

std::vector<KernelModel> train_kernel_ovr(const GramMatrix& K, const std::vector<int>& labels,
                                          int class_count, double C, double tol = 1e-3,
                                          std::uint64_t seed = 0);

/// Dual objective 1/2 a'Qa - e'a of a trained model (for diagnostics/tests).
double dual_objective(const GramMatrix& K, const std::vector<int>& y,
                      const Eigen::VectorXd& alpha);

} // namespace epl
