#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace epl {

enum class LinearLoss { hinge_squared, logistic };

/// Regularized linear binary classifier. The bias is trained as an augmented
/// constant feature, so it participates in the regularizer.
struct LinearModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    LinearLoss trained_with_loss = LinearLoss::hinge_squared;
    double regularization_c = 1.0;
};

/// Trains min_w 1/2 ||w||^2 + C sum_i loss(y_i, w.x_i + b).
/// hinge_squared runs dual coordinate descent with seeded epoch permutations;
/// logistic runs damped Newton iterations (the seed is unused there).
/// Stops when the largest projected-gradient violation (hinge_squared) or
/// gradient component (logistic) drops below 1e-6, or after 1000 epochs.
LinearModel train_binary(const Eigen::MatrixXd& X, const std::vector<int>& y,
                         LinearLoss loss, double C, std::uint64_t seed);

double decision_value(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Sigmoid-squashed decision value in (0, 1).
double probability_value(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// One-vs-rest reduction: model c is trained with class c as +1, rest as -1.
std::vector<LinearModel> train_one_vs_rest(const Eigen::MatrixXd& X,
                                           const std::vector<int>& labels, int class_count,
                                           LinearLoss loss, double C, std::uint64_t seed);

/// Model CSV: "dim,weight" rows followed by a "bias,<value>" row.
void save_linear_model_csv(const LinearModel& model, const std::string& path);

} // namespace epl
