#include "core/kernel_svm.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace epl {

namespace {

constexpr double kTau = 1e-12; // floor for the working-set second derivative
constexpr long kMaxIterations = 100000;

void check_gram(const GramMatrix& K) {
    if (K.values.rows() != K.values.cols())
        raise(ErrorKind::invalid_argument, "training Gram matrix must be square");
    const Eigen::Index n = K.values.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(K.values(i, j) - K.values(j, i)) > 1e-12)
                raise(ErrorKind::invalid_argument, "training Gram matrix is not symmetric");
}

} // namespace

double dual_objective(const GramMatrix& K, const std::vector<int>& y,
                      const Eigen::VectorXd& alpha) {
    const Eigen::Index n = alpha.size();
    double quad = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            quad += alpha[i] * alpha[j] * y[static_cast<std::size_t>(i)] *
                    y[static_cast<std::size_t>(j)] * K.values(i, j);
    return 0.5 * quad - alpha.sum();
}

KernelModel train_kernel_binary(const GramMatrix& K, const std::vector<int>& y, double C,
                                double tol, std::uint64_t seed) {
    (void)seed; // pair selection is deterministic; kept for interface stability
    check_gram(K);
    const Eigen::Index n = K.values.rows();
    if (static_cast<std::size_t>(n) != y.size())
        raise(ErrorKind::dimension_mismatch, "Gram size does not match label count");
    if (!(C > 0.0)) raise(ErrorKind::invalid_argument, "C must be positive");
    bool pos = false, neg = false;
    for (int yi : y) {
        if (yi == 1) pos = true;
        else if (yi == -1) neg = true;
        else raise(ErrorKind::invalid_argument, "labels must be +1 or -1");
    }
    if (!pos || !neg)
        raise(ErrorKind::degenerate_labels, "training needs at least one example of each sign");

    // min_a 1/2 a'Qa - e'a,  Q_ij = y_i y_j K_ij,  0 <= a <= C,  y'a = 0.
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

    const double inf = std::numeric_limits<double>::infinity();
    double m_up = 0.0, m_low = 0.0;
    for (long iter = 0; iter < kMaxIterations; ++iter) {
        // Most-violating pair: i maximizes -y_t g_t over I_up, j minimizes it
        // over I_low; first hit wins on ties, which is the lowest index.
        Eigen::Index i = -1, j = -1;
        m_up = -inf;
        m_low = inf;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double yt = y[static_cast<std::size_t>(t)];
            const double value = -yt * grad[t];
            const bool in_up = (yt > 0 && alpha[t] < C) || (yt < 0 && alpha[t] > 0.0);
            const bool in_low = (yt > 0 && alpha[t] > 0.0) || (yt < 0 && alpha[t] < C);
            if (in_up && value > m_up) {
                m_up = value;
                i = t;
            }
            if (in_low && value < m_low) {
                m_low = value;
                j = t;
            }
        }
        if (i < 0 || j < 0 || m_up - m_low < tol) break;

        const double yi = y[static_cast<std::size_t>(i)];
        const double yj = y[static_cast<std::size_t>(j)];
        const double old_ai = alpha[i], old_aj = alpha[j];

        // Second derivative along the feasible direction is the same in both
        // label branches: K_ii + K_jj - 2 K_ij, floored at tau.
        double quad = K.values(i, i) + K.values(j, j) - 2.0 * K.values(i, j);
        if (quad <= kTau) quad = kTau;

        if (yi != yj) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0 && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if (diff <= 0.0 && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0 && alpha[i] > C) {
                alpha[i] = C;
                alpha[j] = C - diff;
            } else if (diff <= 0.0 && alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C && alpha[i] > C) {
                alpha[i] = C;
                alpha[j] = sum - C;
            } else if (sum <= C && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C && alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = sum - C;
            } else if (sum <= C && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;

#ifndef NDEBUG
        // The two-variable step never increases the dual minimization objective.
        {
            const double qii = K.values(i, i), qjj = K.values(j, j);
            const double qij = yi * yj * K.values(i, j);
            const double delta_obj = grad[i] * dai + grad[j] * daj +
                                     0.5 * (qii * dai * dai + 2.0 * qij * dai * daj +
                                            qjj * daj * daj);
            assert(delta_obj <= 1e-9);
        }
#endif

        for (Eigen::Index t = 0; t < n; ++t) {
            const double yt = y[static_cast<std::size_t>(t)];
            grad[t] += yt * (yi * K.values(t, i) * dai + yj * K.values(t, j) * daj);
        }
    }

    KernelModel model;
    model.coefficients.resize(n);
    for (Eigen::Index t = 0; t < n; ++t)
        model.coefficients[t] = alpha[t] * y[static_cast<std::size_t>(t)];
    model.kernel_id = K.kernel_id;
    model.bandwidth = K.bandwidth;
    model.regularization_c = C;

    // Bias from free support vectors when available, else the midpoint of the
    // feasible interval given by the final bound gradients.
    double free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < C) {
            free_sum += -y[static_cast<std::size_t>(t)] * grad[t];
            ++free_count;
        }
    }
    model.bias = free_count > 0 ? free_sum / free_count : 0.5 * (m_up + m_low);
    if (!std::isfinite(model.bias)) model.bias = 0.0;
    return model;
}

double kernel_decision(const KernelModel& model, const Eigen::Ref<const Eigen::VectorXd>& k_row) {
    if (k_row.size() != model.coefficients.size())
        raise(ErrorKind::dimension_mismatch,
              "kernel_decision: row length " + std::to_string(k_row.size()) + ", model has " +
                  std::to_string(model.coefficients.size()));
    return model.coefficients.dot(k_row) + model.bias;
}

std::vector<KernelModel> train_kernel_ovr(const GramMatrix& K, const std::vector<int>& labels,
                                          int class_count, double C, double tol,
                                          std::uint64_t seed) {
    if (class_count < 2) raise(ErrorKind::invalid_argument, "need at least 2 classes");
    std::vector<bool> present(static_cast<std::size_t>(class_count), false);
    for (int label : labels) {
        if (label < 0 || label >= class_count)
            raise(ErrorKind::domain, "label " + std::to_string(label) + " out of range");
        present[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < class_count; ++c)
        if (!present[static_cast<std::size_t>(c)])
            raise(ErrorKind::degenerate_labels, "class " + std::to_string(c) + " missing");

    std::vector<KernelModel> models;
    models.reserve(static_cast<std::size_t>(class_count));
    std::vector<int> binary(labels.size());
    for (int c = 0; c < class_count; ++c) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            binary[i] = labels[i] == c ? 1 : -1;
        models.push_back(train_kernel_binary(K, binary, C, tol, seed));
    }
    return models;
}

} // namespace epl
