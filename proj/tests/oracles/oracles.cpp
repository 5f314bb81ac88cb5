#include "oracles/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

double grid_minimize(const std::function<double(const Eigen::VectorXd&)>& objective, int dim,
                     double initial_range, int levels) {
    constexpr int kPoints = 13;
    Eigen::VectorXd center = Eigen::VectorXd::Zero(dim);
    double range = initial_range;
    double best = objective(center);

    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Eigen::VectorXd point(dim);
    for (int level = 0; level < levels; ++level) {
        Eigen::VectorXd best_point = center;
        std::fill(idx.begin(), idx.end(), 0);
        const std::size_t total = static_cast<std::size_t>(std::pow(kPoints, dim));
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rest = flat;
            for (int d = 0; d < dim; ++d) {
                const int i = static_cast<int>(rest % kPoints);
                rest /= kPoints;
                point[d] = center[d] + range * (2.0 * i / (kPoints - 1) - 1.0);
            }
            const double value = objective(point);
            if (value < best) {
                best = value;
                best_point = point;
            }
        }
        center = best_point;
        range *= 0.5;
    }
    return best;
}

DualSolution enumerate_svm_dual_max(const Eigen::MatrixXd& K, const std::vector<int>& y,
                                    double C) {
    const int n = static_cast<int>(y.size());
    Eigen::MatrixXd Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q(i, j) = y[static_cast<std::size_t>(i)] *
                                              y[static_cast<std::size_t>(j)] * K(i, j);

    auto dual_value = [&](const Eigen::VectorXd& alpha) {
        return alpha.sum() - 0.5 * alpha.dot(Q * alpha);
    };

    DualSolution best;
    best.objective = -std::numeric_limits<double>::infinity();

    std::vector<int> state(static_cast<std::size_t>(n), 0); // 0 = at 0, 1 = at C, 2 = free
    const std::size_t combos = static_cast<std::size_t>(std::pow(3.0, n));
    constexpr double kFeasTol = 1e-9;

    for (std::size_t flat = 0; flat < combos; ++flat) {
        std::size_t rest = flat;
        for (int i = 0; i < n; ++i) {
            state[static_cast<std::size_t>(i)] = static_cast<int>(rest % 3);
            rest /= 3;
        }
        std::vector<int> free_idx;
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (state[static_cast<std::size_t>(i)] == 1) alpha[i] = C;
            else if (state[static_cast<std::size_t>(i)] == 2) free_idx.push_back(i);
        }

        double bound_balance = 0.0;
        for (int i = 0; i < n; ++i)
            if (state[static_cast<std::size_t>(i)] != 2)
                bound_balance += y[static_cast<std::size_t>(i)] * alpha[i];

        if (free_idx.empty()) {
            if (std::abs(bound_balance) > kFeasTol) continue;
        } else {
            // KKT on the face: [Q_FF y_F; y_F' 0][a_F; lambda] = [1 - Q_FB a_B; -balance]
            const int f = static_cast<int>(free_idx.size());
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(f + 1, f + 1);
            Eigen::VectorXd rhs(f + 1);
            for (int a = 0; a < f; ++a) {
                for (int b = 0; b < f; ++b) kkt(a, b) = Q(free_idx[a], free_idx[b]);
                kkt(a, f) = y[static_cast<std::size_t>(free_idx[a])];
                kkt(f, a) = y[static_cast<std::size_t>(free_idx[a])];
                double fixed_term = 0.0;
                for (int i = 0; i < n; ++i)
                    if (state[static_cast<std::size_t>(i)] == 1)
                        fixed_term += Q(free_idx[a], i) * alpha[i];
                rhs[a] = 1.0 - fixed_term;
            }
            rhs[f] = -bound_balance;

            Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
            if (!lu.isInvertible()) continue;
            const Eigen::VectorXd solution = lu.solve(rhs);
            bool feasible = true;
            for (int a = 0; a < f && feasible; ++a)
                feasible = solution[a] >= -kFeasTol && solution[a] <= C + kFeasTol;
            if (!feasible) continue;
            for (int a = 0; a < f; ++a)
                alpha[free_idx[a]] = std::clamp(solution[a], 0.0, C);
        }

        const double value = dual_value(alpha);
        if (value > best.objective) {
            best.objective = value;
            best.alpha = alpha;
        }
    }
    return best;
}

double ap_bruteforce(const Eigen::VectorXd& scores, const std::vector<bool>& relevance) {
    const std::size_t n = relevance.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // stable_sort on descending score keeps ascending-index tie order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[static_cast<Eigen::Index>(a)] > scores[static_cast<Eigen::Index>(b)];
    });

    std::size_t total_relevant = 0;
    for (bool r : relevance)
        if (r) ++total_relevant;

    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (!relevance[order[k - 1]]) continue;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < k; ++r)
            if (relevance[order[r]]) ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(k);
    }
    return sum / static_cast<double>(total_relevant);
}

std::vector<std::size_t> knn_bruteforce(const Eigen::MatrixXd& dist, std::size_t i,
                                        std::size_t k) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < static_cast<std::size_t>(dist.cols()); ++j)
        if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
        const double db = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
        return da != db ? da < db : a < b;
    });
    order.resize(k);
    return order;
}

} // namespace oracle
