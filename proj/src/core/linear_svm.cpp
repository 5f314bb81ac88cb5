#include "core/linear_svm.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace epl {

namespace {

// Tighter than the documented 1e-6 guarantee so that equivalent problem
// rewrites (duplicated points with halved C) agree to 1e-8 in the weights.
constexpr double kGradientTol = 1e-10;
constexpr int kMaxEpochs = 1000;

void check_training_input(const Eigen::MatrixXd& X, const std::vector<int>& y, double C) {
    if (static_cast<std::size_t>(X.rows()) != y.size())
        raise(ErrorKind::dimension_mismatch, "feature rows do not match label count");
    if (!(C > 0.0)) raise(ErrorKind::invalid_argument, "C must be positive");
    if (!X.allFinite()) raise(ErrorKind::domain, "features contain non-finite values");
    bool pos = false, neg = false;
    for (int yi : y) {
        if (yi == 1) pos = true;
        else if (yi == -1) neg = true;
        else raise(ErrorKind::invalid_argument, "labels must be +1 or -1");
    }
    if (!pos || !neg)
        raise(ErrorKind::degenerate_labels, "training needs at least one example of each sign");
}

// Dual coordinate descent for the squared-hinge SVM (Hsieh et al. style):
//   min_a 1/2 a'Qa - e'a,  Q_ij = y_i y_j x_i.x_j + delta_ij / (2C),  a >= 0,
// on features augmented with a constant 1 for the bias.
Eigen::VectorXd solve_squared_hinge_dual(const Eigen::MatrixXd& Xaug,
                                         const std::vector<int>& y, double C,
                                         std::uint64_t seed) {
    const Eigen::Index n = Xaug.rows();
    const double diag_shift = 0.5 / C;

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(Xaug.cols());
    Eigen::VectorXd qd(n);
    for (Eigen::Index i = 0; i < n; ++i)
        qd[i] = Xaug.row(i).squaredNorm() + diag_shift;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);

    for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
        rng.shuffle(order);
        double max_violation = 0.0;
        for (Eigen::Index i : order) {
            const double yi = y[static_cast<std::size_t>(i)];
            const double grad = yi * w.dot(Xaug.row(i)) - 1.0 + alpha[i] * diag_shift;
            // Projected gradient at the lower bound a_i = 0.
            const double projected = (alpha[i] == 0.0) ? std::min(grad, 0.0) : grad;
            max_violation = std::max(max_violation, std::abs(projected));
            if (projected != 0.0) {
                const double old = alpha[i];
                alpha[i] = std::max(old - grad / qd[i], 0.0);
                if (alpha[i] != old) w += (alpha[i] - old) * yi * Xaug.row(i).transpose();
            }
        }
        if (max_violation < kGradientTol) break;
    }
    return w;
}

double logistic_loss_sum(const Eigen::VectorXd& margins) {
    // margins[i] = y_i f(x_i); stable log(1 + exp(-m)).
    double acc = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        const double m = margins[i];
        acc += (m >= 0.0) ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
    return acc;
}

} // namespace

LinearModel train_binary(const Eigen::MatrixXd& X, const std::vector<int>& y,
                         LinearLoss loss, double C, std::uint64_t seed) {
    check_training_input(X, y, C);

    Eigen::MatrixXd Xaug(X.rows(), X.cols() + 1);
    Xaug.leftCols(X.cols()) = X;
    Xaug.col(X.cols()).setOnes();

    Eigen::VectorXd w;
    if (loss == LinearLoss::hinge_squared) {
        w = solve_squared_hinge_dual(Xaug, y, C, seed);
    } else {
        const Eigen::Index n = Xaug.rows();
        const Eigen::Index d = Xaug.cols();
        Eigen::VectorXd yv(n);
        for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)];

        auto objective = [&](const Eigen::VectorXd& wv) {
            return 0.5 * wv.squaredNorm() + C * logistic_loss_sum(yv.cwiseProduct(Xaug * wv));
        };

        w = Eigen::VectorXd::Zero(d);
        for (int iter = 0; iter < kMaxEpochs; ++iter) {
            const Eigen::VectorXd margins = yv.cwiseProduct(Xaug * w);
            Eigen::VectorXd sigma(n); // sigma(-m) = probability of the wrong sign
            for (Eigen::Index i = 0; i < n; ++i) {
                const double m = margins[i];
                sigma[i] = (m >= 0.0) ? std::exp(-m) / (1.0 + std::exp(-m))
                                      : 1.0 / (1.0 + std::exp(m));
            }
            const Eigen::VectorXd grad =
                w - C * Xaug.transpose() * sigma.cwiseProduct(yv);
            if (grad.lpNorm<Eigen::Infinity>() < kGradientTol) break;

            Eigen::VectorXd dweights = sigma.array() * (1.0 - sigma.array());
            Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(d, d);
            hess.noalias() += C * Xaug.transpose() * dweights.asDiagonal() * Xaug;
            const Eigen::VectorXd step = hess.ldlt().solve(-grad);

            double t = 1.0;
            const double f0 = objective(w);
            const double slope = grad.dot(step);
            while (t > 1e-12 && objective(w + t * step) > f0 + 1e-4 * t * slope) t *= 0.5;
            w += t * step;
        }
    }

    LinearModel model;
    model.weights = w.head(X.cols());
    model.bias = w[X.cols()];
    model.trained_with_loss = loss;
    model.regularization_c = C;
    return model;
}

double decision_value(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != model.weights.size())
        raise(ErrorKind::dimension_mismatch,
              "decision_value: feature length " + std::to_string(x.size()) + ", model has " +
                  std::to_string(model.weights.size()));
    return model.weights.dot(x) + model.bias;
}

double probability_value(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double f = decision_value(model, x);
    if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
    const double e = std::exp(f);
    return e / (1.0 + e);
}

std::vector<LinearModel> train_one_vs_rest(const Eigen::MatrixXd& X,
                                           const std::vector<int>& labels, int class_count,
                                           LinearLoss loss, double C, std::uint64_t seed) {
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

    std::vector<LinearModel> models;
    models.reserve(static_cast<std::size_t>(class_count));
    std::vector<int> binary(labels.size());
    for (int c = 0; c < class_count; ++c) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            binary[i] = labels[i] == c ? 1 : -1;
        models.push_back(train_binary(X, binary, loss, C, seed));
    }
    return models;
}

void save_linear_model_csv(const LinearModel& model, const std::string& path) {
    std::ostringstream out;
    out << "dim,weight\n";
    for (Eigen::Index j = 0; j < model.weights.size(); ++j)
        out << j << "," << format_double(model.weights[j]) << "\n";
    out << "bias," << format_double(model.bias) << "\n";
    write_file(path, out.str());
}

} // namespace epl
