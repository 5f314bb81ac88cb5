#include "core/kernels.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"

#include <cmath>
#include <sstream>

namespace epl {

std::string kernel_name(KernelId id) {
    return id == KernelId::linear ? "linear" : "chi2_exp";
}

double chi2_distance(const Eigen::Ref<const Eigen::VectorXd>& h,
                     const Eigen::Ref<const Eigen::VectorXd>& g) {
    if (h.size() != g.size())
        raise(ErrorKind::dimension_mismatch,
              "chi2_distance: lengths " + std::to_string(h.size()) + " vs " +
                  std::to_string(g.size()));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < h.size(); ++j) {
        const double hj = h[j], gj = g[j];
        if (hj < 0.0 || gj < 0.0)
            raise(ErrorKind::domain, "chi2_distance: negative histogram entry");
        const double denom = hj + gj;
        if (denom > 0.0) {
            const double diff = hj - gj;
            acc += diff * diff / denom;
        }
    }
    return 0.5 * acc;
}

static void check_same_layout(const DescriptorSet& a, const DescriptorSet& b) {
    if (a.group_count() != b.group_count())
        raise(ErrorKind::dimension_mismatch, "descriptor sets have different group counts");
    for (std::size_t g = 0; g < a.group_count(); ++g)
        if (a.groups[g].cols() != b.groups[g].cols())
            raise(ErrorKind::dimension_mismatch,
                  "group " + std::to_string(g) + " dimension mismatch");
}

double averaged_chi2_distance(const DescriptorSet& a, std::size_t i,
                              const DescriptorSet& b, std::size_t j) {
    check_same_layout(a, b);
    double acc = 0.0;
    for (std::size_t g = 0; g < a.group_count(); ++g)
        acc += chi2_distance(a.groups[g].row(static_cast<Eigen::Index>(i)).transpose(),
                             b.groups[g].row(static_cast<Eigen::Index>(j)).transpose());
    return acc / static_cast<double>(a.group_count());
}

// Chi-square distances between all rows of two matrices, accumulated into out.
static void accumulate_chi2(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            Eigen::MatrixXd& out) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < A.cols(); ++k) {
                const double denom = A(i, k) + B(j, k);
                if (denom > 0.0) {
                    const double diff = A(i, k) - B(j, k);
                    acc += diff * diff / denom;
                }
            }
            out(i, j) += 0.5 * acc;
        }
    }
}

Eigen::MatrixXd averaged_chi2_distances(const DescriptorSet& a, const DescriptorSet& b,
                                        int reg_group) {
    check_same_layout(a, b);
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.n_samples()),
                                                 static_cast<Eigen::Index>(b.n_samples()));
    if (reg_group >= 0) {
        if (static_cast<std::size_t>(reg_group) >= a.group_count())
            raise(ErrorKind::invalid_argument,
                  "regularization group " + std::to_string(reg_group) + " out of range");
        accumulate_chi2(a.groups[static_cast<std::size_t>(reg_group)],
                        b.groups[static_cast<std::size_t>(reg_group)], dist);
        return dist;
    }
    for (std::size_t g = 0; g < a.group_count(); ++g)
        accumulate_chi2(a.groups[g], b.groups[g], dist);
    dist /= static_cast<double>(a.group_count());
    return dist;
}

GramMatrix build_gram(const DescriptorSet& a, const DescriptorSet& b, KernelId kernel,
                      double bandwidth) {
    check_same_layout(a, b);
    GramMatrix gram;
    gram.kernel_id = kernel;
    gram.bandwidth = bandwidth;
    if (kernel == KernelId::linear) {
        const Eigen::MatrixXd xa = a.concat_all();
        const Eigen::MatrixXd xb = b.concat_all();
        gram.values = xa * xb.transpose();
    } else {
        if (!(bandwidth > 0.0))
            raise(ErrorKind::invalid_argument, "chi2_exp kernel needs bandwidth > 0");
        gram.values = (-averaged_chi2_distances(a, b) / bandwidth).array().exp();
    }
    // Self-Gram: enforce exact symmetry so downstream checks never see
    // floating-point asymmetry from independent row evaluations.
    if (&a == &b) {
        const Eigen::Index n = gram.values.rows();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                gram.values(j, i) = gram.values(i, j);
    }
    return gram;
}

static double mean_pair_distance(const Eigen::MatrixXd& dist) {
    const Eigen::Index n = dist.rows();
    double acc = 0.0;
    std::size_t pairs = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            acc += dist(i, j);
            ++pairs;
        }
    const double mean = acc / static_cast<double>(pairs);
    return mean > 0.0 ? mean : 1.0;
}

double mean_distance_bandwidth(const DescriptorSet& train) {
    if (train.n_samples() < 2)
        raise(ErrorKind::insufficient_data, "bandwidth heuristic needs at least 2 samples");
    return mean_pair_distance(averaged_chi2_distances(train, train));
}

double mean_distance_bandwidth(const DescriptorSet& train, int reg_group) {
    if (train.n_samples() < 2)
        raise(ErrorKind::insufficient_data, "bandwidth heuristic needs at least 2 samples");
    return mean_pair_distance(averaged_chi2_distances(train, train, reg_group));
}

void save_gram_csv(const GramMatrix& gram, const std::string& path) {
    std::ostringstream out;
    out << "i,j,value\n";
    for (Eigen::Index i = 0; i < gram.values.rows(); ++i)
        for (Eigen::Index j = 0; j < gram.values.cols(); ++j)
            out << i << "," << j << "," << format_double(gram.values(i, j)) << "\n";
    write_file(path, out.str());
}

} // namespace epl
