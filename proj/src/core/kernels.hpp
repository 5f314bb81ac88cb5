#pragma once

#include "core/dataset.hpp"

#include <Eigen/Core>
#include <string>

namespace epl {

enum class KernelId { linear, chi2_exp };

std::string kernel_name(KernelId id);

/// Pairwise kernel values with the metadata needed to reproduce them.
/// bandwidth is meaningful only for chi2_exp.
struct GramMatrix {
    Eigen::MatrixXd values;
    KernelId kernel_id = KernelId::linear;
    double bandwidth = 0.0;
};

/// Chi-square histogram distance: 1/2 * sum_j (h_j - g_j)^2 / (h_j + g_j),
/// with 0/0 terms contributing 0.
double chi2_distance(const Eigen::Ref<const Eigen::VectorXd>& h,
                     const Eigen::Ref<const Eigen::VectorXd>& g);

/// Mean of the per-group chi-square distances between sample i of a and
/// sample j of b.
double averaged_chi2_distance(const DescriptorSet& a, std::size_t i,
                              const DescriptorSet& b, std::size_t j);

/// All-pairs averaged chi-square distances between two descriptor sets,
/// optionally restricted to a single group (reg_group >= 0).
Eigen::MatrixXd averaged_chi2_distances(const DescriptorSet& a, const DescriptorSet& b,
                                        int reg_group = -1);

/// Gram matrix between two descriptor sets. linear: dot product of
/// concatenated groups; chi2_exp: exp(-averaged_chi2 / bandwidth).
/// When a and b are the same object the result is exactly symmetric.
GramMatrix build_gram(const DescriptorSet& a, const DescriptorSet& b, KernelId kernel,
                      double bandwidth = 0.0);

/// Mean averaged chi-square distance over all unordered sample pairs;
/// falls back to 1 when the mean is 0. Needs at least 2 samples.
double mean_distance_bandwidth(const DescriptorSet& train);

/// Same heuristic restricted to one descriptor group (used for graph weights).
double mean_distance_bandwidth(const DescriptorSet& train, int reg_group);

void save_gram_csv(const GramMatrix& gram, const std::string& path);

} // namespace epl
