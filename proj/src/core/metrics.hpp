#pragma once

#include <Eigen/Core>
#include <vector>

namespace epl {

/// Non-interpolated average precision. Items are ranked by descending score,
/// ties broken by ascending index; AP = (1/R) * sum over relevant ranks k of
/// precision@k. Throws when no item is relevant.
double average_precision(const Eigen::Ref<const Eigen::VectorXd>& scores,
                         const std::vector<bool>& relevance);

/// Mean over classes of the one-vs-rest AP of class_scores[c] against
/// (test_labels == c). Classes with no positive test item are skipped and
/// reported in skipped_classes when provided; throws if every class is skipped.
double mean_average_precision(const std::vector<Eigen::VectorXd>& class_scores,
                              const std::vector<int>& test_labels,
                              std::vector<int>* skipped_classes = nullptr);

} // namespace epl
