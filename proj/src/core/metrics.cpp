#include "core/metrics.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <numeric>

namespace epl {

double average_precision(const Eigen::Ref<const Eigen::VectorXd>& scores,
                         const std::vector<bool>& relevance) {
    const std::size_t n = relevance.size();
    if (static_cast<std::size_t>(scores.size()) != n)
        raise(ErrorKind::dimension_mismatch, "scores and relevance lengths differ");
    const std::size_t total_relevant =
        static_cast<std::size_t>(std::count(relevance.begin(), relevance.end(), true));
    if (total_relevant == 0)
        raise(ErrorKind::invalid_argument, "average precision undefined without relevant items");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = scores[static_cast<Eigen::Index>(a)];
        const double sb = scores[static_cast<Eigen::Index>(b)];
        return sa != sb ? sa > sb : a < b;
    });

    double sum_precision = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (relevance[order[k]]) {
            ++hits;
            sum_precision += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return sum_precision / static_cast<double>(total_relevant);
}

double mean_average_precision(const std::vector<Eigen::VectorXd>& class_scores,
                              const std::vector<int>& test_labels,
                              std::vector<int>* skipped_classes) {
    if (class_scores.empty()) raise(ErrorKind::invalid_argument, "no class scores");
    const std::size_t n = test_labels.size();
    for (const auto& s : class_scores)
        if (static_cast<std::size_t>(s.size()) != n)
            raise(ErrorKind::dimension_mismatch, "class score length does not match test size");

    double sum_ap = 0.0;
    int counted = 0;
    std::vector<bool> relevance(n);
    for (std::size_t c = 0; c < class_scores.size(); ++c) {
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            relevance[i] = test_labels[i] == static_cast<int>(c);
            any = any || relevance[i];
        }
        if (!any) {
            if (skipped_classes) skipped_classes->push_back(static_cast<int>(c));
            continue;
        }
        sum_ap += average_precision(class_scores[c], relevance);
        ++counted;
    }
    if (counted == 0)
        raise(ErrorKind::invalid_argument, "every class lacks positive test items");
    return sum_ap / static_cast<double>(counted);
}

} // namespace epl
