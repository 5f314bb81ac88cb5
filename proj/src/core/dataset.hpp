#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace epl {

/// Per-sample stack of non-negative histogram feature groups plus class labels.
/// Group g is an n_samples x dim_g matrix. A DescriptorSet produced by
/// restrict() keeps the original sample ids in source_ids.
struct DescriptorSet {
    std::vector<Eigen::MatrixXd> groups;
    std::vector<int> labels;
    int class_count = 0;
    std::vector<std::size_t> source_ids; // original id of each row

    std::size_t n_samples() const { return labels.size(); }
    std::size_t group_count() const { return groups.size(); }
    std::size_t total_dim() const;

    /// Concatenation of all groups for one row.
    Eigen::VectorXd concat_row(std::size_t i) const;
    /// n_samples x total_dim matrix of concatenated groups.
    Eigen::MatrixXd concat_all() const;

    /// Checks shapes, non-negativity and label ranges. When require_all_classes
    /// is set, every class id in [0, class_count) must appear at least once;
    /// restricted views may legitimately drop classes.
    void validate(bool require_all_classes = true) const;
};

/// Disjoint sample roles for one experiment run. When leak_test_into_train is
/// set, the test ids are deliberately included in unlabeled_train as well.
/// n_labeled_per_class and unlabeled_fraction echo the generating parameters.
struct SplitPlan {
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled_train;
    std::vector<std::size_t> test;
    bool leak_test_into_train = false;
    std::uint64_t seed = 0;
    int n_labeled_per_class = 0;
    double unlabeled_fraction = 0.0;
};

/// Stratified split: n_labeled_per_class labeled ids per class by seeded
/// shuffle; of each class's remaining pool, floor(fraction * pool) ids
/// (clamped so neither unlabeled-train nor test is empty) become
/// unlabeled-train and the remainder becomes test. With leak=true the test
/// ids are appended to unlabeled_train. Pure function of its arguments.
SplitPlan make_split(const DescriptorSet& data, int n_labeled_per_class,
                     double unlabeled_fraction, bool leak, std::uint64_t seed);

/// True iff no test id appears in labeled or unlabeled_train.
bool assert_no_leak(const SplitPlan& plan);

/// Row-selection view: the selected rows in ascending original-id order,
/// duplicates removed, all groups retained.
DescriptorSet restrict(const DescriptorSet& data, std::vector<std::size_t> ids);

// Dataset CSV: header "id,label,g<k>_<j>", one row per sample.
void save_dataset_csv(const DescriptorSet& data, const std::string& path);
DescriptorSet load_dataset_csv(const std::string& path);

// Split CSV: header "id,role", role in {labeled, unlabeled, test}.
void save_split_csv(const SplitPlan& plan, const std::string& path);

} // namespace epl
