#pragma once

#include "core/dataset.hpp"
#include "core/linear_svm.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace epl {

enum class SamplerId { exotic, uniform };

std::string sampler_name(SamplerId id);

/// One sampled pseudo-labeling of a subset of the training pool. Assignments
/// carry original sample ids, so they can be audited against a SplitPlan.
struct PseudoHypothesis {
    int pseudo_class_count = 0;
    std::vector<std::pair<std::size_t, int>> assignments; // (sample id, pseudo class)
    SamplerId sampler_id = SamplerId::exotic;
};

/// Seed samples by farthest-first traversal under the averaged chi-square
/// distance (first seed drawn from rng, ties by lowest index), then each seed
/// takes its m nearest still-unassigned neighbors into its pseudo-class.
PseudoHypothesis sample_exotic_hypothesis(const DescriptorSet& train, int pseudo_classes,
                                          int neighbors_per_seed, std::uint64_t seed);

/// Seeded uniform draw without replacement of c * samples_per_class ids,
/// partitioned into pseudo-classes in draw order.
PseudoHypothesis sample_uniform_hypothesis(const DescriptorSet& train, int pseudo_classes,
                                           int samples_per_class, std::uint64_t seed);

/// T hypothesis banks of one-vs-rest linear models; phi(x) concatenates, per
/// hypothesis and pseudo-class, the probability output (use_sigmoid) or the
/// raw decision value.
struct ProjectionEnsemble {
    struct HypothesisBank {
        PseudoHypothesis hypothesis;
        std::vector<LinearModel> models;
    };
    std::vector<HypothesisBank> banks;
    bool use_sigmoid = true;
    std::uint64_t seed = 0;
    int pseudo_classes = 0;
    int neighbors_per_seed = 0;
    SamplerId sampler_id = SamplerId::exotic;

    std::size_t output_dim() const;
};

struct EnsembleParams {
    int hypothesis_count = 100; // T
    int pseudo_classes = 3;     // c
    int neighbors_per_seed = 5; // m (uniform sampler draws m+1 per class)
    SamplerId sampler_id = SamplerId::exotic;
    bool use_sigmoid = true;
    double regularization_c = 10.0;
};

/// Hypothesis t is drawn and trained with seed derive_seed(seed, t); base
/// learners are squared-hinge linear models fit on the assigned samples only.
ProjectionEnsemble fit_ensemble(const DescriptorSet& train, const EnsembleParams& params,
                                std::uint64_t seed);

/// phi(x) for one concatenated-descriptor sample.
Eigen::VectorXd project(const ProjectionEnsemble& ensemble,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

/// phi rows for every sample of a descriptor set.
Eigen::MatrixXd project_all(const ProjectionEnsemble& ensemble, const DescriptorSet& data);

/// Writes hypothesis_<t>_class_<c>.csv model files plus a manifest recording
/// (T, c, m, sampler_id, use_sigmoid, seed).
void save_ensemble(const ProjectionEnsemble& ensemble, const std::string& directory);

} // namespace epl
