#pragma once

#include "core/dataset.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace epl {

enum class MethodId {
    svm_linear,
    svm_chi2,
    lapsvm_chi2,
    enpro,
    enpro_uniform,
    enpro_nosigmoid,
};

std::string method_name(MethodId id);
std::optional<MethodId> parse_method_id(const std::string& name);
std::vector<MethodId> all_method_ids();

/// Which samples feed the chi2_exp bandwidth heuristic. Purely supervised
/// baselines default to labeled_only so the leak flag cannot touch them;
/// semi-supervised methods default to the full training pool.
enum class BandwidthMode { labeled_only, train_pool };

struct MethodConfig {
    MethodId id = MethodId::svm_linear;
    double svm_c = 10.0;        // C of the baseline / final SVM solvers
    double base_c = 10.0;       // C of the ensemble base learners
    int hypothesis_count = 100; // T
    int pseudo_classes = 3;     // c
    int neighbors_per_seed = 5; // m; the uniform sampler draws m+1 per class
    int k_nn = 6;
    double gamma_ambient = 0.005;
    double gamma_intrinsic = 1.0;
    int reg_group = 0;
    BandwidthMode bandwidth_mode = BandwidthMode::labeled_only;

    void validate() const;
};

MethodConfig default_config(MethodId id);

struct ExperimentRecord {
    MethodId method = MethodId::svm_linear;
    int n_labeled = 0;
    double unlabeled_fraction = 0.0;
    bool leak = false;
    std::uint64_t seed = 0;
    double map = 0.0;
};

/// Trains one method on the plan's roles and scores the test set one-vs-rest.
/// Training only ever sees labeled / unlabeled-train rows; a leak=false plan
/// that fails assert_no_leak is a hard invariant error.
ExperimentRecord run_method(const MethodConfig& config, const DescriptorSet& data,
                            const SplitPlan& plan);

struct LeakageDeltaRow {
    int n_labeled = 0;
    double unlabeled_fraction = 0.0;
    double delta_mean = 0.0; // MAP(leak=true) - MAP(leak=false), seed average
    double delta_std = 0.0;
};

/// For each fraction and seed, the MAP difference between the leaked plan
/// (unlabeled-train = full pool) and the clean plan at that fraction, with
/// identical labeled and test ids.
std::vector<LeakageDeltaRow> leakage_delta(const MethodConfig& config,
                                           const DescriptorSet& data, int n_labeled,
                                           const std::vector<double>& fractions,
                                           const std::vector<std::uint64_t>& seeds,
                                           int jobs = 1);

/// Full cross-product of leak=false runs.
std::vector<ExperimentRecord> unlabeled_sweep(const MethodConfig& config,
                                              const DescriptorSet& data,
                                              const std::vector<int>& n_labeled_grid,
                                              const std::vector<double>& fraction_grid,
                                              const std::vector<std::uint64_t>& seeds,
                                              int jobs = 1);

/// Cross-product over methods x n_labeled x fractions x leak flags x seeds,
/// in that nesting order. Cells run on up to `jobs` worker threads; results
/// are position-keyed so the output is independent of scheduling.
struct RunGrid {
    std::vector<MethodConfig> methods;
    std::vector<int> n_labeled;
    std::vector<double> fractions;
    std::vector<bool> leak_flags;
    std::vector<std::uint64_t> seeds;
};

std::vector<ExperimentRecord> run_grid(const RunGrid& grid, const DescriptorSet& data,
                                       int jobs = 1);

struct AggregateRow {
    MethodId method = MethodId::svm_linear;
    int n_labeled = 0;
    double unlabeled_fraction = 0.0;
    bool leak = false;
    double map_mean = 0.0;
    double map_std = 0.0; // sample standard deviation over seeds
};

std::vector<AggregateRow> aggregate_records(const std::vector<ExperimentRecord>& records);

// Results CSV, header exactly: method,n_labeled,unlabeled_fraction,leak,seed,map
std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_csv_text(const std::vector<std::string>& lines,
                                                    const std::string& context);
// Aggregate CSV replaces seed,map with map_mean,map_std.
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

} // namespace epl
