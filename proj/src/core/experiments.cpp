#include "core/experiments.hpp"

#include "core/csv.hpp"
#include "core/ensemble.hpp"
#include "core/error.hpp"
#include "core/kernel_svm.hpp"
#include "core/kernels.hpp"
#include "core/linear_svm.hpp"
#include "core/manifold.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace epl {

namespace {

constexpr double kSmoTol = 1e-3;

// Fixed per-purpose seed streams so every method sees a reproducible RNG
// derived only from the split seed.
constexpr std::uint64_t kEnsembleStream = 0xE5Bu;
constexpr std::uint64_t kSolverStream = 0x50Bu;

struct MethodNameEntry {
    MethodId id;
    const char* name;
};

constexpr MethodNameEntry kMethodNames[] = {
    {MethodId::svm_linear, "svm_linear"},
    {MethodId::svm_chi2, "svm_chi2"},
    {MethodId::lapsvm_chi2, "lapsvm_chi2"},
    {MethodId::enpro, "enpro"},
    {MethodId::enpro_uniform, "enpro_uniform"},
    {MethodId::enpro_nosigmoid, "enpro_nosigmoid"},
};

} // namespace

std::string method_name(MethodId id) {
    for (const auto& entry : kMethodNames)
        if (entry.id == id) return entry.name;
    raise(ErrorKind::invariant, "unknown method id");
}

std::optional<MethodId> parse_method_id(const std::string& name) {
    for (const auto& entry : kMethodNames)
        if (name == entry.name) return entry.id;
    return std::nullopt;
}

std::vector<MethodId> all_method_ids() {
    std::vector<MethodId> ids;
    for (const auto& entry : kMethodNames) ids.push_back(entry.id);
    return ids;
}

void MethodConfig::validate() const {
    if (!(svm_c > 0.0) || !(base_c > 0.0))
        raise(ErrorKind::invalid_argument, method_name(id) + ": C must be positive");
    const bool is_enpro = id == MethodId::enpro || id == MethodId::enpro_uniform ||
                          id == MethodId::enpro_nosigmoid;
    if (is_enpro) {
        if (hypothesis_count < 1)
            raise(ErrorKind::invalid_argument,
                  method_name(id) + ": ensemble needs T >= 1 hypotheses");
        if (pseudo_classes < 2)
            raise(ErrorKind::invalid_argument, method_name(id) + ": need c >= 2 pseudo-classes");
        if (neighbors_per_seed < 0)
            raise(ErrorKind::invalid_argument, method_name(id) + ": m must be >= 0");
    }
    if (id == MethodId::lapsvm_chi2) {
        if (k_nn < 1) raise(ErrorKind::invalid_argument, "lapsvm_chi2: k_nn must be >= 1");
        if (gamma_ambient < 0.0 || gamma_intrinsic < 0.0)
            raise(ErrorKind::invalid_argument, "lapsvm_chi2: gamma values must be >= 0");
        if (reg_group < 0) raise(ErrorKind::invalid_argument, "lapsvm_chi2: reg_group must be >= 0");
    }
}

MethodConfig default_config(MethodId id) {
    MethodConfig config;
    config.id = id;
    switch (id) {
        case MethodId::svm_linear:
        case MethodId::svm_chi2:
            config.bandwidth_mode = BandwidthMode::labeled_only;
            break;
        case MethodId::lapsvm_chi2:
        case MethodId::enpro:
        case MethodId::enpro_uniform:
        case MethodId::enpro_nosigmoid:
            config.bandwidth_mode = BandwidthMode::train_pool;
            break;
    }
    return config;
}

namespace {

// Stacks two descriptor sets row-wise, keeping source ids. Used to order
// manifold nodes as labeled-first.
DescriptorSet stack_views(const DescriptorSet& a, const DescriptorSet& b) {
    DescriptorSet out;
    out.class_count = a.class_count;
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.source_ids = a.source_ids;
    out.source_ids.insert(out.source_ids.end(), b.source_ids.begin(), b.source_ids.end());
    for (std::size_t g = 0; g < a.group_count(); ++g) {
        Eigen::MatrixXd m(a.groups[g].rows() + b.groups[g].rows(), a.groups[g].cols());
        m.topRows(a.groups[g].rows()) = a.groups[g];
        m.bottomRows(b.groups[g].rows()) = b.groups[g];
        out.groups.push_back(std::move(m));
    }
    return out;
}

std::vector<std::size_t> union_ids(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b) {
    std::vector<std::size_t> ids = a;
    ids.insert(ids.end(), b.begin(), b.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

double bandwidth_for(const MethodConfig& config, const DescriptorSet& labeled_view,
                     const DescriptorSet& pool_view) {
    return config.bandwidth_mode == BandwidthMode::labeled_only
               ? mean_distance_bandwidth(labeled_view)
               : mean_distance_bandwidth(pool_view);
}

std::vector<Eigen::VectorXd> score_linear_ovr(const std::vector<LinearModel>& models,
                                              const DescriptorSet& test_view) {
    const Eigen::MatrixXd X = test_view.concat_all();
    std::vector<Eigen::VectorXd> scores(models.size());
    for (std::size_t c = 0; c < models.size(); ++c) {
        Eigen::VectorXd s(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            s[i] = decision_value(models[c], X.row(i).transpose());
        scores[c] = std::move(s);
    }
    return scores;
}

std::vector<Eigen::VectorXd> score_kernel_ovr(const std::vector<KernelModel>& models,
                                              const Eigen::MatrixXd& k_rows) {
    std::vector<Eigen::VectorXd> scores(models.size());
    for (std::size_t c = 0; c < models.size(); ++c) {
        Eigen::VectorXd s(k_rows.rows());
        for (Eigen::Index i = 0; i < k_rows.rows(); ++i)
            s[i] = kernel_decision(models[c], k_rows.row(i).transpose());
        scores[c] = std::move(s);
    }
    return scores;
}

void audit_assignments_leak_free(const ProjectionEnsemble& ensemble, const SplitPlan& plan) {
    const std::set<std::size_t> test_ids(plan.test.begin(), plan.test.end());
    for (const auto& bank : ensemble.banks)
        for (const auto& [id, pseudo] : bank.hypothesis.assignments)
            if (test_ids.count(id))
                raise(ErrorKind::invariant,
                      "test sample " + std::to_string(id) + " reached hypothesis sampling");
}

std::vector<Eigen::VectorXd> run_enpro(const MethodConfig& config, const DescriptorSet& labeled_view,
                                       const DescriptorSet& pool_view,
                                       const DescriptorSet& test_view, const SplitPlan& plan) {
    EnsembleParams params;
    params.hypothesis_count = config.hypothesis_count;
    params.pseudo_classes = config.pseudo_classes;
    params.neighbors_per_seed = config.neighbors_per_seed;
    params.sampler_id =
        config.id == MethodId::enpro_uniform ? SamplerId::uniform : SamplerId::exotic;
    params.use_sigmoid = config.id != MethodId::enpro_nosigmoid;
    params.regularization_c = config.base_c;

    // All enpro variants share the seed stream, so ablations differ only in
    // the component under study.
    const ProjectionEnsemble ensemble =
        fit_ensemble(pool_view, params, derive_seed(plan.seed, kEnsembleStream));
    if (!plan.leak_test_into_train) audit_assignments_leak_free(ensemble, plan);

    const Eigen::MatrixXd phi_labeled = project_all(ensemble, labeled_view);
    const Eigen::MatrixXd phi_test = project_all(ensemble, test_view);

    GramMatrix K;
    K.kernel_id = KernelId::linear;
    K.values = phi_labeled * phi_labeled.transpose();
    const Eigen::Index n = K.values.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) K.values(j, i) = K.values(i, j);

    const auto models =
        train_kernel_ovr(K, labeled_view.labels, labeled_view.class_count, config.svm_c,
                         kSmoTol, derive_seed(plan.seed, kSolverStream));
    const Eigen::MatrixXd k_rows = phi_test * phi_labeled.transpose();
    return score_kernel_ovr(models, k_rows);
}

std::vector<Eigen::VectorXd> run_lapsvm(const MethodConfig& config,
                                        const DescriptorSet& labeled_view,
                                        const DescriptorSet& pool_view,
                                        const DescriptorSet& unlabeled_view,
                                        const DescriptorSet& test_view) {
    const DescriptorSet nodes = stack_views(labeled_view, unlabeled_view);
    const double sigma = bandwidth_for(config, labeled_view, pool_view);

    const GramMatrix K = build_gram(nodes, nodes, KernelId::chi2_exp, sigma);
    const NeighborGraph graph = build_knn_graph(nodes, config.reg_group, config.k_nn);
    const Eigen::MatrixXd laplacian = graph_laplacian(graph);

    const ManifoldModel model =
        train_manifold(K, laplacian, labeled_view.labels, labeled_view.class_count,
                       config.gamma_ambient, config.gamma_intrinsic);

    const GramMatrix k_test = build_gram(test_view, nodes, KernelId::chi2_exp, sigma);
    std::vector<Eigen::VectorXd> scores(static_cast<std::size_t>(labeled_view.class_count));
    for (auto& s : scores) s.resize(k_test.values.rows());
    for (Eigen::Index i = 0; i < k_test.values.rows(); ++i) {
        const Eigen::VectorXd row_scores =
            manifold_scores(model, k_test.values.row(i).transpose());
        for (int c = 0; c < labeled_view.class_count; ++c)
            scores[static_cast<std::size_t>(c)][i] = row_scores[c];
    }
    return scores;
}

} // namespace

ExperimentRecord run_method(const MethodConfig& config, const DescriptorSet& data,
                            const SplitPlan& plan) {
    config.validate();
    if (plan.labeled.empty() || plan.test.empty())
        raise(ErrorKind::invalid_argument, "split plan lacks labeled or test ids");
    if (!plan.leak_test_into_train && !assert_no_leak(plan))
        raise(ErrorKind::invariant,
              "leak=false plan has test ids inside the training roles");

    try {
        const DescriptorSet labeled_view = restrict(data, plan.labeled);
        const DescriptorSet unlabeled_view = restrict(data, plan.unlabeled_train);
        const DescriptorSet pool_view =
            restrict(data, union_ids(plan.labeled, plan.unlabeled_train));
        const DescriptorSet test_view = restrict(data, plan.test);

        std::vector<Eigen::VectorXd> scores;
        switch (config.id) {
            case MethodId::svm_linear: {
                const auto models = train_one_vs_rest(
                    labeled_view.concat_all(), labeled_view.labels, labeled_view.class_count,
                    LinearLoss::hinge_squared, config.svm_c,
                    derive_seed(plan.seed, kSolverStream));
                scores = score_linear_ovr(models, test_view);
                break;
            }
            case MethodId::svm_chi2: {
                const double sigma = bandwidth_for(config, labeled_view, pool_view);
                const GramMatrix K =
                    build_gram(labeled_view, labeled_view, KernelId::chi2_exp, sigma);
                const auto models = train_kernel_ovr(K, labeled_view.labels,
                                                     labeled_view.class_count, config.svm_c,
                                                     kSmoTol, derive_seed(plan.seed, kSolverStream));
                const GramMatrix k_test =
                    build_gram(test_view, labeled_view, KernelId::chi2_exp, sigma);
                scores = score_kernel_ovr(models, k_test.values);
                break;
            }
            case MethodId::lapsvm_chi2:
                scores = run_lapsvm(config, labeled_view, pool_view, unlabeled_view, test_view);
                break;
            case MethodId::enpro:
            case MethodId::enpro_uniform:
            case MethodId::enpro_nosigmoid:
                scores = run_enpro(config, labeled_view, pool_view, test_view, plan);
                break;
        }

        std::vector<int> skipped;
        const double map = mean_average_precision(scores, test_view.labels, &skipped);
        for (int c : skipped)
            std::cerr << "warning: " << method_name(config.id) << ": class " << c
                      << " has no positive test items; skipped in MAP\n";

        ExperimentRecord record;
        record.method = config.id;
        record.n_labeled = plan.n_labeled_per_class;
        record.unlabeled_fraction = plan.unlabeled_fraction;
        record.leak = plan.leak_test_into_train;
        record.seed = plan.seed;
        record.map = map;
        return record;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invariant) throw;
        raise(e.kind(), method_name(config.id) + ": " + e.what());
    }
}

namespace {

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the first
// worker exception. Output must be position-keyed by the caller.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

} // namespace

std::vector<LeakageDeltaRow> leakage_delta(const MethodConfig& config,
                                           const DescriptorSet& data, int n_labeled,
                                           const std::vector<double>& fractions,
                                           const std::vector<std::uint64_t>& seeds,
                                           int jobs) {
    if (fractions.empty() || seeds.empty())
        raise(ErrorKind::invalid_argument, "leakage_delta needs fractions and seeds");

    struct Cell {
        double fraction;
        std::uint64_t seed;
        double delta;
    };
    std::vector<Cell> cells;
    for (double fraction : fractions)
        for (std::uint64_t seed : seeds) cells.push_back({fraction, seed, 0.0});

    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        auto& cell = cells[i];
        const SplitPlan clean = make_split(data, n_labeled, cell.fraction, false, cell.seed);
        const SplitPlan leaked = make_split(data, n_labeled, cell.fraction, true, cell.seed);
        const double map_clean = run_method(config, data, clean).map;
        const double map_leaked = run_method(config, data, leaked).map;
        cell.delta = map_leaked - map_clean;
    });

    std::vector<LeakageDeltaRow> rows;
    for (double fraction : fractions) {
        std::vector<double> deltas;
        for (const auto& cell : cells)
            if (cell.fraction == fraction) deltas.push_back(cell.delta);
        LeakageDeltaRow row;
        row.n_labeled = n_labeled;
        row.unlabeled_fraction = fraction;
        row.delta_mean = 0.0;
        for (double d : deltas) row.delta_mean += d;
        row.delta_mean /= static_cast<double>(deltas.size());
        row.delta_std = sample_std(deltas, row.delta_mean);
        rows.push_back(row);
    }
    return rows;
}

std::vector<ExperimentRecord> unlabeled_sweep(const MethodConfig& config,
                                              const DescriptorSet& data,
                                              const std::vector<int>& n_labeled_grid,
                                              const std::vector<double>& fraction_grid,
                                              const std::vector<std::uint64_t>& seeds,
                                              int jobs) {
    RunGrid grid;
    grid.methods = {config};
    grid.n_labeled = n_labeled_grid;
    grid.fractions = fraction_grid;
    grid.leak_flags = {false};
    grid.seeds = seeds;
    return run_grid(grid, data, jobs);
}

std::vector<ExperimentRecord> run_grid(const RunGrid& grid, const DescriptorSet& data,
                                       int jobs) {
    if (grid.methods.empty() || grid.n_labeled.empty() || grid.fractions.empty() ||
        grid.leak_flags.empty() || grid.seeds.empty())
        raise(ErrorKind::invalid_argument, "experiment grid has an empty axis");

    struct Cell {
        const MethodConfig* config;
        int n_labeled;
        double fraction;
        bool leak;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& config : grid.methods)
        for (int n : grid.n_labeled)
            for (double fraction : grid.fractions)
                for (bool leak : grid.leak_flags)
                    for (std::uint64_t seed : grid.seeds)
                        cells.push_back({&config, n, fraction, leak, seed});

    std::vector<ExperimentRecord> records(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        const auto& cell = cells[i];
        const SplitPlan plan = make_split(data, cell.n_labeled, cell.fraction, cell.leak,
                                          cell.seed);
        records[i] = run_method(*cell.config, data, plan);
    });
    return records;
}

std::vector<AggregateRow> aggregate_records(const std::vector<ExperimentRecord>& records) {
    struct Key {
        int method;
        int n_labeled;
        double fraction;
        bool leak;
        bool operator<(const Key& o) const {
            if (method != o.method) return method < o.method;
            if (n_labeled != o.n_labeled) return n_labeled < o.n_labeled;
            if (fraction != o.fraction) return fraction < o.fraction;
            return leak < o.leak;
        }
    };
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : records)
        groups[{static_cast<int>(r.method), r.n_labeled, r.unlabeled_fraction, r.leak}]
            .push_back(r.map);

    std::vector<AggregateRow> rows;
    for (const auto& [key, maps] : groups) {
        AggregateRow row;
        row.method = static_cast<MethodId>(key.method);
        row.n_labeled = key.n_labeled;
        row.unlabeled_fraction = key.fraction;
        row.leak = key.leak;
        for (double m : maps) row.map_mean += m;
        row.map_mean /= static_cast<double>(maps.size());
        row.map_std = sample_std(maps, row.map_mean);
        rows.push_back(row);
    }
    return rows;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream out;
    out << "method,n_labeled,unlabeled_fraction,leak,seed,map\n";
    for (const auto& r : records)
        out << method_name(r.method) << "," << r.n_labeled << ","
            << format_double(r.unlabeled_fraction) << "," << (r.leak ? "true" : "false") << ","
            << r.seed << "," << format_double(r.map) << "\n";
    return out.str();
}

std::vector<ExperimentRecord> records_from_csv_text(const std::vector<std::string>& lines,
                                                    const std::string& context) {
    if (lines.empty()) raise(ErrorKind::invalid_argument, context + ": empty results file");
    const auto header = split_csv_line(lines[0]);
    const std::vector<std::string> expected = {"method",  "n_labeled", "unlabeled_fraction",
                                               "leak",    "seed",      "map"};
    for (const auto& column : expected)
        if (std::find(header.begin(), header.end(), column) == header.end())
            raise(ErrorKind::invalid_argument, context + ": missing column '" + column + "'");
    std::vector<std::size_t> at(expected.size());
    for (std::size_t c = 0; c < expected.size(); ++c)
        at[c] = static_cast<std::size_t>(
            std::find(header.begin(), header.end(), expected[c]) - header.begin());

    std::vector<ExperimentRecord> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != header.size())
            raise(ErrorKind::invalid_argument,
                  context + ": row " + std::to_string(i + 1) + " has wrong field count");
        ExperimentRecord r;
        const auto method = parse_method_id(fields[at[0]]);
        if (!method)
            raise(ErrorKind::invalid_argument,
                  context + ": unknown method id '" + fields[at[0]] + "'");
        r.method = *method;
        r.n_labeled = static_cast<int>(parse_uint(fields[at[1]], context));
        r.unlabeled_fraction = parse_double(fields[at[2]], context);
        if (fields[at[3]] != "true" && fields[at[3]] != "false")
            raise(ErrorKind::invalid_argument, context + ": leak must be true or false");
        r.leak = fields[at[3]] == "true";
        r.seed = parse_uint(fields[at[4]], context);
        r.map = parse_double(fields[at[5]], context);
        records.push_back(r);
    }
    return records;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << "method,n_labeled,unlabeled_fraction,leak,map_mean,map_std\n";
    for (const auto& r : rows)
        out << method_name(r.method) << "," << r.n_labeled << ","
            << format_double(r.unlabeled_fraction) << "," << (r.leak ? "true" : "false") << ","
            << format_double(r.map_mean) << "," << format_double(r.map_std) << "\n";
    return out.str();
}

} // namespace epl
