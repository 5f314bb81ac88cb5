#include "core/ensemble.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/kernels.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <numeric>
#include <sstream>

namespace epl {

std::string sampler_name(SamplerId id) {
    return id == SamplerId::exotic ? "exotic" : "uniform";
}

namespace {

// Shared implementation so fit_ensemble can reuse one distance matrix across
// all T hypotheses.
PseudoHypothesis sample_exotic_with_distances(const DescriptorSet& train,
                                              const Eigen::MatrixXd& dist, int pseudo_classes,
                                              int neighbors_per_seed, std::uint64_t seed);

} // namespace

PseudoHypothesis sample_exotic_hypothesis(const DescriptorSet& train, int pseudo_classes,
                                          int neighbors_per_seed, std::uint64_t seed) {
    return sample_exotic_with_distances(train, averaged_chi2_distances(train, train),
                                        pseudo_classes, neighbors_per_seed, seed);
}

namespace {

PseudoHypothesis sample_exotic_with_distances(const DescriptorSet& train,
                                              const Eigen::MatrixXd& dist, int pseudo_classes,
                                              int neighbors_per_seed, std::uint64_t seed) {
    const std::size_t n = train.n_samples();
    if (pseudo_classes < 2)
        raise(ErrorKind::invalid_argument, "need at least 2 pseudo-classes");
    if (neighbors_per_seed < 0)
        raise(ErrorKind::invalid_argument, "neighbors_per_seed must be >= 0");
    const std::size_t need =
        static_cast<std::size_t>(pseudo_classes) * static_cast<std::size_t>(neighbors_per_seed + 1);
    if (need > n)
        raise(ErrorKind::invalid_argument,
              "hypothesis needs " + std::to_string(need) + " samples, pool has " +
                  std::to_string(n));

    Rng rng(seed);

    // Farthest-first seed selection; ties resolved by lowest row index.
    std::vector<std::size_t> seeds;
    seeds.push_back(static_cast<std::size_t>(rng.below(n)));
    std::vector<double> min_dist(n);
    for (std::size_t t = 0; t < n; ++t)
        min_dist[t] = dist(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(seeds[0]));
    while (seeds.size() < static_cast<std::size_t>(pseudo_classes)) {
        std::size_t best = n;
        double best_dist = -1.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (std::find(seeds.begin(), seeds.end(), t) != seeds.end()) continue;
            if (min_dist[t] > best_dist) {
                best_dist = min_dist[t];
                best = t;
            }
        }
        seeds.push_back(best);
        for (std::size_t t = 0; t < n; ++t)
            min_dist[t] = std::min(min_dist[t], dist(static_cast<Eigen::Index>(t),
                                                     static_cast<Eigen::Index>(best)));
    }

    PseudoHypothesis hyp;
    hyp.pseudo_class_count = pseudo_classes;
    hyp.sampler_id = SamplerId::exotic;

    std::vector<bool> assigned(n, false);
    for (std::size_t s = 0; s < seeds.size(); ++s) assigned[seeds[s]] = true;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const int pseudo = static_cast<int>(s);
        hyp.assignments.emplace_back(train.source_ids[seeds[s]], pseudo);
        // m nearest unassigned neighbors of this seed; ties by lowest index.
        for (int taken = 0; taken < neighbors_per_seed; ++taken) {
            std::size_t best = n;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n; ++t) {
                if (assigned[t]) continue;
                const double d =
                    dist(static_cast<Eigen::Index>(seeds[s]), static_cast<Eigen::Index>(t));
                if (d < best_dist) {
                    best_dist = d;
                    best = t;
                }
            }
            assigned[best] = true;
            hyp.assignments.emplace_back(train.source_ids[best], pseudo);
        }
    }
    return hyp;
}

} // namespace

PseudoHypothesis sample_uniform_hypothesis(const DescriptorSet& train, int pseudo_classes,
                                           int samples_per_class, std::uint64_t seed) {
    const std::size_t n = train.n_samples();
    if (pseudo_classes < 2)
        raise(ErrorKind::invalid_argument, "need at least 2 pseudo-classes");
    if (samples_per_class < 1)
        raise(ErrorKind::invalid_argument, "samples_per_class must be >= 1");
    const std::size_t need =
        static_cast<std::size_t>(pseudo_classes) * static_cast<std::size_t>(samples_per_class);
    if (need > n)
        raise(ErrorKind::invalid_argument,
              "hypothesis needs " + std::to_string(need) + " samples, pool has " +
                  std::to_string(n));

    // Partial Fisher-Yates: the first `need` entries are a uniform draw
    // without replacement, in draw order.
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(seed);
    for (std::size_t i = 0; i < need; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(ids[i], ids[j]);
    }

    PseudoHypothesis hyp;
    hyp.pseudo_class_count = pseudo_classes;
    hyp.sampler_id = SamplerId::uniform;
    for (std::size_t k = 0; k < need; ++k)
        hyp.assignments.emplace_back(train.source_ids[ids[k]],
                                     static_cast<int>(k / static_cast<std::size_t>(samples_per_class)));
    return hyp;
}

std::size_t ProjectionEnsemble::output_dim() const {
    std::size_t dim = 0;
    for (const auto& bank : banks)
        dim += static_cast<std::size_t>(bank.hypothesis.pseudo_class_count);
    return dim;
}

ProjectionEnsemble fit_ensemble(const DescriptorSet& train, const EnsembleParams& params,
                                std::uint64_t seed) {
    if (params.hypothesis_count < 1)
        raise(ErrorKind::invalid_argument, "ensemble needs at least one hypothesis");

    // Map original ids back to view rows once.
    std::vector<std::size_t> row_of;
    std::size_t max_id = 0;
    for (std::size_t id : train.source_ids) max_id = std::max(max_id, id);
    row_of.assign(max_id + 1, static_cast<std::size_t>(-1));
    for (std::size_t r = 0; r < train.source_ids.size(); ++r)
        row_of[train.source_ids[r]] = r;

    const Eigen::MatrixXd features = train.concat_all();
    // One distance matrix serves every exotic hypothesis.
    Eigen::MatrixXd distances;
    if (params.sampler_id == SamplerId::exotic)
        distances = averaged_chi2_distances(train, train);

    ProjectionEnsemble ensemble;
    ensemble.use_sigmoid = params.use_sigmoid;
    ensemble.seed = seed;
    ensemble.pseudo_classes = params.pseudo_classes;
    ensemble.neighbors_per_seed = params.neighbors_per_seed;
    ensemble.sampler_id = params.sampler_id;
    ensemble.banks.reserve(static_cast<std::size_t>(params.hypothesis_count));

    for (int t = 0; t < params.hypothesis_count; ++t) {
        const std::uint64_t hyp_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
        try {
            PseudoHypothesis hyp =
                params.sampler_id == SamplerId::exotic
                    ? sample_exotic_with_distances(train, distances, params.pseudo_classes,
                                                   params.neighbors_per_seed, hyp_seed)
                    : sample_uniform_hypothesis(train, params.pseudo_classes,
                                                params.neighbors_per_seed + 1, hyp_seed);

            Eigen::MatrixXd X(static_cast<Eigen::Index>(hyp.assignments.size()),
                              features.cols());
            std::vector<int> pseudo_labels(hyp.assignments.size());
            for (std::size_t k = 0; k < hyp.assignments.size(); ++k) {
                X.row(static_cast<Eigen::Index>(k)) =
                    features.row(static_cast<Eigen::Index>(row_of[hyp.assignments[k].first]));
                pseudo_labels[k] = hyp.assignments[k].second;
            }
            ProjectionEnsemble::HypothesisBank bank;
            bank.models = train_one_vs_rest(X, pseudo_labels, hyp.pseudo_class_count,
                                            LinearLoss::hinge_squared, params.regularization_c,
                                            derive_seed(hyp_seed, 0x5eedULL));
            bank.hypothesis = std::move(hyp);
            ensemble.banks.push_back(std::move(bank));
        } catch (const Error& e) {
            raise(e.kind(), "hypothesis " + std::to_string(t) + ": " + e.what());
        }
    }
    return ensemble;
}

Eigen::VectorXd project(const ProjectionEnsemble& ensemble,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd phi(static_cast<Eigen::Index>(ensemble.output_dim()));
    Eigen::Index k = 0;
    for (const auto& bank : ensemble.banks)
        for (const auto& model : bank.models)
            phi[k++] = ensemble.use_sigmoid ? probability_value(model, x)
                                            : decision_value(model, x);
    return phi;
}

Eigen::MatrixXd project_all(const ProjectionEnsemble& ensemble, const DescriptorSet& data) {
    const Eigen::MatrixXd features = data.concat_all();
    Eigen::MatrixXd phi(features.rows(), static_cast<Eigen::Index>(ensemble.output_dim()));
    for (Eigen::Index i = 0; i < features.rows(); ++i)
        phi.row(i) = project(ensemble, features.row(i).transpose());
    return phi;
}

void save_ensemble(const ProjectionEnsemble& ensemble, const std::string& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) raise(ErrorKind::io, "cannot create directory '" + directory + "'");

    std::ostringstream manifest;
    manifest << "T=" << ensemble.banks.size() << "\n"
             << "c=" << ensemble.pseudo_classes << "\n"
             << "m=" << ensemble.neighbors_per_seed << "\n"
             << "sampler_id=" << sampler_name(ensemble.sampler_id) << "\n"
             << "use_sigmoid=" << (ensemble.use_sigmoid ? "true" : "false") << "\n"
             << "seed=" << ensemble.seed << "\n";
    write_file(directory + "/manifest.txt", manifest.str());

    for (std::size_t t = 0; t < ensemble.banks.size(); ++t)
        for (std::size_t c = 0; c < ensemble.banks[t].models.size(); ++c)
            save_linear_model_csv(ensemble.banks[t].models[c],
                                  directory + "/hypothesis_" + std::to_string(t) + "_class_" +
                                      std::to_string(c) + ".csv");
}

} // namespace epl
