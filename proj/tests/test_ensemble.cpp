#include "core/ensemble.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/kernels.hpp"
#include "core/rng.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

using epl::Error;
using epl::EnsembleParams;
using epl::SamplerId;
using test_helpers::one_group;

namespace {

// Histograms [1-t, t]; the chi-square distance grows monotonically with |dt|,
// so these behave like points at positions 0, 1 and 10 on a line.
epl::DescriptorSet line_proxies() {
    Eigen::MatrixXd g(3, 2);
    g << 1.0, 0.0, 0.95, 0.05, 0.5, 0.5;
    return one_group(g, {0, 0, 1}, 2);
}

// Find a sampler seed whose first farthest-first pick is the wanted row.
std::uint64_t seed_with_first_pick(const epl::DescriptorSet& data, int c, int m,
                                   std::size_t wanted_first) {
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        const auto hyp = epl::sample_exotic_hypothesis(data, c, m, seed);
        if (hyp.assignments.front().first == wanted_first) return seed;
    }
    FAIL("no seed found with the requested first pick");
    return 0;
}

} // namespace

TEST_CASE("farthest-first seeding picks the extremes") {
    const auto data = line_proxies();
    const auto seed = seed_with_first_pick(data, 2, 0, 0);
    const auto hyp = epl::sample_exotic_hypothesis(data, 2, 0, seed);
    REQUIRE(hyp.assignments.size() == 2);
    CHECK(hyp.assignments[0].first == 0);
    CHECK(hyp.assignments[1].first == 2); // position 10 is farthest from position 0

    // Exhaustive check: the second seed maximizes distance to the first.
    const auto dist = epl::averaged_chi2_distances(data, data);
    double best = -1.0;
    std::size_t best_row = 0;
    for (std::size_t t = 1; t < 3; ++t)
        if (dist(0, static_cast<Eigen::Index>(t)) > best) {
            best = dist(0, static_cast<Eigen::Index>(t));
            best_row = t;
        }
    CHECK(hyp.assignments[1].first == best_row);
}

TEST_CASE("each seed absorbs its nearest unassigned neighbors") {
    // Two tight pairs: rows {0,1} and rows {2,3}.
    Eigen::MatrixXd g(4, 2);
    g << 0.95, 0.05, 0.9, 0.1, 0.1, 0.9, 0.05, 0.95;
    const auto data = one_group(g, {0, 0, 1, 1}, 2);
    const auto hyp = epl::sample_exotic_hypothesis(data, 2, 1, 3);
    REQUIRE(hyp.assignments.size() == 4);

    std::vector<std::set<std::size_t>> classes(2);
    for (const auto& [id, pseudo] : hyp.assignments)
        classes[static_cast<std::size_t>(pseudo)].insert(id);
    const std::set<std::size_t> pair_a = {0, 1};
    const std::set<std::size_t> pair_b = {2, 3};
    CHECK(((classes[0] == pair_a && classes[1] == pair_b) ||
           (classes[0] == pair_b && classes[1] == pair_a)));
}

TEST_CASE("exotic sampler validates pool size") {
    const auto data = line_proxies();
    CHECK_THROWS_AS(epl::sample_exotic_hypothesis(data, 2, 1, 0), Error); // needs 4 > 3
    CHECK_THROWS_AS(epl::sample_exotic_hypothesis(data, 1, 0, 0), Error);
}

TEST_CASE("uniform sampler draws balanced pseudo-classes deterministically") {
    epl::Rng feature_rng(10);
    Eigen::MatrixXd g(30, 3);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = feature_rng.unit();
    std::vector<int> labels(30, 0);
    labels[29] = 1;
    const auto data = one_group(g, labels, 2);

    const auto hyp = epl::sample_uniform_hypothesis(data, 3, 4, 7);
    REQUIRE(hyp.assignments.size() == 12);
    std::vector<int> counts(3, 0);
    std::set<std::size_t> distinct;
    for (const auto& [id, pseudo] : hyp.assignments) {
        ++counts[static_cast<std::size_t>(pseudo)];
        distinct.insert(id);
    }
    CHECK(counts == std::vector<int>{4, 4, 4});
    CHECK(distinct.size() == 12); // without replacement

    const auto again = epl::sample_uniform_hypothesis(data, 3, 4, 7);
    CHECK(hyp.assignments == again.assignments);

    // Distinct seeds should produce distinct assignments essentially always.
    bool any_different = false;
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const auto other = epl::sample_uniform_hypothesis(data, 3, 4, seed);
        if (other.assignments != hyp.assignments) any_different = true;
    }
    CHECK(any_different);

    CHECK_THROWS_AS(epl::sample_uniform_hypothesis(data, 3, 11, 0), Error);
}

TEST_CASE("ensemble output dimension is T times c") {
    epl::Rng feature_rng(20);
    Eigen::MatrixXd g(40, 4);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = 0.1 + feature_rng.unit();
    for (int i = 0; i < 40; ++i) g.row(i) /= g.row(i).sum();
    std::vector<int> labels(40, 0);
    for (int i = 20; i < 40; ++i) labels[static_cast<std::size_t>(i)] = 1;
    const auto data = one_group(g, labels, 2);

    EnsembleParams params;
    params.pseudo_classes = 2;
    params.neighbors_per_seed = 1;
    params.hypothesis_count = 1;
    auto ensemble = epl::fit_ensemble(data, params, 5);
    CHECK(ensemble.output_dim() == 2);

    params.hypothesis_count = 10;
    params.pseudo_classes = 5;
    ensemble = epl::fit_ensemble(data, params, 5);
    CHECK(ensemble.output_dim() == 50);

    const auto phi = epl::project(ensemble, data.concat_row(0));
    CHECK(phi.size() == 50);
}

TEST_CASE("refitting with the same seed reproduces the projection bit for bit") {
    epl::Rng feature_rng(30);
    Eigen::MatrixXd g(24, 4);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = 0.1 + feature_rng.unit();
    for (int i = 0; i < 24; ++i) g.row(i) /= g.row(i).sum();
    std::vector<int> labels(24, 0);
    labels[23] = 1;
    const auto data = one_group(g, labels, 2);

    EnsembleParams params;
    params.hypothesis_count = 4;
    params.pseudo_classes = 3;
    params.neighbors_per_seed = 2;

    const auto a = epl::fit_ensemble(data, params, 99);
    const auto b = epl::fit_ensemble(data, params, 99);
    const Eigen::VectorXd pa = epl::project(a, data.concat_row(5));
    const Eigen::VectorXd pb = epl::project(b, data.concat_row(5));
    CHECK(pa == pb);

    // hypotheses draw different subsets across t
    bool differs = false;
    for (std::size_t t = 1; t < a.banks.size(); ++t)
        if (a.banks[t].hypothesis.assignments != a.banks[0].hypothesis.assignments)
            differs = true;
    CHECK(differs);
}

TEST_CASE("assignments only reference pool rows") {
    epl::Rng feature_rng(40);
    Eigen::MatrixXd g(20, 3);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = 0.1 + feature_rng.unit();
    std::vector<int> labels(20, 0);
    labels[19] = 1;
    const auto full = one_group(g, labels, 2);
    const auto view = epl::restrict(full, {2, 3, 5, 7, 11, 13, 17, 19, 4, 6, 8, 10});

    EnsembleParams params;
    params.hypothesis_count = 6;
    params.pseudo_classes = 2;
    params.neighbors_per_seed = 2;
    const auto ensemble = epl::fit_ensemble(view, params, 1);

    const std::set<std::size_t> allowed(view.source_ids.begin(), view.source_ids.end());
    for (const auto& bank : ensemble.banks)
        for (const auto& [id, pseudo] : bank.hypothesis.assignments)
            CHECK(allowed.count(id) == 1);
}

TEST_CASE("projection applies the sigmoid switch") {
    epl::ProjectionEnsemble ensemble;
    ensemble.use_sigmoid = true;
    ensemble.pseudo_classes = 2;
    epl::ProjectionEnsemble::HypothesisBank bank;
    bank.hypothesis.pseudo_class_count = 2;
    epl::LinearModel zero;
    zero.weights = Eigen::VectorXd::Zero(3);
    zero.bias = 0.0;
    bank.models = {zero, zero};
    ensemble.banks.push_back(bank);

    Eigen::VectorXd x(3);
    x << 0.3, 0.3, 0.4;
    const auto phi_sig = epl::project(ensemble, x);
    CHECK(phi_sig == Eigen::VectorXd::Constant(2, 0.5));

    ensemble.use_sigmoid = false;
    const auto phi_raw = epl::project(ensemble, x);
    CHECK(phi_raw == Eigen::VectorXd::Zero(2));
}

TEST_CASE("projected values stay inside (0,1) with the sigmoid enabled") {
    epl::Rng feature_rng(50);
    Eigen::MatrixXd g(18, 4);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = 0.1 + feature_rng.unit();
    for (int i = 0; i < 18; ++i) g.row(i) /= g.row(i).sum();
    std::vector<int> labels(18, 0);
    labels[17] = 1;
    const auto data = one_group(g, labels, 2);

    EnsembleParams params;
    params.hypothesis_count = 3;
    params.pseudo_classes = 3;
    params.neighbors_per_seed = 1;
    const auto ensemble = epl::fit_ensemble(data, params, 12);
    const auto phi = epl::project_all(ensemble, data);
    CHECK((phi.array() > 0.0).all());
    CHECK((phi.array() < 1.0).all());
}

TEST_CASE("T = 0 is rejected") {
    const auto data = line_proxies();
    EnsembleParams params;
    params.hypothesis_count = 0;
    CHECK_THROWS_AS(epl::fit_ensemble(data, params, 1), Error);
}

TEST_CASE("failed hypotheses carry their index in the error") {
    const auto data = line_proxies(); // 3 rows: c=2, m=1 needs 4
    EnsembleParams params;
    params.hypothesis_count = 2;
    params.pseudo_classes = 2;
    params.neighbors_per_seed = 1;
    try {
        epl::fit_ensemble(data, params, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("hypothesis 0") != std::string::npos);
    }
}

TEST_CASE("save_ensemble writes a manifest and per-hypothesis model CSVs") {
    epl::Rng feature_rng(60);
    Eigen::MatrixXd g(16, 3);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = 0.1 + feature_rng.unit();
    std::vector<int> labels(16, 0);
    labels[15] = 1;
    const auto data = one_group(g, labels, 2);

    EnsembleParams params;
    params.hypothesis_count = 2;
    params.pseudo_classes = 2;
    params.neighbors_per_seed = 1;
    params.sampler_id = SamplerId::uniform;
    params.use_sigmoid = false;
    const auto ensemble = epl::fit_ensemble(data, params, 21);

    const auto dir = std::filesystem::temp_directory_path() / "eplab_test_ensemble";
    std::filesystem::remove_all(dir);
    epl::save_ensemble(ensemble, dir.string());

    const auto manifest = epl::read_lines((dir / "manifest.txt").string());
    REQUIRE(manifest.size() == 6);
    CHECK(manifest[0] == "T=2");
    CHECK(manifest[1] == "c=2");
    CHECK(manifest[2] == "m=1");
    CHECK(manifest[3] == "sampler_id=uniform");
    CHECK(manifest[4] == "use_sigmoid=false");
    CHECK(manifest[5] == "seed=21");

    for (int t = 0; t < 2; ++t)
        for (int c = 0; c < 2; ++c) {
            const auto model_lines = epl::read_lines(
                (dir / ("hypothesis_" + std::to_string(t) + "_class_" + std::to_string(c) +
                        ".csv")).string());
            CHECK(model_lines[0] == "dim,weight");
            CHECK(model_lines.size() == 1 + 3 + 1); // header + dims + bias
            CHECK(model_lines.back().rfind("bias,", 0) == 0);
        }
    std::filesystem::remove_all(dir);
}
