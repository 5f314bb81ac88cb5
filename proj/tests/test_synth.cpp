#include "core/synth.hpp"

#include "core/error.hpp"
#include "core/kernels.hpp"
#include "core/rng.hpp"

#include <doctest.h>

#include <cmath>

using epl::Error;
using epl::SynthSpec;

namespace {

SynthSpec small_spec() {
    SynthSpec spec;
    spec.class_count = 3;
    spec.samples_per_class = 12;
    spec.groups = {{8, 0.05}, {12, 0.05}};
    spec.manifold_strength = 0.5;
    spec.seed = 99;
    return spec;
}

} // namespace

TEST_CASE("generated rows are unit-sum non-negative histograms") {
    const auto data = epl::generate(small_spec());
    CHECK(data.n_samples() == 36);
    CHECK(data.group_count() == 2);
    data.validate();
    for (const auto& g : data.groups) {
        CHECK((g.array() >= 0.0).all());
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            CHECK(std::abs(g.row(i).sum() - 1.0) <= 1e-9);
    }
}

TEST_CASE("generation is a pure function of the spec") {
    const auto a = epl::generate(small_spec());
    const auto b = epl::generate(small_spec());
    CHECK(a.labels == b.labels);
    for (std::size_t g = 0; g < a.group_count(); ++g)
        CHECK(a.groups[g] == b.groups[g]);

    auto other_spec = small_spec();
    other_spec.seed = 100;
    const auto c = epl::generate(other_spec);
    CHECK(a.groups[0] != c.groups[0]);
}

TEST_CASE("labels are balanced exactly") {
    const auto data = epl::generate(small_spec());
    std::vector<int> counts(3, 0);
    for (int label : data.labels) ++counts[static_cast<std::size_t>(label)];
    CHECK(counts == std::vector<int>{12, 12, 12});
}

TEST_CASE("strong manifold structure separates classes in chi-square distance") {
    SynthSpec spec;
    spec.class_count = 4;
    spec.samples_per_class = 25;
    spec.groups = {{16, 0.005}, {16, 0.005}};
    spec.manifold_strength = 1.0;
    spec.seed = 3;
    const auto data = epl::generate(spec);
    const auto dist = epl::averaged_chi2_distances(data, data);

    // For sampled triples (anchor, same-class, other-class) the within-class
    // distance should be smaller almost always.
    epl::Rng rng(17);
    int wins = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        const auto n = data.n_samples();
        const std::size_t anchor = static_cast<std::size_t>(rng.below(n));
        std::size_t same = anchor;
        while (same == anchor || data.labels[same] != data.labels[anchor])
            same = static_cast<std::size_t>(rng.below(n));
        std::size_t other = anchor;
        while (data.labels[other] == data.labels[anchor])
            other = static_cast<std::size_t>(rng.below(n));
        if (dist(static_cast<Eigen::Index>(anchor), static_cast<Eigen::Index>(same)) <
            dist(static_cast<Eigen::Index>(anchor), static_cast<Eigen::Index>(other)))
            ++wins;
    }
    CHECK(wins >= static_cast<int>(0.95 * trials));
}

TEST_CASE("invalid specs are rejected") {
    auto spec = small_spec();
    spec.class_count = 1;
    CHECK_THROWS_AS(epl::generate(spec), Error);

    spec = small_spec();
    spec.samples_per_class = 3;
    CHECK_THROWS_AS(epl::generate(spec), Error);

    spec = small_spec();
    spec.groups.clear();
    CHECK_THROWS_AS(epl::generate(spec), Error);

    spec = small_spec();
    spec.groups[0].dim = 1;
    CHECK_THROWS_AS(epl::generate(spec), Error);

    spec = small_spec();
    spec.manifold_strength = 1.5;
    CHECK_THROWS_AS(epl::generate(spec), Error);
}
