#include "core/kernels.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "test_helpers.hpp"

#include <doctest.h>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>

using epl::Error;
using epl::KernelId;
using test_helpers::make_set;
using test_helpers::one_group;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

} // namespace

TEST_CASE("chi2_distance matches hand-evaluated values") {
    CHECK(epl::chi2_distance(vec({0.3, 0.7}), vec({0.3, 0.7})) == 0.0);
    CHECK(epl::chi2_distance(vec({1, 0}), vec({0, 1})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(epl::chi2_distance(vec({0.5, 0.5}), vec({1, 0})) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    // zero bins on both sides contribute nothing
    CHECK(epl::chi2_distance(vec({0, 1}), vec({0, 1})) == 0.0);
}

TEST_CASE("chi2_distance rejects bad input") {
    CHECK_THROWS_AS(epl::chi2_distance(vec({1, 0}), vec({1, 0, 0})), Error);
    CHECK_THROWS_AS(epl::chi2_distance(vec({-0.1, 1.1}), vec({1, 0})), Error);
}

TEST_CASE("chi2_distance is symmetric and non-negative on random histograms") {
    epl::Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + static_cast<int>(rng.below(16));
        Eigen::VectorXd h(dim), g(dim);
        for (int j = 0; j < dim; ++j) {
            h[j] = rng.unit();
            g[j] = rng.below(4) == 0 ? 0.0 : rng.unit(); // exercise zero bins
        }
        const double dhg = epl::chi2_distance(h, g);
        const double dgh = epl::chi2_distance(g, h);
        CHECK(dhg >= 0.0);
        CHECK(dhg == dgh);
    }
}

TEST_CASE("averaged_chi2_distance averages the per-group distances") {
    // Group 0 puts the pair at distance 1, group 1 at distance 0.
    Eigen::MatrixXd g0(2, 2), g1(2, 2);
    g0 << 1, 0, 0, 1;
    g1 << 0.5, 0.5, 0.5, 0.5;
    const auto two_groups = make_set({g0, g1}, {0, 1}, 2);
    CHECK(epl::averaged_chi2_distance(two_groups, 0, two_groups, 1) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(epl::averaged_chi2_distance(two_groups, 0, two_groups, 0) == 0.0);

    const auto single = one_group(g0, {0, 1}, 2);
    CHECK(epl::averaged_chi2_distance(single, 0, single, 1) ==
          epl::chi2_distance(g0.row(0).transpose(), g0.row(1).transpose()));
}

TEST_CASE("build_gram produces the stated kernel values") {
    SUBCASE("chi2_exp self-Gram has unit diagonal") {
        Eigen::MatrixXd g(3, 2);
        g << 0.2, 0.8, 0.9, 0.1, 0.5, 0.5;
        const auto data = one_group(g, {0, 1, 0}, 2);
        const auto gram = epl::build_gram(data, data, KernelId::chi2_exp, 0.7);
        for (int i = 0; i < 3; ++i) CHECK(gram.values(i, i) == 1.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                CHECK(gram.values(i, j) > 0.0);
                CHECK(gram.values(i, j) <= 1.0);
                CHECK(gram.values(i, j) == gram.values(j, i));
            }
    }
    SUBCASE("linear kernel on one-hot rows is the identity") {
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
        const auto data = one_group(g, {0, 1, 0, 1}, 2);
        const auto gram = epl::build_gram(data, data, KernelId::linear);
        CHECK(gram.values == Eigen::MatrixXd::Identity(4, 4));
    }
    SUBCASE("chi2_exp value of a known pair") {
        Eigen::MatrixXd g(2, 2);
        g << 0.5, 0.5, 1, 0;
        const auto data = one_group(g, {0, 1}, 2);
        const auto gram = epl::build_gram(data, data, KernelId::chi2_exp, 1.0 / 3.0);
        // distance 1/3 at bandwidth 1/3 -> exp(-1)
        CHECK(gram.values(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    }
    SUBCASE("bandwidth must be positive") {
        Eigen::MatrixXd g(2, 2);
        g << 1, 0, 0, 1;
        const auto data = one_group(g, {0, 1}, 2);
        CHECK_THROWS_AS(epl::build_gram(data, data, KernelId::chi2_exp, 0.0), Error);
    }
}

TEST_CASE("cross-Gram equals the transposed reverse Gram") {
    epl::Rng rng(77);
    Eigen::MatrixXd ga(5, 3), gb(4, 3);
    for (Eigen::Index i = 0; i < ga.size(); ++i) ga.data()[i] = rng.unit();
    for (Eigen::Index i = 0; i < gb.size(); ++i) gb.data()[i] = rng.unit();
    const auto a = one_group(ga, {0, 1, 0, 1, 0}, 2);
    const auto b = one_group(gb, {0, 1, 0, 1}, 2);
    for (KernelId kernel : {KernelId::linear, KernelId::chi2_exp}) {
        const auto ab = epl::build_gram(a, b, kernel, 0.5);
        const auto ba = epl::build_gram(b, a, kernel, 0.5);
        CHECK((ab.values - ba.values.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("chi2_exp Gram is numerically PSD on random histogram subsets") {
    epl::Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(5)); // up to 6 samples
        Eigen::MatrixXd g(n, 6);
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.unit();
        for (int i = 0; i < n; ++i) g.row(i) /= g.row(i).sum();
        std::vector<int> labels(static_cast<std::size_t>(n), 0);
        labels.back() = 1;
        const auto data = one_group(g, labels, 2);
        const auto gram = epl::build_gram(data, data, KernelId::chi2_exp, 0.4);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver(gram.values);
        CHECK(eigensolver.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("mean_distance_bandwidth is the pair mean with a unit fallback") {
    SUBCASE("identical samples fall back to 1") {
        Eigen::MatrixXd g(2, 2);
        g << 0.5, 0.5, 0.5, 0.5;
        const auto data = one_group(g, {0, 1}, 2);
        CHECK(epl::mean_distance_bandwidth(data) == 1.0);
    }
    SUBCASE("single pair at distance 1") {
        Eigen::MatrixXd g(2, 2);
        g << 1, 0, 0, 1;
        const auto data = one_group(g, {0, 1}, 2);
        CHECK(epl::mean_distance_bandwidth(data) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("three samples average their pairwise distances") {
        // Disjoint supports give distances (1+7)/2=4, (1+1)/2=1, (1+7)/2=4;
        // mean (1+4+4)/3 = 3.
        Eigen::MatrixXd g(3, 3);
        g << 1, 0, 0, 0, 1, 0, 0, 0, 7;
        const auto data = one_group(g, {0, 1, 0}, 2);
        CHECK(epl::mean_distance_bandwidth(data) == doctest::Approx(3.0).epsilon(1e-15));
        // cross-check against the direct pair mean of chi2 distances
        const double direct = (epl::averaged_chi2_distance(data, 0, data, 1) +
                               epl::averaged_chi2_distance(data, 0, data, 2) +
                               epl::averaged_chi2_distance(data, 1, data, 2)) /
                              3.0;
        CHECK(epl::mean_distance_bandwidth(data) == doctest::Approx(direct).epsilon(1e-15));
    }
    SUBCASE("needs two samples") {
        Eigen::MatrixXd g(1, 2);
        g << 1, 0;
        const auto data = one_group(g, {0}, 1);
        CHECK_THROWS_AS(epl::mean_distance_bandwidth(data), Error);
    }
}

TEST_CASE("gram CSV dump has the i,j,value schema") {
    Eigen::MatrixXd g(2, 2);
    g << 1, 0, 0, 1;
    const auto data = one_group(g, {0, 1}, 2);
    const auto gram = epl::build_gram(data, data, KernelId::linear);
    const auto dir = std::filesystem::temp_directory_path() / "eplab_test_gram";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "gram.csv").string();
    epl::save_gram_csv(gram, path);
    const auto lines = epl::read_lines(path);
    CHECK(lines[0] == "i,j,value");
    CHECK(lines.size() == 5);
    CHECK(lines[1] == "0,0,1");
    CHECK(lines[2] == "0,1,0");
    std::filesystem::remove_all(dir);
}
