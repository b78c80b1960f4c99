#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "spectrace/bounds.hpp"
#include "spectrace/errors.hpp"
#include "spectrace/reference.hpp"
#include "test_support.hpp"

using namespace spectrace;

TEST_CASE("hutchinson sample counts") {
    CHECK(hutchinson_sample_count(1.0, 2.0 / std::exp(1.0)) == 6);  // ln(2/delta) = 1
    CHECK(hutchinson_sample_count(0.1, 0.05) == 2214);              // ceil(600 ln 40)
    // Halving epsilon quadruples the count, up to the ceilings.
    for (double eps : {0.5, 0.21, 0.09}) {
        const auto m = hutchinson_sample_count(eps, 0.1);
        const auto m_half = hutchinson_sample_count(eps / 2.0, 0.1);
        CHECK(m_half >= 4 * (m - 1));
        CHECK(m_half <= 4 * m);
    }
    CHECK_THROWS_AS(hutchinson_sample_count(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(hutchinson_sample_count(0.5, 1.5), DomainError);
}

TEST_CASE("tail bound formula on the two-cycle") {
    // B = [[0,1],[1,0]]: |B|_F^2 = 2, |B|_2 = 1; eps = 2, one level, m = 1.
    const LevelNormData norms[] = {{std::sqrt(2.0), 1.0, 1.0}};
    const std::int64_t m[] = {1};
    const double bound = multilevel_tail_bound(norms, m, 2.0);
    CHECK(bound == doctest::Approx(2.0 * std::exp(-1.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("tail bound decreases to zero in epsilon and is monotone in m and norms") {
    const LevelNormData norms[] = {{2.0, 0.7, 2.0}, {0.5, 0.2, 8.0}};
    double previous = 2.0;
    for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0, 64.0}) {
        const std::int64_t m[] = {3, 2};
        const double bound = multilevel_tail_bound(norms, m, eps);
        CHECK(bound < previous);
        previous = bound;
    }
    CHECK(previous < 1e-6);

    const std::int64_t base[] = {3, 2};
    const std::int64_t more[] = {6, 2};
    CHECK(multilevel_tail_bound(norms, more, 1.0) <= multilevel_tail_bound(norms, base, 1.0));
    const LevelNormData larger[] = {{2.5, 0.7, 2.0}, {0.5, 0.2, 8.0}};
    CHECK(multilevel_tail_bound(larger, base, 1.0) >= multilevel_tail_bound(norms, base, 1.0));
}

TEST_CASE("sample plan: single level closed form and self-consistency") {
    const double eps = 0.5, delta = 0.1;
    const LevelNormData norms[] = {{1.5, 0.8, 4.0}};
    const auto plan = multilevel_sample_plan(norms, eps, delta);
    const double v = 1.5 * 1.5 + eps * 0.8;
    const double expected = 8.0 / (eps * eps) * std::log(2.0 / delta) * v;
    CHECK(plan.samples.size() == 1);
    CHECK(plan.samples[0] == static_cast<std::int64_t>(std::ceil(expected)));
    CHECK(plan.bound <= delta);
}

TEST_CASE("sample plan bound holds for random queries") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const int levels = 1 + static_cast<int>(3 * test_support::uniform(seed, 0));
        std::vector<LevelNormData> norms;
        for (int k = 0; k < levels; ++k) {
            const double frob = 0.1 + 4.0 * test_support::uniform(seed, 10 + static_cast<std::uint64_t>(k));
            const double spec = frob * test_support::uniform(seed, 20 + static_cast<std::uint64_t>(k));
            const double cost = 1.0 + 20.0 * test_support::uniform(seed, 30 + static_cast<std::uint64_t>(k));
            norms.push_back({frob, spec, cost});
        }
        const double eps = 0.2 + 2.0 * test_support::uniform(seed, 40);
        const double delta = 0.02 + 0.4 * test_support::uniform(seed, 41);
        const auto plan = multilevel_sample_plan(norms, eps, delta);
        CHECK(plan.bound <= delta * (1.0 + 1e-12));

        // Total cost agrees with the closed form up to the ceiling slack.
        double integer_cost = 0.0, slack = 0.0;
        for (std::size_t k = 0; k < norms.size(); ++k) {
            integer_cost += static_cast<double>(plan.samples[k]) * norms[k].cost;
            slack += norms[k].cost;
        }
        CHECK(integer_cost >= plan.predicted_cost - 1e-9);
        CHECK(integer_cost <= plan.predicted_cost + slack * (1.0 + 1e-9));
    }
}

TEST_CASE("level matrices: telescoping, hollow diagonals, and the L=1 reduction") {
    const int d = 24;
    const Eigen::MatrixXd a = test_support::random_symmetric(d, 7, 1.2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0) - 0.05;
    const double hi = es.eigenvalues()(d - 1) + 0.05;
    const auto model = chebyshev_coefficients(FunctionSpec::exp(), 25, lo, hi);

    const LevelPlan plan{{2, 6, 25}, 0.0};
    const auto lm = build_level_matrices(a, model, plan);
    REQUIRE(lm.full.size() == 3);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
    for (const auto& m : lm.full) sum += m;
    const Eigen::MatrixXd dense_p = reference::dense_interpolant_matrix(a, model);
    CHECK((sum - dense_p).cwiseAbs().maxCoeff() < 1e-10);
    for (std::size_t k = 0; k < lm.hollow.size(); ++k) {
        CHECK(lm.hollow[k].diagonal().cwiseAbs().maxCoeff() == 0.0);
        CHECK(lm.spectral[k] <= lm.frob[k] * (1.0 + 1e-12));
    }

    // L = 1: the single level matrix is the interpolant itself, which tracks
    // the functional calculus to interpolation accuracy.
    const auto single = build_level_matrices(a, model, LevelPlan{{25}, 0.0});
    REQUIRE(single.full.size() == 1);
    CHECK((single.full[0] - dense_p).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full_es(a);
    Eigen::VectorXd fx = full_es.eigenvalues();
    for (Eigen::Index i = 0; i < fx.size(); ++i) fx(i) = std::exp(fx(i));
    const Eigen::MatrixXd exact =
        full_es.eigenvectors() * fx.asDiagonal() * full_es.eigenvectors().transpose();
    CHECK((single.full[0] - exact).cwiseAbs().maxCoeff() < 1e-8 * fx.maxCoeff());
}

TEST_CASE("multilevel bound with L=1, m=1 reduces to the single-probe bound") {
    const int d = 10;
    const Eigen::MatrixXd a = test_support::random_symmetric_contracted(d, 3, 0.9);
    const auto model = chebyshev_coefficients(FunctionSpec::exp(), 8, -1.0, 1.0);
    const auto lm = build_level_matrices(a, model, LevelPlan{{8}, 0.0});
    const LevelNormData norms[] = {{lm.frob[0], lm.spectral[0], 8.0}};
    const std::int64_t one[] = {1};
    for (double eps : {0.5, 1.0, 2.0}) {
        const double expected =
            2.0 * std::exp(-(eps * eps) /
                           (8.0 * lm.frob[0] * lm.frob[0] + 8.0 * eps * lm.spectral[0]));
        CHECK(multilevel_tail_bound(norms, one, eps) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("empirical failure frequency stays below the bound at d=20") {
    const int d = 20;
    const Eigen::MatrixXd dense = test_support::random_symmetric_contracted(d, 9, 0.9);
    const auto op = make_explicit(test_support::sparse_from_dense(dense, true));
    const auto model = chebyshev_coefficients(FunctionSpec::exp(), 8, -1.0, 1.0);
    const LevelPlan plan{{3, 8}, 0.0};
    const auto lm = build_level_matrices(dense, model, plan);
    const double exact = reference::dense_interpolant_matrix(dense, model).trace();

    AllocationPlan alloc;
    alloc.samples = {3, 2};
    const std::vector<LevelNormData> norms{{lm.frob[0], lm.spectral[0], 3.0},
                                           {lm.frob[1], lm.spectral[1], 8.0}};

    // Pick an epsilon whose bound is comfortably inside (0, 1).
    double eps = 1.0;
    while (multilevel_tail_bound(norms, alloc.samples, eps) > 0.4) eps *= 1.3;
    const double bound = multilevel_tail_bound(norms, alloc.samples, eps);

    const int trials = 2000;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        const ProbeStream stream(9000 + static_cast<std::uint64_t>(t), d);
        const auto report = multilevel_estimate(*op, model, plan, alloc, stream);
        if (std::abs(report.estimate - exact) >= eps) ++failures;
    }
    CHECK(static_cast<double>(failures) / trials <= bound);
}

TEST_CASE("bound input validation") {
    const LevelNormData norms[] = {{1.0, 0.5, 2.0}};
    const std::int64_t m[] = {1};
    CHECK_THROWS_AS(multilevel_tail_bound({}, {}, 1.0), DomainError);
    CHECK_THROWS_AS(multilevel_tail_bound(norms, m, -1.0), DomainError);
    const LevelNormData bad[] = {{0.5, 1.0, 2.0}};  // |B|_2 > |B|_F
    CHECK_THROWS_AS(multilevel_tail_bound(bad, m, 1.0), DomainError);
    const LevelNormData zero[] = {{0.0, 0.0, 2.0}};
    CHECK_THROWS_AS(multilevel_sample_plan(zero, 1.0, 0.1), DomainError);
}
