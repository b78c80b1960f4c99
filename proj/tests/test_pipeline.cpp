#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "spectrace/errors.hpp"
#include "spectrace/pipeline.hpp"
#include "spectrace/reference.hpp"
#include "test_support.hpp"

using namespace spectrace;

TEST_CASE("single-level cube on a diagonal matrix is exact with zero error") {
    const auto a = test_support::diagonal({1.0, 2.0, 3.0, 4.0, 5.0});
    EstimateJob job;
    job.function = FunctionSpec::cube();
    job.degree = 5;
    job.mode = EstimatorMode::single_level;
    job.samples = 10;
    job.interval_override = {{0.5, 5.5}};
    const auto outcome = estimate_trace(a, job);
    CHECK(outcome.report.estimate == doctest::Approx(225.0).epsilon(1e-10));
    CHECK(outcome.report.std_error == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("multilevel budget run stays within four standard errors of the oracle") {
    std::vector<double> eigenvalues(80);
    for (int i = 0; i < 80; ++i) eigenvalues[static_cast<std::size_t>(i)] = 1.0 / (1 + i);
    const Eigen::MatrixXd dense = test_support::with_spectrum(eigenvalues, 3);
    const auto a = test_support::sparse_from_dense(dense, true);
    const double exact = reference::dense_trace_f(dense, FunctionSpec::sqrt());

    EstimateJob job;
    job.function = FunctionSpec::sqrt();
    job.degree = 50;
    job.mode = EstimatorMode::multilevel;
    job.budget_matvecs = 50.0 * 25.0;  // 50 full-degree samples with the half cost rule
    job.pilot_samples = 10;
    job.seed = 11;
    job.interval_override = {{1.0 / 100.0, 1.05}};
    const auto outcome = estimate_trace(a, job);

    CHECK(std::abs(outcome.report.estimate - exact) <= 4.0 * outcome.report.std_error);
    CHECK(outcome.total_matvecs ==
          outcome.pilot_matvecs + outcome.report.matvecs + outcome.interval.matvecs_used);
    // With pilot reuse the realized spend equals the allocation's cost
    // prediction: the pilot rows are the first top-level samples.
    CHECK(static_cast<double>(outcome.pilot_matvecs + outcome.report.matvecs) ==
          doctest::Approx(outcome.report.predicted_cost));
    // Ceiling rounding and the pilot floor bound the overshoot.
    CHECK(outcome.report.predicted_cost <=
          *job.budget_matvecs + 25.0 * (outcome.report.levels.size() + 10.0));
}

TEST_CASE("fixed-levels mode reproduces a prescribed plan") {
    const Eigen::MatrixXd dense = test_support::random_symmetric_contracted(30, 2, 0.9);
    const auto a = test_support::sparse_from_dense(dense, true);
    EstimateJob job;
    job.function = FunctionSpec::exp();
    job.degree = 30;
    job.mode = EstimatorMode::fixed_levels;
    job.fixed_levels = {3, 30};
    job.budget_matvecs = 900.0;
    job.pilot_samples = 5;
    job.seed = 2;
    job.interval_override = {{-1.0, 1.0}};
    const auto outcome = estimate_trace(a, job);
    REQUIRE(outcome.report.levels.size() == 2);
    CHECK(outcome.report.levels[0].upper == 3);
    CHECK(outcome.report.levels[1].upper == 30);
    CHECK(outcome.report.levels[1].samples >= 5);  // pilot floor

    job.fixed_levels = {3, 7};  // top level must equal the degree
    CHECK_THROWS_AS(estimate_trace(a, job), DomainError);
}

TEST_CASE("target variance mode hits the requested precision in prediction") {
    const Eigen::MatrixXd dense = test_support::random_symmetric_contracted(40, 19, 0.9);
    const auto a = test_support::sparse_from_dense(dense, true);
    EstimateJob job;
    job.function = FunctionSpec::exp();
    job.degree = 24;
    job.mode = EstimatorMode::multilevel;
    job.target_variance = 0.01;
    job.pilot_samples = 8;
    job.seed = 5;
    job.interval_override = {{-1.0, 1.0}};
    const auto outcome = estimate_trace(a, job);
    // Integer rounding only lowers the predicted variance below the target.
    CHECK(outcome.report.predicted_variance <= 0.01 * (1.0 + 1e-9));
}

TEST_CASE("estrada surrogate: synthetic graph, exact dense oracle, 100 samples") {
    const auto g = test_support::gnp_graph(400, 0.02, 97);
    const Eigen::MatrixXd dense = reference::to_dense(g);
    const double exact = reference::dense_trace_f(dense, FunctionSpec::exp());

    EstimateJob job;
    job.function = FunctionSpec::exp();
    job.degree = 20;
    job.mode = EstimatorMode::single_level;
    job.samples = 100;
    job.seed = 31;
    // Graph spectra cluster at the lower edge, where power iteration
    // converges slowly; give it more sweeps and a wider safety margin.
    job.power_options = PowerIterationOptions{200, 0.05, 17};
    const auto outcome = estimate_trace(g, job);
    CHECK(std::abs(outcome.report.estimate - exact) <= 4.0 * outcome.report.std_error);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    CHECK(outcome.interval.lo <= es.eigenvalues()(0));
    CHECK(outcome.interval.hi >= es.eigenvalues()(399));
}

TEST_CASE("nuclear norm surrogate through the Gram operator") {
    // Rectangular sparse matrix; exact nuclear norm of A^T A + s I from the
    // dense eigendecomposition of the Gram matrix.
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(120, 80);
    std::uint64_t counter = 0;
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        for (Eigen::Index j = 0; j < dense.cols(); ++j) {
            const double u = test_support::uniform(55, counter++);
            if (u < 0.05) dense(i, j) = 2.0 * u / 0.05 - 1.0;
        }
    }
    const double shift = 1e-4;
    const Eigen::MatrixXd gram =
        dense.transpose() * dense + shift * Eigen::MatrixXd::Identity(80, 80);
    const double exact = reference::dense_trace_f(gram, FunctionSpec::sqrt());

    EstimateJob job;
    job.function = FunctionSpec::sqrt();
    job.gram = true;
    job.gram_shift = shift;
    job.degree = 30;
    job.mode = EstimatorMode::multilevel;
    job.budget_matvecs = 50.0 * 30.0;  // half rule at unit cost 2
    job.pilot_samples = 10;
    job.seed = 8;
    job.interval_method = IntervalMethod::gershgorin;  // Gram product bound
    const auto outcome = estimate_trace(test_support::sparse_from_dense(dense, false), job);
    CHECK(outcome.cost.unit_cost == 2);
    CHECK(std::abs(outcome.report.estimate - exact) <= 4.0 * outcome.report.std_error);
}

TEST_CASE("pipeline error paths") {
    const auto a = test_support::diagonal({1.0, -2.0, 3.0});
    EstimateJob job;
    job.function = FunctionSpec::log();
    job.degree = 10;
    job.mode = EstimatorMode::single_level;
    job.samples = 5;
    job.interval_override = {{-2.5, 3.5}};
    CHECK_THROWS_AS(estimate_trace(a, job), DomainError);  // log not finite on the interval

    EstimateJob no_rule;
    no_rule.mode = EstimatorMode::single_level;
    CHECK_THROWS_AS(estimate_trace(a, no_rule), DomainError);

    EstimateJob both;
    both.mode = EstimatorMode::multilevel;
    both.budget_matvecs = 10.0;
    both.target_variance = 0.1;
    CHECK_THROWS_AS(estimate_trace(a, both), DomainError);

    EstimateJob violation;
    violation.function = FunctionSpec::exp();
    violation.degree = 400;
    violation.mode = EstimatorMode::single_level;
    violation.samples = 2;
    violation.interval_override = {{0.05, 0.1}};  // spectrum far outside
    CHECK_THROWS_AS(estimate_trace(a, violation), IntervalViolation);
}

TEST_CASE("triangle pipeline with and without control variates") {
    const auto g = test_support::gnp_graph(50, 0.25, 41);
    TriangleJob job;
    job.samples = 200;
    job.seed = 13;
    const auto cv = estimate_triangles(g, job);
    job.control_variates = false;
    const auto plain = estimate_triangles(g, job);
    const double exact = static_cast<double>(reference::exact_triangle_count(g));
    CHECK(std::abs(cv.estimate.count - exact) <= 5.0 * cv.estimate.std_error + 1e-9);
    CHECK(std::abs(plain.estimate.count - exact) <= 5.0 * plain.estimate.std_error + 1e-9);
    CHECK(cv.total_matvecs == 400);
}
