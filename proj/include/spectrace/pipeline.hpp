#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectrace/bounds.hpp"
#include "spectrace/multilevel.hpp"
#include "spectrace/sparse_matrix.hpp"
#include "spectrace/triangles.hpp"

namespace spectrace {

enum class EstimatorMode { single_level, multilevel, fixed_levels };

// One trace-estimation run: operator construction, spectral interval,
// interpolation model, pilot, level selection, allocation, estimation.
struct EstimateJob {
    FunctionSpec function = FunctionSpec::exp();
    int degree = 50;

    bool gram = false;          // use A^T A + gram_shift I instead of A
    double gram_shift = 0.0;

    EstimatorMode mode = EstimatorMode::multilevel;
    std::vector<int> fixed_levels;  // for EstimatorMode::fixed_levels

    // Exactly one stopping rule: a matvec budget, a target variance, or (for
    // single-level mode) an explicit sample count.
    std::optional<double> budget_matvecs;
    std::optional<double> target_variance;
    std::optional<std::int64_t> samples;

    int pilot_samples = 10;
    bool reuse_pilot = true;

    std::uint64_t seed = 0;
    IntervalMethod interval_method = IntervalMethod::power_iteration;
    PowerIterationOptions power_options{};
    std::optional<std::pair<double, double>> interval_override;

    bool symmetry_trick = true;
    int threads = 1;
};

struct EstimateOutcome {
    EstimateReport report;
    SpectralInterval interval;
    ChebyshevModel model;
    CostModel cost;
    std::int64_t pilot_matvecs = 0;  // matvec units spent on the pilot
    std::int64_t total_matvecs = 0;  // counter delta across the whole job
    std::string operator_kind;
};

EstimateOutcome estimate_trace(const SparseMatrix& a, const EstimateJob& job);

struct TriangleJob {
    std::int64_t samples = 100;
    std::uint64_t seed = 0;
    bool control_variates = true;
    bool use_symmetry = true;
    bool exhaustive = false;  // enumerate all 2^d probes (d <= 20); diagnostic
    int threads = 1;
};

struct TriangleOutcome {
    TriangleEstimate estimate;
    std::int64_t total_matvecs = 0;
};

TriangleOutcome estimate_triangles(const SparseMatrix& adjacency, const TriangleJob& job);

}  // namespace spectrace
