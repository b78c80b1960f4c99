#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spectrace/sampling.hpp"

namespace spectrace {

// Sample variances V(lower, upper) of the partial sums
// sum_{j=lower+1}^{upper} t_j across the pilot rows, for every pair
// -1 <= lower < upper <= degree. The j = 0 term is deterministic for
// Rademacher probes, so V(-1, u) equals V(0, u) exactly.
class VarianceTable {
public:
    VarianceTable(int degree, int pilot_rows, std::vector<double> values);

    int degree() const noexcept { return degree_; }
    int pilot_rows() const noexcept { return pilot_rows_; }

    double at(int lower, int upper) const;

private:
    int degree_;
    int pilot_rows_;
    std::vector<double> values_;  // (degree + 1) x (degree + 1), row = lower + 1
};

VarianceTable build_variance_table(const PilotTable& pilot);

// Matvec cost of sampling a partial sum that runs the recurrence up to
// `upper`: the cost depends only on the upper index.
struct CostModel {
    enum class Rule { full_degree, half_degree };

    Rule rule = Rule::half_degree;
    int unit_cost = 1;

    std::int64_t applies(int upper) const {
        return rule == Rule::half_degree ? (upper + 1) / 2 : upper;
    }
    double cost(int lower, int upper) const {
        (void)lower;
        return static_cast<double>(applies(upper) * unit_cost);
    }
};

// Chosen levels l_1 < ... < l_L = degree with the implicit l_0 = -1; level k
// samples the terms (levels[k-1], levels[k]].
struct LevelPlan {
    std::vector<int> levels;
    double objective = 0.0;  // sum_k sqrt(V_k C_k)

    int count() const noexcept { return static_cast<int>(levels.size()); }
    int lower_of(int k) const { return k == 0 ? -1 : levels[static_cast<std::size_t>(k) - 1]; }
    int upper_of(int k) const { return levels[static_cast<std::size_t>(k)]; }
};

enum class AllocationMode { target_variance, budget };

struct AllocationGoal {
    AllocationMode mode = AllocationMode::budget;
    double value = 0.0;  // epsilon^2 for target_variance, matvec units for budget

    static AllocationGoal variance(double eps2) { return {AllocationMode::target_variance, eps2}; }
    static AllocationGoal budget(double matvecs) { return {AllocationMode::budget, matvecs}; }
};

// Optional constraint applied at the final step of level selection: candidate
// partitions whose implied top-level sample count falls below pilot_floor are
// compared with the top level clamped to pilot_floor samples.
struct LevelSelectOptions {
    int pilot_floor = 0;
    std::optional<AllocationGoal> goal;
};

// Dynamic program over the cost recurrence; O(degree^2). Ties break toward
// fewer levels, then toward the smaller split point.
LevelPlan select_levels(const VarianceTable& table, const CostModel& cost, int degree,
                        const LevelSelectOptions& options = {});

struct AllocationPlan {
    std::vector<std::int64_t> samples;  // m_k >= 1
    double mu = 0.0;
    AllocationGoal goal;
    double predicted_cost = 0.0;      // sum m_k C_k with integer m_k
    double predicted_variance = 0.0;  // sum V_k / m_k with integer m_k
};

// Optimal sample counts m_k = mu sqrt(V_k / C_k), rounded up with floor 1;
// the top level is clamped to at least top_level_floor.
AllocationPlan allocate_samples(const LevelPlan& plan, const VarianceTable& table,
                                const CostModel& cost, AllocationGoal goal,
                                std::int64_t top_level_floor = 1);

// Multilevel estimator: independent fresh probes per level, partial sums per
// sample, estimate = sum of per-level means. When reuse_pilot is given its
// rows serve as the first rows of the top level at no matvec cost. Fresh
// probes use stream indices fresh_probe_start onward (defaults to just past
// the pilot rows when reusing, otherwise 0).
EstimateReport multilevel_estimate(const SymmetricOperator& op, const ChebyshevModel& model,
                                   const LevelPlan& plan, const AllocationPlan& alloc,
                                   const ProbeStream& stream, const SampleOptions& options = {},
                                   const PilotTable* reuse_pilot = nullptr,
                                   std::optional<std::uint64_t> fresh_probe_start = std::nullopt);

}  // namespace spectrace
