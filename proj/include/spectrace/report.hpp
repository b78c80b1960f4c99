#pragma once

#include <cstdint>
#include <vector>

namespace spectrace {

// Per-level summary: the level covers polynomial terms (lower, upper].
struct LevelStat {
    int lower = -1;
    int upper = 0;
    std::int64_t samples = 0;
    std::int64_t reused_pilot_rows = 0;
    double mean = 0.0;
    double sample_variance = 0.0;  // unbiased; 0 when samples < 2
    double cost_per_sample = 0.0;  // matvec units
};

struct EstimateReport {
    double estimate = 0.0;
    double std_error = 0.0;        // sqrt(sum_k s_k^2 / m_k)
    std::int64_t matvecs = 0;      // counter delta over the estimation call
    std::vector<LevelStat> levels;
    std::uint64_t seed = 0;
    double plan_objective = 0.0;   // sum_k sqrt(V_k C_k) of the plan used
    double allocation_mu = 0.0;
    double predicted_cost = 0.0;
    double predicted_variance = 0.0;
};

}  // namespace spectrace
