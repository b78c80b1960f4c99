#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "spectrace/chebyshev.hpp"
#include "spectrace/multilevel.hpp"

namespace spectrace {

// Norm and cost data for one level matrix B_k (the level's term-block matrix
// with its diagonal zeroed).
struct LevelNormData {
    double frob = 0.0;      // |B_k|_F
    double spectral = 0.0;  // |B_k|_2
    double cost = 0.0;      // C_k, matvec units per sample
};

// Smallest m with a relative-accuracy guarantee for plain Hutchinson
// estimation of an SPSD matrix: ceil(6 eps^-2 ln(2/delta)). The SPSD
// hypothesis is the caller's responsibility.
std::int64_t hutchinson_sample_count(double epsilon, double delta);

// Tail bound for the multilevel estimator with per-level sample counts m:
// 2 exp(-(eps^2/8) / (sum_k |B_k|_F^2/m_k + eps max_k |B_k|_2/m_k)).
double multilevel_tail_bound(std::span<const LevelNormData> norms,
                             std::span<const std::int64_t> samples, double epsilon);

struct TailSamplePlan {
    std::vector<std::int64_t> samples;
    double mu = 0.0;
    double predicted_cost = 0.0;  // 8 eps^-2 log(2/delta) (sum_k sqrt(V_k C_k))^2
    double bound = 0.0;           // tail bound re-evaluated at the returned counts
};

// Per-level sample counts guaranteeing failure probability at most delta:
// m_k = ceil(mu sqrt(V_k / C_k)) with V_k = |B_k|_F^2 + eps |B_k|_2 and
// mu = 8 eps^-2 log(2/delta) sum_k sqrt(V_k C_k). Natural log throughout.
TailSamplePlan multilevel_sample_plan(std::span<const LevelNormData> norms, double epsilon,
                                      double delta);

// Dense level matrices A_k (sum of the level's weighted Chebyshev terms of
// the mapped matrix) and their zero-diagonal counterparts B_k, with norms.
// Oracle-grade: only available up to max_dim.
struct LevelMatrices {
    std::vector<Eigen::MatrixXd> full;    // A_k; sums to the dense interpolant
    std::vector<Eigen::MatrixXd> hollow;  // B_k
    std::vector<double> frob;             // |B_k|_F
    std::vector<double> spectral;         // |B_k|_2
};

LevelMatrices build_level_matrices(const Eigen::MatrixXd& a, const ChebyshevModel& model,
                                   const LevelPlan& plan, Index max_dim = 500);

}  // namespace spectrace
