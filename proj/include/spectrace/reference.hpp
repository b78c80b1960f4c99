#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spectrace/chebyshev.hpp"
#include "spectrace/multilevel.hpp"
#include "spectrace/sparse_matrix.hpp"

namespace spectrace::reference {

// Dense, brute-force, and combinatorial oracles. Deterministic and
// side-effect-free; every routine carries a hard dimension cap so these never
// masquerade as production paths.

Eigen::MatrixXd to_dense(const SparseMatrix& m);

// trace(f(A)) by full symmetric eigendecomposition; d <= 2000.
double dense_trace_f(const Eigen::MatrixXd& a, const FunctionSpec& f, Index max_dim = 2000);

// Dense evaluation of the model's interpolant of A (the affine map is applied
// internally), via the dense three-term recurrence.
Eigen::MatrixXd dense_interpolant_matrix(const Eigen::MatrixXd& a, const ChebyshevModel& model);

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;  // population variance over the enumerated set
};

// Exact mean and variance of statistic(z) over all 2^dim sign vectors.
MomentSummary exhaustive_sign_moments(Index dim,
                                      const std::function<double(std::span<const double>)>& statistic,
                                      Index max_dim = 20);

// Exact moments of z^T P z over all sign vectors; dim <= 14.
MomentSummary exhaustive_hutchinson(const Eigen::MatrixXd& p);

struct PartitionSearch {
    std::vector<int> levels;
    double objective = 0.0;
};

// Global minimum of sum_k sqrt(V_k C_k) over every breakpoint subset with the
// top level forced to `degree`; n <= 14.
PartitionSearch brute_force_level_selection(const VarianceTable& table, const CostModel& cost,
                                            int degree);

// Combinatorial triangle count via sorted neighbor-list intersections.
std::int64_t exact_triangle_count(const SparseMatrix& adjacency);

}  // namespace spectrace::reference
