#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spectrace/sampling.hpp"
#include "spectrace/sparse_matrix.hpp"

namespace spectrace {

// Per-probe moments of a graph adjacency matrix:
// row i = (z^T A z, z^T A^2 z, z^T A^3 z).
struct TriangleSampleMatrix {
    std::vector<std::array<double, 3>> rows;
    std::int64_t matvecs = 0;       // counter delta: 3 per sample plain, 2 with symmetry
    std::int64_t edge_entries = 0;  // nnz(A) = trace(A^2)
    Index dim = 0;
};

// Rejects anything that is not a simple-graph adjacency matrix: must be
// square, symmetric, zero-diagonal, with all stored values in {0, 1}.
void validate_adjacency(const SparseMatrix& adjacency);

// Draws `samples` probes from the stream. The symmetry path reads
// z^T A^2 z = |Az|^2 and z^T A^3 z = (Az)^T (A^2 z), saving one matvec.
TriangleSampleMatrix triangle_samples(const SparseMatrix& adjacency, std::int64_t samples,
                                      const ProbeStream& stream, bool use_symmetry = true,
                                      int threads = 1, std::uint64_t first_probe_index = 0);

// Same computation for caller-provided probes (exhaustive enumerations).
TriangleSampleMatrix triangle_samples_for_probes(const SparseMatrix& adjacency,
                                                 std::span<const std::vector<double>> probes,
                                                 bool use_symmetry = true);

struct ControlVariateFit {
    double a1 = 0.0;  // weight of z^T A z
    double a2 = 0.0;  // weight of z^T A^2 z
};

// Least squares of y3 on (y1, y2) with an intercept; the slopes minimize the
// sample variance of y3 - a2 y2 - a1 y1. Degenerate designs fall back to a
// univariate fit on y2, then to (0, 0).
ControlVariateFit fit_control_variates(const TriangleSampleMatrix& samples);

struct TriangleEstimate {
    double count = 0.0;
    double std_error = 0.0;
    ControlVariateFit fit;
    std::int64_t samples = 0;
    std::int64_t matvecs = 0;
};

// count = [mean(y3 - a2 y2 - a1 y1) + a2 nnz(A) + a1 trace(A)] / 6 with
// trace(A) = 0 by validation; the standard error comes from the residual
// sample variance.
TriangleEstimate triangle_estimate(const TriangleSampleMatrix& samples,
                                   const ControlVariateFit& fit);

}  // namespace spectrace
