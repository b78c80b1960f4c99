#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spectrace/chebyshev.hpp"
#include "spectrace/linear_operator.hpp"
#include "spectrace/report.hpp"

namespace spectrace {

// Deterministic Rademacher probe source. Probe i is a pure function of
// (seed, i, dim), so any worker can materialize any probe independently and
// two runs with the same seed agree bit for bit regardless of thread count.
class ProbeStream {
public:
    ProbeStream(std::uint64_t seed, Index dim);

    std::uint64_t seed() const noexcept { return seed_; }
    Index dim() const noexcept { return dim_; }

    void fill(std::uint64_t index, std::span<double> out) const;
    std::vector<double> probe(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    Index dim_;
};

struct SampleOptions {
    bool symmetry_trick = true;
    int threads = 1;
};

// Full-degree per-term samples used to estimate level variances. Row i holds
// t_j = c_j z^(i)T T_j(M) z^(i) for j = 0..degree; the probes occupy stream
// indices first_probe_index .. first_probe_index + rows - 1 so they can later
// be reused as top-level samples.
struct PilotTable {
    int degree = 0;
    Index dim = 0;
    int row_count = 0;
    std::vector<double> terms;  // row-major, row_count x (degree + 1)
    std::uint64_t first_probe_index = 0;
    std::int64_t matvecs = 0;   // counter units consumed

    std::span<const double> row(int i) const {
        return {terms.data() + static_cast<std::size_t>(i) * (static_cast<std::size_t>(degree) + 1),
                static_cast<std::size_t>(degree) + 1};
    }
};

// Plain Hutchinson estimate of trace(p(A)) from `samples` probes. The
// operator is given in its own coordinates; the model's affine map is applied
// internally. Probes use stream indices first_probe_index onward.
EstimateReport single_level_estimate(const SymmetricOperator& op, const ChebyshevModel& model,
                                     std::int64_t samples, const ProbeStream& stream,
                                     const SampleOptions& options = {},
                                     std::uint64_t first_probe_index = 0);

PilotTable collect_pilot(const SymmetricOperator& op, const ChebyshevModel& model,
                         int pilot_samples, const ProbeStream& stream,
                         const SampleOptions& options = {},
                         std::uint64_t first_probe_index = 0);

}  // namespace spectrace
