#include "spectrace/sampling.hpp"

#include <cmath>

#include "spectrace/errors.hpp"
#include "spectrace/parallel.hpp"
#include "spectrace/rng.hpp"

namespace spectrace {

ProbeStream::ProbeStream(std::uint64_t seed, Index dim) : seed_(seed), dim_(dim) {
    if (dim <= 0) throw DomainError("probe stream needs a positive dimension");
}

void ProbeStream::fill(std::uint64_t index, std::span<double> out) const {
    if (static_cast<Index>(out.size()) != dim_) {
        throw DomainError("probe buffer dimension mismatch");
    }
    const std::uint64_t key = rng::mix(seed_, index);
    std::uint64_t word = 0;
    for (Index i = 0; i < dim_; ++i) {
        const int bit = static_cast<int>(i % 64);
        if (bit == 0) word = rng::mix(key, static_cast<std::uint64_t>(i / 64));
        out[static_cast<std::size_t>(i)] = (word >> bit) & 1u ? 1.0 : -1.0;
    }
}

std::vector<double> ProbeStream::probe(std::uint64_t index) const {
    std::vector<double> z(static_cast<std::size_t>(dim_));
    fill(index, z);
    return z;
}

namespace {

double sum_all(std::span<const double> terms) {
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
}

// Mean and unbiased sample variance in a fixed left-to-right order.
void mean_and_variance(std::span<const double> xs, double& mean, double& variance) {
    mean = 0.0;
    variance = 0.0;
    const auto m = static_cast<double>(xs.size());
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= m;
    if (xs.size() < 2) return;
    for (double x : xs) variance += (x - mean) * (x - mean);
    variance /= (m - 1.0);
}

}  // namespace

EstimateReport single_level_estimate(const SymmetricOperator& op, const ChebyshevModel& model,
                                     std::int64_t samples, const ProbeStream& stream,
                                     const SampleOptions& options,
                                     std::uint64_t first_probe_index) {
    if (samples < 1) throw DomainError("sample count must be at least 1");
    if (stream.dim() != op.dim()) throw DomainError("stream and operator dimensions differ");

    const AffineView mapped(op, model.map().scale(), model.map().offset());
    const std::int64_t before = op.matvec_count();

    std::vector<double> quad(static_cast<std::size_t>(samples));
    parallel_for(samples, options.threads, [&](std::int64_t i) {
        const auto z = stream.probe(first_probe_index + static_cast<std::uint64_t>(i));
        const auto sample = term_quadratic_forms(mapped, z, model, options.symmetry_trick);
        quad[static_cast<std::size_t>(i)] = sum_all(sample.terms);
    });

    double mean = 0.0, variance = 0.0;
    mean_and_variance(quad, mean, variance);

    EstimateReport report;
    report.estimate = mean;
    report.std_error = std::sqrt(variance / static_cast<double>(samples));
    report.matvecs = op.matvec_count() - before;
    report.seed = stream.seed();
    LevelStat level;
    level.lower = -1;
    level.upper = model.degree();
    level.samples = samples;
    level.mean = mean;
    level.sample_variance = variance;
    const int applies = options.symmetry_trick ? (model.degree() + 1) / 2 : model.degree();
    level.cost_per_sample = static_cast<double>(applies) * op.unit_cost();
    report.levels.push_back(level);
    return report;
}

PilotTable collect_pilot(const SymmetricOperator& op, const ChebyshevModel& model,
                         int pilot_samples, const ProbeStream& stream,
                         const SampleOptions& options,
                         std::uint64_t first_probe_index) {
    if (pilot_samples < 2) throw DomainError("pilot needs at least 2 samples");
    if (stream.dim() != op.dim()) throw DomainError("stream and operator dimensions differ");

    const AffineView mapped(op, model.map().scale(), model.map().offset());
    const std::int64_t before = op.matvec_count();

    PilotTable table;
    table.degree = model.degree();
    table.dim = op.dim();
    table.row_count = pilot_samples;
    table.first_probe_index = first_probe_index;
    table.terms.resize(static_cast<std::size_t>(pilot_samples) *
                       (static_cast<std::size_t>(model.degree()) + 1));

    parallel_for(pilot_samples, options.threads, [&](std::int64_t i) {
        const auto z = stream.probe(first_probe_index + static_cast<std::uint64_t>(i));
        const auto sample = term_quadratic_forms(mapped, z, model, options.symmetry_trick);
        std::copy(sample.terms.begin(), sample.terms.end(),
                  table.terms.begin() +
                      static_cast<std::ptrdiff_t>(static_cast<std::size_t>(i) *
                                                  (static_cast<std::size_t>(model.degree()) + 1)));
    });

    table.matvecs = op.matvec_count() - before;
    return table;
}

}  // namespace spectrace
