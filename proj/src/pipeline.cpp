#include "spectrace/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "spectrace/errors.hpp"
#include "spectrace/triangles.hpp"

namespace spectrace {

EstimateOutcome estimate_trace(const SparseMatrix& a, const EstimateJob& job) {
    const auto op = job.gram ? make_gram(a, job.gram_shift) : make_explicit(a);
    const std::int64_t start_units = op->matvec_count();

    SpectralInterval interval;
    if (job.interval_override) {
        interval = {job.interval_override->first, job.interval_override->second, "manual", 0};
        if (!(interval.lo < interval.hi)) throw DomainError("interval override must have lo < hi");
    } else {
        interval = spectral_interval(*op, job.interval_method, job.power_options);
    }

    ChebyshevModel model =
        chebyshev_coefficients(job.function, job.degree, interval.lo, interval.hi);

    const SampleOptions sample_options{job.symmetry_trick, job.threads};
    const CostModel cost{job.symmetry_trick ? CostModel::Rule::half_degree
                                            : CostModel::Rule::full_degree,
                         op->unit_cost()};
    const ProbeStream stream(job.seed, op->dim());

    EstimateOutcome outcome{EstimateReport{}, interval, std::move(model), cost, 0, 0, ""};
    outcome.operator_kind = job.gram ? "gram" : "explicit";

    if (job.mode == EstimatorMode::single_level) {
        std::int64_t m = 0;
        if (job.samples) {
            m = *job.samples;
        } else if (job.budget_matvecs) {
            const double per_sample = cost.cost(-1, job.degree);
            m = per_sample > 0.0
                    ? static_cast<std::int64_t>(std::floor(*job.budget_matvecs / per_sample))
                    : 1;
        } else if (job.target_variance) {
            throw DomainError("single-level mode with a target variance needs a pilot; "
                              "use --samples or --budget-matvecs");
        } else {
            throw DomainError("single-level mode needs a sample count or matvec budget");
        }
        if (m < 1) throw DomainError("budget too small for even one single-level sample");
        outcome.report =
            single_level_estimate(*op, outcome.model, m, stream, sample_options);
        outcome.total_matvecs = op->matvec_count() - start_units;
        return outcome;
    }

    // Multilevel and fixed-levels modes share the pilot machinery.
    if (job.pilot_samples < 2) throw DomainError("multilevel estimation needs pilot_samples >= 2");
    if (!job.budget_matvecs && !job.target_variance) {
        throw DomainError("multilevel estimation needs a matvec budget or target variance");
    }
    if (job.budget_matvecs && job.target_variance) {
        throw DomainError("give either a matvec budget or a target variance, not both");
    }
    const AllocationGoal goal = job.budget_matvecs
                                    ? AllocationGoal::budget(*job.budget_matvecs)
                                    : AllocationGoal::variance(*job.target_variance);

    const std::int64_t pilot_before = op->matvec_count();
    const PilotTable pilot =
        collect_pilot(*op, outcome.model, job.pilot_samples, stream, sample_options);
    outcome.pilot_matvecs = op->matvec_count() - pilot_before;

    const VarianceTable table = build_variance_table(pilot);

    LevelPlan plan;
    if (job.mode == EstimatorMode::multilevel) {
        plan = select_levels(table, cost, job.degree,
                             LevelSelectOptions{job.pilot_samples, goal});
    } else {
        plan.levels = job.fixed_levels;
        std::sort(plan.levels.begin(), plan.levels.end());
        if (plan.levels.empty() || plan.levels.back() != job.degree) {
            throw DomainError("fixed levels must end at the model degree");
        }
        if (std::adjacent_find(plan.levels.begin(), plan.levels.end()) != plan.levels.end() ||
            plan.levels.front() < 0) {
            throw DomainError("fixed levels must be distinct and nonnegative");
        }
        for (int k = 0; k < plan.count(); ++k) {
            plan.objective +=
                std::sqrt(table.at(plan.lower_of(k), plan.upper_of(k)) *
                          cost.cost(plan.lower_of(k), plan.upper_of(k)));
        }
    }

    AllocationPlan alloc = allocate_samples(plan, table, cost, goal, job.pilot_samples);
    const PilotTable* reuse = job.reuse_pilot ? &pilot : nullptr;
    outcome.report = multilevel_estimate(*op, outcome.model, plan, alloc, stream,
                                         sample_options, reuse,
                                         static_cast<std::uint64_t>(job.pilot_samples));
    outcome.total_matvecs = op->matvec_count() - start_units;
    return outcome;
}

TriangleOutcome estimate_triangles(const SparseMatrix& adjacency, const TriangleJob& job) {
    TriangleSampleMatrix samples;
    if (job.exhaustive) {
        if (adjacency.rows() > 20) {
            throw DomainError("exhaustive probe enumeration is limited to 20 nodes");
        }
        std::vector<std::vector<double>> probes;
        const std::uint64_t count = 1ULL << adjacency.rows();
        probes.reserve(static_cast<std::size_t>(count));
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            std::vector<double> z(static_cast<std::size_t>(adjacency.rows()));
            for (Index i = 0; i < adjacency.rows(); ++i) {
                z[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1.0 : -1.0;
            }
            probes.push_back(std::move(z));
        }
        samples = triangle_samples_for_probes(adjacency, probes, job.use_symmetry);
    } else {
        const ProbeStream stream(job.seed, adjacency.rows());
        samples = triangle_samples(adjacency, job.samples, stream, job.use_symmetry, job.threads);
    }

    const ControlVariateFit fit =
        job.control_variates ? fit_control_variates(samples) : ControlVariateFit{};
    TriangleOutcome outcome;
    outcome.estimate = triangle_estimate(samples, fit);
    outcome.total_matvecs = samples.matvecs;
    return outcome;
}

}  // namespace spectrace
