#include "spectrace/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spectrace/errors.hpp"
#include "spectrace/parallel.hpp"

namespace spectrace {

VarianceTable::VarianceTable(int degree, int pilot_rows, std::vector<double> values)
    : degree_(degree), pilot_rows_(pilot_rows), values_(std::move(values)) {
    const auto expected = (static_cast<std::size_t>(degree) + 1) * (static_cast<std::size_t>(degree) + 1);
    if (degree < 0 || values_.size() != expected) {
        throw DomainError("variance table has inconsistent dimensions");
    }
}

double VarianceTable::at(int lower, int upper) const {
    if (lower < -1 || upper <= lower || upper > degree_) {
        throw DomainError("variance table index out of range");
    }
    return values_[static_cast<std::size_t>(lower + 1) * (static_cast<std::size_t>(degree_) + 1) +
                   static_cast<std::size_t>(upper)];
}

VarianceTable build_variance_table(const PilotTable& pilot) {
    if (pilot.row_count < 2) throw DomainError("variance estimation needs at least 2 pilot rows");
    const int n = pilot.degree;
    const int m = pilot.row_count;

    // Per-row prefix sums S_l = sum_{j <= l} t_j.
    std::vector<double> prefix(static_cast<std::size_t>(m) * (static_cast<std::size_t>(n) + 1));
    for (int i = 0; i < m; ++i) {
        const auto row = pilot.row(i);
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            acc += row[static_cast<std::size_t>(j)];
            prefix[static_cast<std::size_t>(i) * (static_cast<std::size_t>(n) + 1) +
                   static_cast<std::size_t>(j)] = acc;
        }
    }

    const std::size_t stride = static_cast<std::size_t>(n) + 1;
    std::vector<double> values((static_cast<std::size_t>(n) + 1) * stride, 0.0);
    auto slot = [&](int lower, int upper) -> double& {
        return values[static_cast<std::size_t>(lower + 1) * stride + static_cast<std::size_t>(upper)];
    };

    for (int lower = 0; lower < n; ++lower) {
        for (int upper = lower + 1; upper <= n; ++upper) {
            double mean = 0.0;
            for (int i = 0; i < m; ++i) {
                const auto* p = prefix.data() + static_cast<std::size_t>(i) * stride;
                mean += p[upper] - p[lower];
            }
            mean /= m;
            double var = 0.0;
            for (int i = 0; i < m; ++i) {
                const auto* p = prefix.data() + static_cast<std::size_t>(i) * stride;
                const double dev = (p[upper] - p[lower]) - mean;
                var += dev * dev;
            }
            slot(lower, upper) = var / (m - 1);
        }
    }
    // The j = 0 term is the same for every Rademacher probe, so segments
    // anchored at -1 have exactly the variances of those anchored at 0.
    slot(-1, 0) = 0.0;
    for (int upper = 1; upper <= n; ++upper) slot(-1, upper) = slot(0, upper);

    return VarianceTable(n, m, std::move(values));
}

namespace {

struct FinalCandidate {
    double score = std::numeric_limits<double>::infinity();
    int segments = 0;
    int split = -1;     // l' of the top segment
    double objective = 0.0;
};

bool better_than(double score, int segments, int split, const FinalCandidate& best) {
    if (score != best.score) return score < best.score;
    if (segments != best.segments) return segments < best.segments;
    return split < best.split;
}

}  // namespace

LevelPlan select_levels(const VarianceTable& table, const CostModel& cost, int degree,
                        const LevelSelectOptions& options) {
    if (degree < 0 || degree > table.degree()) {
        throw DomainError("degree outside the variance table range");
    }
    if (degree == 0) {
        return LevelPlan{{0}, 0.0};
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(static_cast<std::size_t>(degree) + 1, inf);
    std::vector<int> segments(static_cast<std::size_t>(degree) + 1, 0);
    std::vector<int> back(static_cast<std::size_t>(degree) + 1, -1);
    best[0] = 0.0;

    for (int upper = 1; upper < degree; ++upper) {
        for (int lower = 0; lower < upper; ++lower) {
            const double value =
                best[static_cast<std::size_t>(lower)] +
                std::sqrt(table.at(lower, upper) * cost.cost(lower, upper));
            const int segs = segments[static_cast<std::size_t>(lower)] + 1;
            const auto u = static_cast<std::size_t>(upper);
            if (value < best[u] || (value == best[u] && segs < segments[u])) {
                best[u] = value;
                segments[u] = segs;
                back[u] = lower;
            }
        }
    }

    // Final step: when a goal and a pilot floor are supplied, candidates whose
    // implied top-level sample count falls below the floor are scored with the
    // top level clamped to the floor.
    const bool constrained = options.goal.has_value() && options.pilot_floor >= 1;
    if (constrained && options.goal->value <= 0.0) {
        throw DomainError("allocation goal must be positive");
    }

    FinalCandidate chosen;
    bool any_feasible = false;
    for (int lower = 0; lower < degree; ++lower) {
        const double rest = best[static_cast<std::size_t>(lower)];
        const double top_v = table.at(lower, degree);
        const double top_c = cost.cost(lower, degree);
        const double top_term = std::sqrt(top_v * top_c);
        const double objective = rest + top_term;
        const int segs = segments[static_cast<std::size_t>(lower)] + 1;

        double score = objective;
        if (constrained) {
            const double floor_m = static_cast<double>(options.pilot_floor);
            if (options.goal->mode == AllocationMode::target_variance) {
                const double eps2 = options.goal->value;
                const double mu = objective / eps2;
                const double implied_top = top_c > 0.0 ? mu * std::sqrt(top_v / top_c) : 0.0;
                if (implied_top >= floor_m) {
                    score = objective * objective / eps2;  // total cost at target variance
                } else {
                    const double residual = eps2 - top_v / floor_m;
                    score = floor_m * top_c + (residual > 0.0 ? rest * rest / residual : inf);
                }
                any_feasible = true;
            } else {
                const double budget = options.goal->value;
                const double mu = objective > 0.0 ? budget / objective : 0.0;
                const double implied_top = top_c > 0.0 ? mu * std::sqrt(top_v / top_c) : 0.0;
                if (objective > 0.0 && implied_top >= floor_m) {
                    score = objective * objective / budget;  // achieved variance at budget
                    any_feasible = true;
                } else {
                    const double remaining = budget - floor_m * top_c;
                    if (remaining > 0.0 || rest == 0.0) {
                        score = top_v / floor_m + (rest > 0.0 ? rest * rest / remaining : 0.0);
                        any_feasible = true;
                    } else {
                        score = inf;  // budget cannot even cover the clamped top level
                    }
                }
            }
        }

        if (better_than(score, segs, lower, chosen)) {
            chosen = FinalCandidate{score, segs, lower, objective};
        }
    }

    if (constrained && !any_feasible) {
        // Fall back to the unconstrained comparison rather than failing.
        chosen = FinalCandidate{};
        for (int lower = 0; lower < degree; ++lower) {
            const double objective = best[static_cast<std::size_t>(lower)] +
                                     std::sqrt(table.at(lower, degree) * cost.cost(lower, degree));
            const int segs = segments[static_cast<std::size_t>(lower)] + 1;
            if (better_than(objective, segs, lower, chosen)) {
                chosen = FinalCandidate{objective, segs, lower, objective};
            }
        }
    }

    LevelPlan plan;
    plan.objective = chosen.objective;
    std::vector<int> chain;
    for (int node = chosen.split; node > 0; node = back[static_cast<std::size_t>(node)]) {
        chain.push_back(node);
    }
    std::reverse(chain.begin(), chain.end());
    plan.levels = std::move(chain);
    plan.levels.push_back(degree);
    return plan;
}

AllocationPlan allocate_samples(const LevelPlan& plan, const VarianceTable& table,
                                const CostModel& cost, AllocationGoal goal,
                                std::int64_t top_level_floor) {
    if (plan.count() < 1) throw DomainError("plan has no levels");
    if (goal.value <= 0.0) throw DomainError("allocation goal must be positive");

    const int levels = plan.count();
    std::vector<double> variances(static_cast<std::size_t>(levels));
    std::vector<double> costs(static_cast<std::size_t>(levels));
    double objective = 0.0;
    for (int k = 0; k < levels; ++k) {
        variances[static_cast<std::size_t>(k)] = table.at(plan.lower_of(k), plan.upper_of(k));
        costs[static_cast<std::size_t>(k)] = cost.cost(plan.lower_of(k), plan.upper_of(k));
        objective += std::sqrt(variances[static_cast<std::size_t>(k)] * costs[static_cast<std::size_t>(k)]);
    }

    double mu = 0.0;
    if (goal.mode == AllocationMode::target_variance) {
        mu = objective / goal.value;
    } else {
        mu = objective > 0.0 ? goal.value / objective : 0.0;
    }

    AllocationPlan alloc;
    alloc.mu = mu;
    alloc.goal = goal;
    alloc.samples.resize(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k) {
        const double v = variances[static_cast<std::size_t>(k)];
        const double c = costs[static_cast<std::size_t>(k)];
        std::int64_t m = 1;
        if (v > 0.0 && c > 0.0) {
            m = static_cast<std::int64_t>(std::ceil(mu * std::sqrt(v / c)));
            m = std::max<std::int64_t>(m, 1);
        }
        alloc.samples[static_cast<std::size_t>(k)] = m;
    }
    if (top_level_floor > 1) {
        auto& top = alloc.samples.back();
        top = std::max(top, top_level_floor);
    }

    for (int k = 0; k < levels; ++k) {
        const auto m = static_cast<double>(alloc.samples[static_cast<std::size_t>(k)]);
        alloc.predicted_cost += m * costs[static_cast<std::size_t>(k)];
        alloc.predicted_variance += variances[static_cast<std::size_t>(k)] / m;
    }
    return alloc;
}

EstimateReport multilevel_estimate(const SymmetricOperator& op, const ChebyshevModel& model,
                                   const LevelPlan& plan, const AllocationPlan& alloc,
                                   const ProbeStream& stream, const SampleOptions& options,
                                   const PilotTable* reuse_pilot,
                                   std::optional<std::uint64_t> fresh_probe_start) {
    const int levels = plan.count();
    if (levels < 1 || static_cast<int>(alloc.samples.size()) != levels) {
        throw DomainError("level plan and allocation are inconsistent");
    }
    if (plan.upper_of(levels - 1) != model.degree()) {
        throw DomainError("plan top level must equal the model degree");
    }
    for (int k = 0; k < levels; ++k) {
        if (plan.lower_of(k) >= plan.upper_of(k)) {
            throw DomainError("plan levels must be strictly increasing");
        }
        if (alloc.samples[static_cast<std::size_t>(k)] < 1) {
            throw DomainError("allocation must give every level at least one sample");
        }
    }
    if (stream.dim() != op.dim()) throw DomainError("stream and operator dimensions differ");

    std::int64_t reused_rows = 0;
    if (reuse_pilot != nullptr) {
        if (reuse_pilot->degree != model.degree() || reuse_pilot->dim != op.dim()) {
            throw DomainError("pilot table does not match the model");
        }
        reused_rows = reuse_pilot->row_count;
        if (alloc.samples.back() < reused_rows) {
            throw DomainError("top level allocation is smaller than the pilot it would reuse");
        }
    }

    const std::uint64_t fresh_start = fresh_probe_start.value_or(
        reuse_pilot != nullptr
            ? reuse_pilot->first_probe_index + static_cast<std::uint64_t>(reused_rows)
            : 0);

    // Fresh-sample layout: level-major, contiguous probe indices.
    std::vector<std::int64_t> fresh(static_cast<std::size_t>(levels));
    std::vector<std::int64_t> fresh_offset(static_cast<std::size_t>(levels));
    std::int64_t total_fresh = 0;
    for (int k = 0; k < levels; ++k) {
        std::int64_t f = alloc.samples[static_cast<std::size_t>(k)];
        if (k == levels - 1) f -= reused_rows;
        fresh[static_cast<std::size_t>(k)] = f;
        fresh_offset[static_cast<std::size_t>(k)] = total_fresh;
        total_fresh += f;
    }

    const AffineView mapped(op, model.map().scale(), model.map().offset());
    const std::int64_t before = op.matvec_count();

    std::vector<double> fresh_values(static_cast<std::size_t>(total_fresh));
    parallel_for(total_fresh, options.threads, [&](std::int64_t task) {
        // Locate the level this task belongs to.
        int k = levels - 1;
        while (fresh_offset[static_cast<std::size_t>(k)] > task) --k;
        const int lo = plan.lower_of(k);
        const int hi = plan.upper_of(k);
        const auto z = stream.probe(fresh_start + static_cast<std::uint64_t>(task));
        const auto sample = term_quadratic_forms(mapped, z, model, options.symmetry_trick, hi);
        double acc = 0.0;
        for (int j = std::max(lo + 1, 0); j <= hi; ++j) {
            acc += sample.terms[static_cast<std::size_t>(j)];
        }
        fresh_values[static_cast<std::size_t>(task)] = acc;
    });

    EstimateReport report;
    report.seed = stream.seed();
    report.plan_objective = plan.objective;
    report.allocation_mu = alloc.mu;
    report.predicted_cost = alloc.predicted_cost;
    report.predicted_variance = alloc.predicted_variance;

    double estimate = 0.0;
    double variance_of_mean = 0.0;
    for (int k = 0; k < levels; ++k) {
        const int lo = plan.lower_of(k);
        const int hi = plan.upper_of(k);
        const std::int64_t m = alloc.samples[static_cast<std::size_t>(k)];

        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(m));
        if (k == levels - 1 && reuse_pilot != nullptr) {
            for (int i = 0; i < reuse_pilot->row_count; ++i) {
                const auto row = reuse_pilot->row(i);
                double acc = 0.0;
                for (int j = std::max(lo + 1, 0); j <= hi; ++j) {
                    acc += row[static_cast<std::size_t>(j)];
                }
                values.push_back(acc);
            }
        }
        const std::int64_t off = fresh_offset[static_cast<std::size_t>(k)];
        for (std::int64_t s = 0; s < fresh[static_cast<std::size_t>(k)]; ++s) {
            values.push_back(fresh_values[static_cast<std::size_t>(off + s)]);
        }

        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(m);
        double var = 0.0;
        if (m >= 2) {
            for (double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(m - 1);
        }

        LevelStat stat;
        stat.lower = lo;
        stat.upper = hi;
        stat.samples = m;
        stat.reused_pilot_rows = (k == levels - 1) ? reused_rows : 0;
        stat.mean = mean;
        stat.sample_variance = var;
        const std::int64_t applies = options.symmetry_trick ? (hi + 1) / 2 : hi;
        stat.cost_per_sample = static_cast<double>(applies * op.unit_cost());
        report.levels.push_back(stat);

        estimate += mean;
        variance_of_mean += var / static_cast<double>(m);
    }

    report.estimate = estimate;
    report.std_error = std::sqrt(variance_of_mean);
    report.matvecs = op.matvec_count() - before;
    return report;
}

}  // namespace spectrace
