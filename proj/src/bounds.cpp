#include "spectrace/bounds.hpp"

#include <cmath>

#include "spectrace/errors.hpp"

namespace spectrace {

std::int64_t hutchinson_sample_count(double epsilon, double delta) {
    if (epsilon <= 0.0) throw DomainError("epsilon must be positive");
    if (delta <= 0.0 || delta >= 1.0) throw DomainError("delta must lie in (0, 1)");
    return static_cast<std::int64_t>(std::ceil(6.0 / (epsilon * epsilon) * std::log(2.0 / delta)));
}

double multilevel_tail_bound(std::span<const LevelNormData> norms,
                             std::span<const std::int64_t> samples, double epsilon) {
    if (norms.empty() || norms.size() != samples.size()) {
        throw DomainError("norm data and sample counts must be nonempty and match");
    }
    if (epsilon <= 0.0) throw DomainError("epsilon must be positive");
    double frob_part = 0.0;
    double spec_part = 0.0;
    for (std::size_t k = 0; k < norms.size(); ++k) {
        if (samples[k] < 1) throw DomainError("sample counts must be at least 1");
        if (norms[k].frob < 0.0 || norms[k].spectral < 0.0 ||
            norms[k].spectral > norms[k].frob * (1.0 + 1e-12)) {
            throw DomainError("invalid norm data: need 0 <= |B|_2 <= |B|_F");
        }
        const auto m = static_cast<double>(samples[k]);
        frob_part += norms[k].frob * norms[k].frob / m;
        spec_part = std::max(spec_part, norms[k].spectral / m);
    }
    const double denom = frob_part + epsilon * spec_part;
    if (denom == 0.0) return 0.0;  // all levels deterministic
    return 2.0 * std::exp(-(epsilon * epsilon / 8.0) / denom);
}

TailSamplePlan multilevel_sample_plan(std::span<const LevelNormData> norms, double epsilon,
                                      double delta) {
    if (norms.empty()) throw DomainError("norm data must be nonempty");
    if (epsilon <= 0.0) throw DomainError("epsilon must be positive");
    if (delta <= 0.0 || delta >= 1.0) throw DomainError("delta must lie in (0, 1)");

    double objective = 0.0;
    bool all_zero = true;
    for (const auto& n : norms) {
        if (n.cost <= 0.0) throw DomainError("level costs must be positive");
        const double v = n.frob * n.frob + epsilon * n.spectral;
        if (v > 0.0) all_zero = false;
        objective += std::sqrt(v * n.cost);
    }
    if (all_zero) throw DomainError("all level norms are zero; nothing to sample");

    const double scale = 8.0 / (epsilon * epsilon) * std::log(2.0 / delta);
    const double mu = scale * objective;

    TailSamplePlan plan;
    plan.mu = mu;
    plan.predicted_cost = scale * objective * objective;
    plan.samples.reserve(norms.size());
    for (const auto& n : norms) {
        const double v = n.frob * n.frob + epsilon * n.spectral;
        std::int64_t m = 1;
        if (v > 0.0) {
            m = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(mu * std::sqrt(v / n.cost))));
        }
        plan.samples.push_back(m);
    }
    plan.bound = multilevel_tail_bound(norms, plan.samples, epsilon);
    return plan;
}

LevelMatrices build_level_matrices(const Eigen::MatrixXd& a, const ChebyshevModel& model,
                                   const LevelPlan& plan, Index max_dim) {
    if (a.rows() != a.cols()) throw DomainError("level matrices need a square input");
    if (a.rows() > max_dim) {
        throw DomainError("matrix too large for the dense level-matrix oracle");
    }
    if (plan.count() < 1 || plan.upper_of(plan.count() - 1) != model.degree()) {
        throw DomainError("plan top level must equal the model degree");
    }
    for (int k = 0; k < plan.count(); ++k) {
        if (plan.lower_of(k) >= plan.upper_of(k)) {
            throw DomainError("plan levels must be strictly increasing");
        }
    }

    const auto d = a.rows();
    const auto& c = model.coefficients();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd mapped =
        model.map().scale() * a + model.map().offset() * identity;

    LevelMatrices out;
    int level = 0;
    Eigen::MatrixXd acc = c[0] * identity;  // running A_k; the j = 0 term
    if (plan.upper_of(level) == 0) {        // belongs to the first level
        out.full.push_back(acc);
        acc.setZero(d, d);
        ++level;
    }
    Eigen::MatrixXd t_prev = identity;  // T_0
    Eigen::MatrixXd t_cur = mapped;     // T_1
    for (int j = 1; j <= model.degree(); ++j) {
        if (j >= 2) {
            Eigen::MatrixXd t_next = 2.0 * mapped * t_cur - t_prev;
            t_prev = std::move(t_cur);
            t_cur = std::move(t_next);
        }
        acc += c[static_cast<std::size_t>(j)] * t_cur;
        if (j == plan.upper_of(level)) {
            out.full.push_back(acc);
            acc.setZero(d, d);
            ++level;
        }
    }

    for (auto& m : out.full) {
        Eigen::MatrixXd hollow = m;
        hollow.diagonal().setZero();
        out.frob.push_back(hollow.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hollow, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        out.spectral.push_back(std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))));
        out.hollow.push_back(std::move(hollow));
    }
    return out;
}

}  // namespace spectrace
