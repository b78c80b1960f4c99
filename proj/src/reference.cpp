#include "spectrace/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spectrace/errors.hpp"
#include "spectrace/triangles.hpp"

namespace spectrace::reference {

Eigen::MatrixXd to_dense(const SparseMatrix& m) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    const auto& offsets = m.row_offsets();
    const auto& cols = m.col_indices();
    const auto& vals = m.values();
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index k = offsets[static_cast<std::size_t>(r)];
             k < offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            dense(r, cols[static_cast<std::size_t>(k)]) = vals[static_cast<std::size_t>(k)];
        }
    }
    return dense;
}

double dense_trace_f(const Eigen::MatrixXd& a, const FunctionSpec& f, Index max_dim) {
    if (a.rows() != a.cols()) throw DomainError("dense trace oracle needs a square matrix");
    if (a.rows() > max_dim) throw DomainError("matrix too large for the dense trace oracle");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double v = f(es.eigenvalues()(i));
        if (!std::isfinite(v)) {
            throw DomainError(f.name() + " is undefined at eigenvalue " +
                              std::to_string(es.eigenvalues()(i)));
        }
        acc += v;
    }
    return acc;
}

Eigen::MatrixXd dense_interpolant_matrix(const Eigen::MatrixXd& a, const ChebyshevModel& model) {
    if (a.rows() != a.cols()) throw DomainError("dense interpolant needs a square matrix");
    const auto d = a.rows();
    const auto& c = model.coefficients();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd mapped = model.map().scale() * a + model.map().offset() * identity;

    Eigen::MatrixXd result = c[0] * identity;
    if (model.degree() == 0) return result;
    Eigen::MatrixXd t_prev = identity;
    Eigen::MatrixXd t_cur = mapped;
    result += c[1] * t_cur;
    for (int j = 2; j <= model.degree(); ++j) {
        Eigen::MatrixXd t_next = 2.0 * mapped * t_cur - t_prev;
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
        result += c[static_cast<std::size_t>(j)] * t_cur;
    }
    return result;
}

MomentSummary exhaustive_sign_moments(Index dim,
                                      const std::function<double(std::span<const double>)>& statistic,
                                      Index max_dim) {
    if (dim < 1 || dim > max_dim) {
        throw DomainError("dimension too large for exhaustive sign enumeration");
    }
    const std::uint64_t count = 1ULL << dim;
    std::vector<double> z(static_cast<std::size_t>(dim));
    double mean = 0.0;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (Index i = 0; i < dim; ++i) {
            z[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1.0 : -1.0;
        }
        const double v = statistic(z);
        values.push_back(v);
        mean += v;
    }
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(count);
    return {mean, var};
}

MomentSummary exhaustive_hutchinson(const Eigen::MatrixXd& p) {
    if (p.rows() != p.cols()) throw DomainError("quadratic form needs a square matrix");
    return exhaustive_sign_moments(
        p.rows(),
        [&](std::span<const double> z) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < p.rows(); ++i) {
                double row = 0.0;
                for (Eigen::Index j = 0; j < p.cols(); ++j) {
                    row += p(i, j) * z[static_cast<std::size_t>(j)];
                }
                acc += z[static_cast<std::size_t>(i)] * row;
            }
            return acc;
        },
        14);
}

PartitionSearch brute_force_level_selection(const VarianceTable& table, const CostModel& cost,
                                            int degree) {
    if (degree < 1 || degree > 14) {
        throw DomainError("degree too large for brute-force level search");
    }
    if (degree > table.degree()) throw DomainError("degree outside the variance table range");

    PartitionSearch best;
    best.objective = std::numeric_limits<double>::infinity();
    const std::uint32_t subsets = 1u << degree;  // breakpoints drawn from {0..degree-1}
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        std::vector<int> levels;
        for (int b = 0; b < degree; ++b) {
            if ((mask >> b) & 1u) levels.push_back(b);
        }
        levels.push_back(degree);
        double objective = 0.0;
        int lower = -1;
        for (int upper : levels) {
            objective += std::sqrt(table.at(lower, upper) * cost.cost(lower, upper));
            lower = upper;
        }
        const bool better =
            objective < best.objective ||
            (objective == best.objective && levels.size() < best.levels.size()) ||
            (objective == best.objective && levels.size() == best.levels.size() &&
             levels < best.levels);
        if (better) {
            best.objective = objective;
            best.levels = std::move(levels);
        }
    }
    return best;
}

std::int64_t exact_triangle_count(const SparseMatrix& adjacency) {
    validate_adjacency(adjacency);
    const auto& offsets = adjacency.row_offsets();
    const auto& cols = adjacency.col_indices();
    const auto& vals = adjacency.values();

    // Neighbor lists, skipping stored zeros; CSR order keeps them sorted.
    std::vector<std::vector<Index>> neighbors(static_cast<std::size_t>(adjacency.rows()));
    for (Index r = 0; r < adjacency.rows(); ++r) {
        for (Index k = offsets[static_cast<std::size_t>(r)];
             k < offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            if (vals[static_cast<std::size_t>(k)] == 1.0) {
                neighbors[static_cast<std::size_t>(r)].push_back(cols[static_cast<std::size_t>(k)]);
            }
        }
    }

    std::int64_t wedge_closures = 0;
    for (Index u = 0; u < adjacency.rows(); ++u) {
        const auto& nu = neighbors[static_cast<std::size_t>(u)];
        for (Index v : nu) {
            if (v <= u) continue;  // each edge once
            const auto& nv = neighbors[static_cast<std::size_t>(v)];
            std::size_t i = 0, j = 0;
            while (i < nu.size() && j < nv.size()) {
                if (nu[i] < nv[j]) {
                    ++i;
                } else if (nu[i] > nv[j]) {
                    ++j;
                } else {
                    ++wedge_closures;
                    ++i;
                    ++j;
                }
            }
        }
    }
    // Every triangle closes one wedge at each of its three edges.
    return wedge_closures / 3;
}

}  // namespace spectrace::reference
