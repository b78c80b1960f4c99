#include "spectrace/triangles.hpp"

#include <cmath>

#include "spectrace/errors.hpp"
#include "spectrace/linear_operator.hpp"
#include "spectrace/parallel.hpp"

namespace spectrace {

void validate_adjacency(const SparseMatrix& adjacency) {
    if (adjacency.rows() != adjacency.cols()) {
        throw DomainError("adjacency matrix must be square");
    }
    const auto& offsets = adjacency.row_offsets();
    const auto& cols = adjacency.col_indices();
    const auto& vals = adjacency.values();
    for (Index r = 0; r < adjacency.rows(); ++r) {
        for (Index k = offsets[static_cast<std::size_t>(r)];
             k < offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            const double v = vals[static_cast<std::size_t>(k)];
            if (v != 0.0 && v != 1.0) {
                throw DomainError("adjacency values must be 0 or 1 (weighted graphs are rejected)");
            }
            if (cols[static_cast<std::size_t>(k)] == r && v != 0.0) {
                throw DomainError("adjacency matrix must have a zero diagonal");
            }
        }
    }
    if (!adjacency.is_symmetric()) {
        throw DomainError("adjacency matrix must be symmetric");
    }
}

namespace {

std::int64_t count_unit_entries(const SparseMatrix& a) {
    std::int64_t n = 0;
    for (double v : a.values()) {
        if (v == 1.0) ++n;
    }
    return n;
}

std::array<double, 3> one_sample(const SymmetricOperator& a, std::span<const double> z,
                                 bool use_symmetry, std::vector<double>& w1,
                                 std::vector<double>& w2, std::vector<double>& w3) {
    a.apply(z, w1);   // A z
    a.apply(w1, w2);  // A^2 z
    double y1 = 0.0;
    for (std::size_t i = 0; i < w1.size(); ++i) y1 += z[i] * w1[i];
    double y2 = 0.0, y3 = 0.0;
    if (use_symmetry) {
        for (std::size_t i = 0; i < w1.size(); ++i) {
            y2 += w1[i] * w1[i];
            y3 += w1[i] * w2[i];
        }
    } else {
        a.apply(w2, w3);  // A^3 z
        for (std::size_t i = 0; i < w2.size(); ++i) {
            y2 += z[i] * w2[i];
            y3 += z[i] * w3[i];
        }
    }
    return {y1, y2, y3};
}

}  // namespace

TriangleSampleMatrix triangle_samples(const SparseMatrix& adjacency, std::int64_t samples,
                                      const ProbeStream& stream, bool use_symmetry,
                                      int threads, std::uint64_t first_probe_index) {
    validate_adjacency(adjacency);
    if (samples < 1) throw DomainError("sample count must be at least 1");
    if (stream.dim() != adjacency.rows()) {
        throw DomainError("stream and adjacency dimensions differ");
    }

    TriangleSampleMatrix out;
    out.dim = adjacency.rows();
    out.edge_entries = count_unit_entries(adjacency);
    out.rows.resize(static_cast<std::size_t>(samples));
    const auto op = make_explicit(adjacency);
    const std::int64_t before = op->matvec_count();
    parallel_for(samples, threads, [&](std::int64_t i) {
        const std::size_t d = static_cast<std::size_t>(adjacency.rows());
        std::vector<double> w1(d), w2(d), w3;
        if (!use_symmetry) w3.resize(d);
        const auto z = stream.probe(first_probe_index + static_cast<std::uint64_t>(i));
        out.rows[static_cast<std::size_t>(i)] = one_sample(*op, z, use_symmetry, w1, w2, w3);
    });
    out.matvecs = op->matvec_count() - before;
    return out;
}

TriangleSampleMatrix triangle_samples_for_probes(const SparseMatrix& adjacency,
                                                 std::span<const std::vector<double>> probes,
                                                 bool use_symmetry) {
    validate_adjacency(adjacency);
    if (probes.empty()) throw DomainError("need at least one probe");

    TriangleSampleMatrix out;
    out.dim = adjacency.rows();
    out.edge_entries = count_unit_entries(adjacency);
    const auto op = make_explicit(adjacency);
    const std::int64_t before = op->matvec_count();
    const std::size_t d = static_cast<std::size_t>(adjacency.rows());
    std::vector<double> w1(d), w2(d), w3;
    if (!use_symmetry) w3.resize(d);
    for (const auto& z : probes) {
        if (static_cast<Index>(z.size()) != adjacency.rows()) {
            throw DomainError("probe dimension mismatch");
        }
        out.rows.push_back(one_sample(*op, z, use_symmetry, w1, w2, w3));
    }
    out.matvecs = op->matvec_count() - before;
    return out;
}

ControlVariateFit fit_control_variates(const TriangleSampleMatrix& samples) {
    const auto m = static_cast<std::int64_t>(samples.rows.size());
    if (m < 3) throw DomainError("control variate fit needs at least 3 samples");

    double mean1 = 0.0, mean2 = 0.0, mean3 = 0.0;
    for (const auto& r : samples.rows) {
        mean1 += r[0];
        mean2 += r[1];
        mean3 += r[2];
    }
    mean1 /= static_cast<double>(m);
    mean2 /= static_cast<double>(m);
    mean3 /= static_cast<double>(m);

    // Centered second moments; the intercept is absorbed by centering.
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, s13 = 0.0, s23 = 0.0, s33 = 0.0;
    for (const auto& r : samples.rows) {
        const double d1 = r[0] - mean1;
        const double d2 = r[1] - mean2;
        const double d3 = r[2] - mean3;
        s11 += d1 * d1;
        s12 += d1 * d2;
        s22 += d2 * d2;
        s13 += d1 * d3;
        s23 += d2 * d3;
        s33 += d3 * d3;
    }

    const double det = s11 * s22 - s12 * s12;
    const double scale = s11 * s22;
    ControlVariateFit fit;
    if (scale > 0.0 && det > 1e-12 * scale) {
        fit.a1 = (s22 * s13 - s12 * s23) / det;
        fit.a2 = (s11 * s23 - s12 * s13) / det;
    } else if (s22 > 0.0) {
        fit.a1 = 0.0;
        fit.a2 = s23 / s22;
    } else {
        fit.a1 = 0.0;
        fit.a2 = 0.0;
    }
    (void)s33;
    return fit;
}

TriangleEstimate triangle_estimate(const TriangleSampleMatrix& samples,
                                   const ControlVariateFit& fit) {
    const auto m = static_cast<std::int64_t>(samples.rows.size());
    if (m < 1) throw DomainError("need at least one sample");

    double mean = 0.0;
    for (const auto& r : samples.rows) {
        mean += r[2] - fit.a2 * r[1] - fit.a1 * r[0];
    }
    mean /= static_cast<double>(m);

    double var = 0.0;
    if (m >= 2) {
        for (const auto& r : samples.rows) {
            const double dev = (r[2] - fit.a2 * r[1] - fit.a1 * r[0]) - mean;
            var += dev * dev;
        }
        var /= static_cast<double>(m - 1);
    }

    // trace(A) = 0 by validation and trace(A^2) = nnz(A) for a simple graph.
    TriangleEstimate est;
    est.fit = fit;
    est.samples = m;
    est.matvecs = samples.matvecs;
    est.count = (mean + fit.a2 * static_cast<double>(samples.edge_entries)) / 6.0;
    est.std_error = std::sqrt(var / static_cast<double>(m)) / 6.0;
    return est;
}

}  // namespace spectrace
