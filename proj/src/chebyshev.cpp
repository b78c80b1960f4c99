#include "spectrace/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spectrace/errors.hpp"

namespace spectrace {

FunctionSpec FunctionSpec::parse(const std::string& text) {
    if (text == "log") return log();
    if (text == "sqrt") return sqrt();
    if (text == "exp") return exp();
    if (text == "cube") return cube();
    if (text.rfind("power:", 0) == 0) {
        try {
            return power(std::stod(text.substr(6)));
        } catch (const std::exception&) {
            throw DomainError("bad power exponent in '" + text + "'");
        }
    }
    throw DomainError("unknown function '" + text + "' (expected log|sqrt|exp|cube|power:<p>)");
}

double FunctionSpec::operator()(double x) const {
    switch (kind_) {
        case FunctionKind::log: return std::log(x);
        case FunctionKind::sqrt: return std::sqrt(x);
        case FunctionKind::exp: return std::exp(x);
        case FunctionKind::power: return std::pow(x, exponent_);
        case FunctionKind::cube: return x * x * x;
    }
    return 0.0;
}

std::string FunctionSpec::name() const {
    switch (kind_) {
        case FunctionKind::log: return "log";
        case FunctionKind::sqrt: return "sqrt";
        case FunctionKind::exp: return "exp";
        case FunctionKind::power: {
            std::ostringstream os;
            os << "power:" << exponent_;
            return os.str();
        }
        case FunctionKind::cube: return "cube";
    }
    return "?";
}

ChebyshevModel::ChebyshevModel(std::vector<double> coefficients, AffineMap map)
    : coefficients_(std::move(coefficients)), map_(map) {
    if (coefficients_.empty()) throw DomainError("model needs at least one coefficient");
    if (!(map_.lo < map_.hi)) throw DomainError("model interval must satisfy lo < hi");
}

double ChebyshevModel::node(int j) const {
    const int n = degree();
    if (j < 0 || j > n) throw DomainError("node index out of range");
    const double y = n == 0 ? 1.0 : std::cos(std::numbers::pi * j / n);
    return map_.inverse(y);
}

ChebyshevModel chebyshev_coefficients(const FunctionSpec& f, int degree, double lo, double hi) {
    if (degree < 0) throw DomainError("degree must be nonnegative");
    if (!(lo < hi)) throw DomainError("interval must satisfy lo < hi");
    const AffineMap map{lo, hi};
    const int n = degree;

    // Function values at the mapped extremum nodes cos(j pi / n).
    std::vector<double> fx(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const double y = n == 0 ? 1.0 : std::cos(std::numbers::pi * j / n);
        const double x = map.inverse(y);
        const double v = f(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << f.name() << " is not finite at node " << j << " (x = " << x << ")";
            throw DomainError(os.str());
        }
        fx[static_cast<std::size_t>(j)] = v;
    }

    if (n == 0) {
        return ChebyshevModel({fx[0]}, map);
    }

    // Half-weighted cosine sums; the endpoint terms carry weight 1/2 and the
    // same halving applies to c_0 and c_n. Arguments are reduced mod 2n so
    // the cosine argument never grows with j*k.
    std::vector<double> cos_table(static_cast<std::size_t>(2 * n));
    for (int r = 0; r < 2 * n; ++r) {
        cos_table[static_cast<std::size_t>(r)] = std::cos(std::numbers::pi * r / n);
    }
    std::vector<double> coeff(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        double acc = 0.5 * fx[0];
        for (int k = 1; k < n; ++k) {
            acc += fx[static_cast<std::size_t>(k)] *
                   cos_table[static_cast<std::size_t>((static_cast<long long>(j) * k) % (2 * n))];
        }
        acc += 0.5 * fx[static_cast<std::size_t>(n)] * (j % 2 == 0 ? 1.0 : -1.0);
        const double weight = (j == 0 || j == n) ? 1.0 : 2.0;
        coeff[static_cast<std::size_t>(j)] = weight * acc / n;
    }
    return ChebyshevModel(std::move(coeff), map);
}

double interpolant_value(const ChebyshevModel& model, double x) {
    const AffineMap& map = model.map();
    const double slack = 1e-12 * (map.hi - map.lo);
    if (x < map.lo - slack || x > map.hi + slack) {
        std::ostringstream os;
        os << "x = " << x << " outside model interval [" << map.lo << ", " << map.hi << "]";
        throw DomainError(os.str());
    }
    double y = map.forward(x);
    y = std::min(1.0, std::max(-1.0, y));

    const auto& c = model.coefficients();
    const int n = model.degree();
    double b1 = 0.0, b2 = 0.0;
    for (int j = n; j >= 1; --j) {
        const double b0 = c[static_cast<std::size_t>(j)] + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + y * b1 - b2;
}

TermSampleVector term_quadratic_forms(const SymmetricOperator& mapped_op,
                                      std::span<const double> z,
                                      const ChebyshevModel& model,
                                      bool use_symmetry,
                                      int max_degree) {
    const Index d = mapped_op.dim();
    if (static_cast<Index>(z.size()) != d) {
        throw DomainError("probe vector dimension mismatch");
    }
    const int n = max_degree < 0 ? model.degree() : max_degree;
    if (n > model.degree()) throw DomainError("max_degree exceeds model degree");
    const auto& c = model.coefficients();

    const std::int64_t before = mapped_op.matvec_count();

    // Unweighted quadratic forms q_j = z^T T_j(M) z, filled below.
    std::vector<double> q(static_cast<std::size_t>(n) + 1, 0.0);
    double znorm2 = 0.0;
    for (double v : z) znorm2 += v * v;
    q[0] = znorm2;

    auto check_finite = [&](double v) {
        if (!std::isfinite(v)) {
            throw IntervalViolation(
                "nonfinite quadratic form in the Chebyshev recurrence; "
                "the operator spectrum is not contained in the model interval");
        }
        return v;
    };

    if (n >= 1) {
        const int target = use_symmetry ? (n + 1) / 2 : n;
        std::vector<double> w_prev(z.begin(), z.end());   // w_0 = z
        std::vector<double> w_cur(static_cast<std::size_t>(d));
        mapped_op.apply(z, w_cur);                        // w_1 = M z
        double dot_z = 0.0;
        for (std::size_t i = 0; i < w_cur.size(); ++i) dot_z += z[i] * w_cur[i];
        q[1] = check_finite(dot_z);

        if (use_symmetry && 2 <= n && 2 > target) {
            double self = 0.0;
            for (double v : w_cur) self += v * v;
            q[2] = check_finite(2.0 * self - q[0]);       // pair (1, 1)
        }

        std::vector<double> w_next(static_cast<std::size_t>(d));
        for (int j = 2; j <= target; ++j) {
            mapped_op.apply(w_cur, w_next);
            for (std::size_t i = 0; i < w_next.size(); ++i) {
                w_next[i] = 2.0 * w_next[i] - w_prev[i];
            }
            std::swap(w_prev, w_next);
            std::swap(w_prev, w_cur);  // now w_cur = w_j, w_prev = w_{j-1}

            double direct = 0.0;
            for (std::size_t i = 0; i < w_cur.size(); ++i) direct += z[i] * w_cur[i];
            q[static_cast<std::size_t>(j)] = check_finite(direct);

            if (use_symmetry) {
                // Pairs (j, j) and (j, j-1) extend the table past the last
                // computed iterate without further applies.
                if (2 * j <= n && 2 * j > target) {
                    double self = 0.0;
                    for (double v : w_cur) self += v * v;
                    q[static_cast<std::size_t>(2 * j)] = check_finite(2.0 * self - q[0]);
                }
                if (2 * j - 1 <= n && 2 * j - 1 > target) {
                    double cross = 0.0;
                    for (std::size_t i = 0; i < w_cur.size(); ++i) cross += w_cur[i] * w_prev[i];
                    q[static_cast<std::size_t>(2 * j - 1)] = check_finite(2.0 * cross - q[1]);
                }
            }
        }
    }

    TermSampleVector out;
    out.terms.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        out.terms[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(j)];
    }
    out.matvecs = mapped_op.matvec_count() - before;
    return out;
}

}  // namespace spectrace
