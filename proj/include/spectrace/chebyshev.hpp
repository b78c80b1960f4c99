#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spectrace/linear_operator.hpp"

namespace spectrace {

enum class FunctionKind { log, sqrt, exp, power, cube };

// Scalar target function f for trace(f(A)).
class FunctionSpec {
public:
    static FunctionSpec log() { return FunctionSpec(FunctionKind::log); }
    static FunctionSpec sqrt() { return FunctionSpec(FunctionKind::sqrt); }
    static FunctionSpec exp() { return FunctionSpec(FunctionKind::exp); }
    static FunctionSpec power(double exponent) {
        FunctionSpec f(FunctionKind::power);
        f.exponent_ = exponent;
        return f;
    }
    static FunctionSpec cube() { return FunctionSpec(FunctionKind::cube); }

    // "log" | "sqrt" | "exp" | "cube" | "power:<p>"
    static FunctionSpec parse(const std::string& text);

    double operator()(double x) const;
    FunctionKind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return exponent_; }
    std::string name() const;

private:
    explicit FunctionSpec(FunctionKind kind) : kind_(kind) {}

    FunctionKind kind_;
    double exponent_ = 1.0;
};

// Affine change of variables g mapping [lo, hi] onto [-1, 1]; g(lo) = -1 and
// g(hi) = 1 hold exactly in floating point.
struct AffineMap {
    double lo = -1.0;
    double hi = 1.0;

    double forward(double x) const { return ((x - lo) + (x - hi)) / (hi - lo); }
    double inverse(double y) const { return 0.5 * (y * (hi - lo) + (lo + hi)); }
    // g(M) = scale * M + offset * I
    double scale() const { return 2.0 / (hi - lo); }
    double offset() const { return -(lo + hi) / (hi - lo); }
};

// Degree-n interpolation model: coefficients c_0..c_n of the first-kind
// Chebyshev expansion of f composed with the inverse interval map.
class ChebyshevModel {
public:
    ChebyshevModel(std::vector<double> coefficients, AffineMap map);

    int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    const AffineMap& map() const noexcept { return map_; }
    double lo() const noexcept { return map_.lo; }
    double hi() const noexcept { return map_.hi; }

    // j-th interpolation node mapped into [lo, hi].
    double node(int j) const;

private:
    std::vector<double> coefficients_;
    AffineMap map_;
};

// Interpolation coefficients of f on [lo, hi] at the n+1 extremum nodes
// cos(j pi / n), computed with the half-weighted cosine sum. Throws
// DomainError naming the offending node if f is not finite there.
ChebyshevModel chebyshev_coefficients(const FunctionSpec& f, int degree, double lo, double hi);

// Evaluates the interpolant at x in [lo, hi] by the Clenshaw recurrence.
// Values outside the interval raise DomainError; no extrapolation.
double interpolant_value(const ChebyshevModel& model, double x);

// Weighted per-term quadratic forms for one probe vector.
struct TermSampleVector {
    std::vector<double> terms;   // t_j = c_j z^T T_j(M) z, j = 0..max_degree
    std::int64_t matvecs = 0;    // counter units consumed
};

// Runs the three-term recurrence w_{j+1} = 2 M w_j - w_{j-1} on an operator
// whose spectrum lies in [-1, 1] and records t_j = c_j z^T w_j. The plain
// path consumes max_degree applies; with use_symmetry the recurrence stops at
// ceil(max_degree / 2) applies and the remaining terms come from the product
// identity z^T T_{i+j} z = 2 w_i^T w_j - z^T T_{|i-j|} z.
TermSampleVector term_quadratic_forms(const SymmetricOperator& mapped_op,
                                      std::span<const double> z,
                                      const ChebyshevModel& model,
                                      bool use_symmetry,
                                      int max_degree = -1);

}  // namespace spectrace
