#include "spectrace/linear_operator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "spectrace/errors.hpp"
#include "spectrace/rng.hpp"

namespace spectrace {

std::vector<double> SymmetricOperator::operator()(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(dim()));
    apply(x, y);
    return y;
}

namespace {

class ExplicitOperator final : public SymmetricOperator {
public:
    explicit ExplicitOperator(SparseMatrix a)
        : SymmetricOperator(std::make_shared<MatvecCounter>()), a_(std::move(a)) {
        if (a_.rows() != a_.cols()) {
            throw DomainError("explicit operator requires a square matrix");
        }
        if (!a_.is_symmetric()) {
            throw DomainError("explicit operator requires a symmetric matrix");
        }
    }

    Index dim() const noexcept override { return a_.rows(); }

    void apply(std::span<const double> x, std::span<double> y) const override {
        a_.multiply(x, y);
        counter_->add(1);
    }

    int unit_cost() const noexcept override { return 1; }

    std::optional<SpectralInterval> structural_interval() const override {
        // Union of Gershgorin discs: center a_ii, radius sum_{j != i} |a_ij|.
        double lo = 0.0, hi = 0.0;
        bool first = true;
        const auto& offsets = a_.row_offsets();
        const auto& cols = a_.col_indices();
        const auto& vals = a_.values();
        for (Index r = 0; r < a_.rows(); ++r) {
            double center = 0.0, radius = 0.0;
            for (Index k = offsets[static_cast<std::size_t>(r)];
                 k < offsets[static_cast<std::size_t>(r) + 1]; ++k) {
                if (cols[static_cast<std::size_t>(k)] == r) {
                    center = vals[static_cast<std::size_t>(k)];
                } else {
                    radius += std::abs(vals[static_cast<std::size_t>(k)]);
                }
            }
            lo = first ? center - radius : std::min(lo, center - radius);
            hi = first ? center + radius : std::max(hi, center + radius);
            first = false;
        }
        return SpectralInterval{lo, hi, "gershgorin", 0};
    }

    const SparseMatrix& matrix() const noexcept { return a_; }

private:
    SparseMatrix a_;
};

class GramOperator final : public SymmetricOperator {
public:
    GramOperator(SparseMatrix a, double shift)
        : SymmetricOperator(std::make_shared<MatvecCounter>()), a_(std::move(a)), shift_(shift) {
        if (shift_ < 0.0) throw DomainError("Gram shift must be nonnegative");
    }

    Index dim() const noexcept override { return a_.cols(); }

    void apply(std::span<const double> x, std::span<double> y) const override {
        std::vector<double> tmp(static_cast<std::size_t>(a_.rows()));
        a_.multiply(x, tmp);
        a_.multiply_transpose(tmp, y);
        if (shift_ != 0.0) {
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift_ * x[i];
        }
        counter_->add(2);
    }

    int unit_cost() const noexcept override { return 2; }

    std::optional<SpectralInterval> structural_interval() const override {
        // sigma_max^2 <= |A|_1 |A|_inf; the Gram part is positive semidefinite.
        const double upper = a_.norm_one() * a_.norm_inf();
        return SpectralInterval{shift_, upper + shift_, "gram-product-bound", 0};
    }

private:
    SparseMatrix a_;
    double shift_;
};

class OwningAffineOperator final : public SymmetricOperator {
public:
    OwningAffineOperator(std::shared_ptr<const SymmetricOperator> inner, double scale, double offset)
        : SymmetricOperator(inner->counter()),
          inner_(std::move(inner)),
          view_(*inner_, scale, offset) {}

    Index dim() const noexcept override { return view_.dim(); }
    void apply(std::span<const double> x, std::span<double> y) const override {
        view_.apply(x, y);
    }
    int unit_cost() const noexcept override { return view_.unit_cost(); }
    std::optional<SpectralInterval> structural_interval() const override {
        return view_.structural_interval();
    }

private:
    std::shared_ptr<const SymmetricOperator> inner_;
    AffineView view_;
};

}  // namespace

std::shared_ptr<SymmetricOperator> make_explicit(SparseMatrix a) {
    return std::make_shared<ExplicitOperator>(std::move(a));
}

std::shared_ptr<SymmetricOperator> make_gram(SparseMatrix a, double shift) {
    return std::make_shared<GramOperator>(std::move(a), shift);
}

std::shared_ptr<SymmetricOperator> make_affine(std::shared_ptr<const SymmetricOperator> inner,
                                               double scale, double offset) {
    return std::make_shared<OwningAffineOperator>(std::move(inner), scale, offset);
}

AffineView::AffineView(const SymmetricOperator& inner, double scale, double offset)
    : SymmetricOperator(inner.counter()), inner_(inner), scale_(scale), offset_(offset) {}

void AffineView::apply(std::span<const double> x, std::span<double> y) const {
    inner_.apply(x, y);
    if (scale_ != 1.0 || offset_ != 0.0) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = scale_ * y[i] + offset_ * x[i];
    }
}

std::optional<SpectralInterval> AffineView::structural_interval() const {
    auto inner = inner_.structural_interval();
    if (!inner) return std::nullopt;
    double a = scale_ * inner->lo + offset_;
    double b = scale_ * inner->hi + offset_;
    if (a > b) std::swap(a, b);
    return SpectralInterval{a, b, inner->method + "+affine", inner->matvecs_used};
}

namespace {

// One Rayleigh-quotient sweep of v -> scale*(M v) + offset*v, tracking the
// largest quotient seen. Any Rayleigh quotient lies inside the spectrum, so
// the running maximum never overshoots the top eigenvalue.
double rayleigh_sweep(const SymmetricOperator& op, int iterations, std::uint64_t seed,
                      double scale, double offset) {
    const Index d = op.dim();
    std::vector<double> v(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
        v[static_cast<std::size_t>(i)] =
            2.0 * rng::to_unit_double(rng::mix(seed, static_cast<std::uint64_t>(i))) - 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v[0] = 1.0;
        norm = 1.0;
    }
    for (double& x : v) x /= norm;

    std::vector<double> w(static_cast<std::size_t>(d));
    double best = 0.0;
    bool have_best = false;
    for (int it = 0; it < iterations; ++it) {
        op.apply(v, w);
        if (scale != 1.0 || offset != 0.0) {
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = scale * w[i] + offset * v[i];
        }
        double quotient = 0.0, wnorm = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            quotient += v[i] * w[i];
            wnorm += w[i] * w[i];
        }
        if (!have_best || quotient > best) {
            best = quotient;
            have_best = true;
        }
        wnorm = std::sqrt(wnorm);
        if (wnorm == 0.0) break;  // v is in the kernel; quotient 0 already recorded
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wnorm;
    }
    return best;
}

}  // namespace

SpectralInterval spectral_interval(const SymmetricOperator& op, IntervalMethod method,
                                   const PowerIterationOptions& options) {
    if (op.dim() <= 0) throw DomainError("operator has zero dimension");

    if (method == IntervalMethod::gershgorin) {
        auto interval = op.structural_interval();
        if (!interval) throw DomainError("operator has no structural spectral bound");
        return *interval;
    }

    if (options.iterations < 1) throw DomainError("power iteration needs at least one iteration");
    const std::int64_t before = op.matvec_count();

    // Spectral radius first, then the two ends of the shifted spectrum.
    const double r_plus = rayleigh_sweep(op, options.iterations, options.seed, 1.0, 0.0);
    const double r_minus = rayleigh_sweep(op, options.iterations, options.seed + 1, -1.0, 0.0);
    const double rho = std::max(std::abs(r_plus), std::abs(r_minus));
    const double hi_est =
        rayleigh_sweep(op, options.iterations, options.seed + 2, 1.0, rho) - rho;
    const double lo_est =
        rho - rayleigh_sweep(op, options.iterations, options.seed + 3, -1.0, rho);

    double lo = std::min(lo_est, hi_est);
    double hi = std::max(lo_est, hi_est);
    double width = hi - lo;
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    if (width < 1e-12 * scale) width = scale;  // point spectrum
    lo -= options.safety * width;
    hi += options.safety * width;

    return SpectralInterval{lo, hi, "power_iteration", op.matvec_count() - before};
}

}  // namespace spectrace
