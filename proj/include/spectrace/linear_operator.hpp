#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectrace/sparse_matrix.hpp"

namespace spectrace {

// Matvec tally shared along an operator chain. One unit is one application of
// the underlying explicit matrix; A^T A + sI costs two units per apply.
class MatvecCounter {
public:
    void add(std::int64_t units) noexcept {
        units_.fetch_add(units, std::memory_order_relaxed);
    }
    std::int64_t value() const noexcept {
        return units_.load(std::memory_order_relaxed);
    }

private:
    std::atomic<std::int64_t> units_{0};
};

struct SpectralInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::string method;
    std::int64_t matvecs_used = 0;
};

// A symmetric linear map exposed only through matvecs. Immutable after
// construction except for the shared counter; apply() is reentrant.
class SymmetricOperator {
public:
    virtual ~SymmetricOperator() = default;

    virtual Index dim() const noexcept = 0;

    // y = M x; increments the shared counter by unit_cost().
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;

    // Matvec units consumed by a single apply (1 explicit, 2 Gram).
    virtual int unit_cost() const noexcept = 0;

    // Structure-based spectral enclosure: Gershgorin discs for an explicit
    // matrix, [s, |A|_1 |A|_inf + s] for A^T A + sI, the mapped interval for
    // affine wrappers. Costs no matvecs. nullopt when unavailable.
    virtual std::optional<SpectralInterval> structural_interval() const = 0;

    std::int64_t matvec_count() const noexcept { return counter_->value(); }
    const std::shared_ptr<MatvecCounter>& counter() const noexcept { return counter_; }

    std::vector<double> operator()(std::span<const double> x) const;

protected:
    explicit SymmetricOperator(std::shared_ptr<MatvecCounter> counter)
        : counter_(std::move(counter)) {}

    std::shared_ptr<MatvecCounter> counter_;
};

// Explicit symmetric sparse matrix; requires a.is_symmetric().
std::shared_ptr<SymmetricOperator> make_explicit(SparseMatrix a);

// A^T A + shift I for a possibly rectangular A; costs 2 units per apply.
std::shared_ptr<SymmetricOperator> make_gram(SparseMatrix a, double shift);

// scale * M + offset * I, sharing the inner operator's counter at no extra cost.
std::shared_ptr<SymmetricOperator> make_affine(std::shared_ptr<const SymmetricOperator> inner,
                                               double scale, double offset);

// Non-owning affine wrapper for transient use inside estimators.
class AffineView final : public SymmetricOperator {
public:
    AffineView(const SymmetricOperator& inner, double scale, double offset);

    Index dim() const noexcept override { return inner_.dim(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    int unit_cost() const noexcept override { return inner_.unit_cost(); }
    std::optional<SpectralInterval> structural_interval() const override;

private:
    const SymmetricOperator& inner_;
    double scale_;
    double offset_;
};

enum class IntervalMethod { gershgorin, power_iteration };

struct PowerIterationOptions {
    int iterations = 100;
    double safety = 0.01;  // interval width inflation per side
    std::uint64_t seed = 0x5eed;
};

// Spectral enclosure [a, b] for the operator. The power-iteration method runs
// three Rayleigh-quotient sweeps (spectral radius, then each end of the
// spectrum) from a seeded random start and inflates the result by `safety`
// on each side; Gershgorin dispatches to structural_interval().
SpectralInterval spectral_interval(const SymmetricOperator& op, IntervalMethod method,
                                   const PowerIterationOptions& options = {});

}  // namespace spectrace
