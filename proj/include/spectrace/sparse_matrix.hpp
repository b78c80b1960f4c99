#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace spectrace {

using Index = std::int64_t;

struct Triplet {
    Index row = 0;
    Index col = 0;
    double value = 0.0;
};

// Sparse matrix in compressed row form. Column indices within each row are
// strictly increasing; duplicate entries are summed at construction. When the
// symmetric flag is set the stored matrix equals its transpose (verified).
class SparseMatrix {
public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(Index rows, Index cols,
                                      std::vector<Triplet> entries,
                                      bool symmetric = false);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }
    bool symmetric() const noexcept { return symmetric_; }

    const std::vector<Index>& row_offsets() const noexcept { return offsets_; }
    const std::vector<Index>& col_indices() const noexcept { return columns_; }
    const std::vector<double>& values() const noexcept { return values_; }

    // y = A x. Thread-safe; no internal state is touched.
    void multiply(std::span<const double> x, std::span<double> y) const;
    // y = A^T x.
    void multiply_transpose(std::span<const double> x, std::span<double> y) const;

    double norm_one() const;  // max absolute column sum
    double norm_inf() const;  // max absolute row sum

    // Exact structural and numerical equality with the transpose.
    bool is_symmetric() const;

    // Row-major dense expansion; intended for tests and small oracles.
    std::vector<double> to_dense() const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Index> offsets_;   // size rows + 1
    std::vector<Index> columns_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

// Matrix Market coordinate reader. Accepts real and pattern fields with
// general or symmetric storage; pattern entries become 1.0, symmetric files
// are expanded to full storage, duplicates are summed, indices converted to
// 0-based. Malformed input raises ParseError with the offending line number.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market_file(const std::string& path);

// Writes coordinate format; symmetric matrices are written as the lower
// triangle under symmetric storage, everything else as general.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);

}  // namespace spectrace
