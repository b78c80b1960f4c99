#include "spectrace/sparse_matrix.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "spectrace/errors.hpp"

namespace spectrace {

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols,
                                         std::vector<Triplet> entries,
                                         bool symmetric) {
    if (rows <= 0 || cols <= 0) {
        throw DomainError("matrix dimensions must be positive");
    }
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw DomainError("triplet index out of range");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
    m.columns_.reserve(entries.size());
    m.values_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size();) {
        const Index r = entries[i].row;
        const Index c = entries[i].col;
        double v = 0.0;
        for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i) {
            v += entries[i].value;  // duplicates are summed
        }
        m.columns_.push_back(c);
        m.values_.push_back(v);
        m.offsets_[static_cast<std::size_t>(r) + 1] = static_cast<Index>(m.columns_.size());
    }
    for (Index r = 0; r < rows; ++r) {
        m.offsets_[static_cast<std::size_t>(r) + 1] =
            std::max(m.offsets_[static_cast<std::size_t>(r) + 1], m.offsets_[static_cast<std::size_t>(r)]);
    }
    if (symmetric) {
        if (rows != cols || !m.is_symmetric()) {
            throw DomainError("matrix flagged symmetric does not equal its transpose");
        }
        m.symmetric_ = true;
    }
    return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_) {
        throw DomainError("matvec dimension mismatch");
    }
    for (Index r = 0; r < rows_; ++r) {
        double acc = 0.0;
        const Index end = offsets_[static_cast<std::size_t>(r) + 1];
        for (Index k = offsets_[static_cast<std::size_t>(r)]; k < end; ++k) {
            acc += values_[static_cast<std::size_t>(k)] *
                   x[static_cast<std::size_t>(columns_[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(r)] = acc;
    }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
    if (static_cast<Index>(x.size()) != rows_ || static_cast<Index>(y.size()) != cols_) {
        throw DomainError("transpose matvec dimension mismatch");
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (Index r = 0; r < rows_; ++r) {
        const double xr = x[static_cast<std::size_t>(r)];
        const Index end = offsets_[static_cast<std::size_t>(r) + 1];
        for (Index k = offsets_[static_cast<std::size_t>(r)]; k < end; ++k) {
            y[static_cast<std::size_t>(columns_[static_cast<std::size_t>(k)])] +=
                values_[static_cast<std::size_t>(k)] * xr;
        }
    }
}

double SparseMatrix::norm_one() const {
    std::vector<double> col_sum(static_cast<std::size_t>(cols_), 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        col_sum[static_cast<std::size_t>(columns_[k])] += std::abs(values_[k]);
    }
    double best = 0.0;
    for (double s : col_sum) best = std::max(best, s);
    return best;
}

double SparseMatrix::norm_inf() const {
    double best = 0.0;
    for (Index r = 0; r < rows_; ++r) {
        double s = 0.0;
        const Index end = offsets_[static_cast<std::size_t>(r) + 1];
        for (Index k = offsets_[static_cast<std::size_t>(r)]; k < end; ++k) {
            s += std::abs(values_[static_cast<std::size_t>(k)]);
        }
        best = std::max(best, s);
    }
    return best;
}

bool SparseMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    // Build the transpose in CSR and compare arrays exactly.
    std::vector<Index> t_offsets(static_cast<std::size_t>(rows_) + 1, 0);
    for (Index c : columns_) ++t_offsets[static_cast<std::size_t>(c) + 1];
    for (Index r = 0; r < rows_; ++r) {
        t_offsets[static_cast<std::size_t>(r) + 1] += t_offsets[static_cast<std::size_t>(r)];
    }
    std::vector<Index> t_cols(columns_.size());
    std::vector<double> t_vals(values_.size());
    std::vector<Index> cursor(t_offsets.begin(), t_offsets.end() - 1);
    for (Index r = 0; r < rows_; ++r) {
        const Index end = offsets_[static_cast<std::size_t>(r) + 1];
        for (Index k = offsets_[static_cast<std::size_t>(r)]; k < end; ++k) {
            const Index c = columns_[static_cast<std::size_t>(k)];
            const Index slot = cursor[static_cast<std::size_t>(c)]++;
            t_cols[static_cast<std::size_t>(slot)] = r;
            t_vals[static_cast<std::size_t>(slot)] = values_[static_cast<std::size_t>(k)];
        }
    }
    return t_offsets == offsets_ && t_cols == columns_ && t_vals == values_;
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> dense(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0);
    for (Index r = 0; r < rows_; ++r) {
        const Index end = offsets_[static_cast<std::size_t>(r) + 1];
        for (Index k = offsets_[static_cast<std::size_t>(r)]; k < end; ++k) {
            dense[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                  static_cast<std::size_t>(columns_[static_cast<std::size_t>(k)])] =
                values_[static_cast<std::size_t>(k)];
        }
    }
    return dense;
}

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

Index parse_index(const std::string& tok, std::size_t line) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "expected integer, got '" + tok + "'");
    }
    if (pos != tok.size()) throw ParseError(line, "expected integer, got '" + tok + "'");
    return static_cast<Index>(v);
}

double parse_real(const std::string& tok, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
        throw ParseError(line, "expected real value, got '" + tok + "'");
    }
    return v;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "empty input");
    ++lineno;
    auto header = split_tokens(line);
    if (header.size() != 5 || lowercase(header[0]) != "%%matrixmarket" ||
        lowercase(header[1]) != "matrix") {
        throw ParseError(lineno, "malformed Matrix Market header");
    }
    const std::string format = lowercase(header[2]);
    const std::string field = lowercase(header[3]);
    const std::string storage = lowercase(header[4]);
    if (format != "coordinate") {
        throw ParseError(lineno, "unsupported format '" + header[2] + "' (expected coordinate)");
    }
    if (field != "real" && field != "pattern") {
        throw ParseError(lineno, "unsupported field '" + header[3] + "' (expected real or pattern)");
    }
    if (storage != "general" && storage != "symmetric") {
        throw ParseError(lineno, "unsupported storage '" + header[4] + "' (expected general or symmetric)");
    }
    const bool pattern = field == "pattern";
    const bool symmetric = storage == "symmetric";

    // Size line: first non-comment, non-blank line after the header.
    Index rows = 0, cols = 0;
    std::size_t declared = 0;
    for (;;) {
        if (!std::getline(in, line)) throw ParseError(lineno, "missing size line");
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        auto toks = split_tokens(line);
        if (toks.empty()) continue;
        if (toks.size() != 3) throw ParseError(lineno, "size line must be 'rows cols nnz'");
        rows = parse_index(toks[0], lineno);
        cols = parse_index(toks[1], lineno);
        const Index nz = parse_index(toks[2], lineno);
        if (rows <= 0 || cols <= 0 || nz < 0) throw ParseError(lineno, "invalid matrix dimensions");
        declared = static_cast<std::size_t>(nz);
        break;
    }
    if (symmetric && rows != cols) {
        throw ParseError(lineno, "symmetric storage requires a square matrix");
    }

    std::vector<Triplet> entries;
    entries.reserve(symmetric ? 2 * declared : declared);
    std::size_t seen = 0;
    while (seen < declared) {
        if (!std::getline(in, line)) {
            throw ParseError(lineno, "unexpected end of file: " + std::to_string(seen) + " of " +
                                         std::to_string(declared) + " entries read");
        }
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        auto toks = split_tokens(line);
        if (toks.empty()) continue;
        const std::size_t expected = pattern ? 2 : 3;
        if (toks.size() != expected) {
            throw ParseError(lineno, "expected " + std::to_string(expected) + " tokens per entry");
        }
        const Index i = parse_index(toks[0], lineno) - 1;  // to 0-based
        const Index j = parse_index(toks[1], lineno) - 1;
        if (i < 0 || i >= rows || j < 0 || j >= cols) {
            throw ParseError(lineno, "entry index out of declared bounds");
        }
        const double v = pattern ? 1.0 : parse_real(toks[2], lineno);
        if (symmetric && j > i) {
            throw ParseError(lineno, "symmetric storage must hold the lower triangle only");
        }
        entries.push_back({i, j, v});
        if (symmetric && i != j) entries.push_back({j, i, v});
        ++seen;
    }

    return SparseMatrix::from_triplets(rows, cols, std::move(entries), symmetric);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix file: " + path);
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
    const bool symmetric = m.symmetric();
    out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
    std::size_t count = 0;
    const auto& offsets = m.row_offsets();
    const auto& cols = m.col_indices();
    const auto& vals = m.values();
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index k = offsets[static_cast<std::size_t>(r)]; k < offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            if (!symmetric || cols[static_cast<std::size_t>(k)] <= r) ++count;
        }
    }
    out << m.rows() << " " << m.cols() << " " << count << "\n";
    out.precision(17);
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index k = offsets[static_cast<std::size_t>(r)]; k < offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            const Index c = cols[static_cast<std::size_t>(k)];
            if (symmetric && c > r) continue;
            out << (r + 1) << " " << (c + 1) << " " << vals[static_cast<std::size_t>(k)] << "\n";
        }
    }
}

}  // namespace spectrace
