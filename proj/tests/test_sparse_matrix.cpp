#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "spectrace/errors.hpp"
#include "spectrace/sparse_matrix.hpp"
#include "test_support.hpp"

using spectrace::ParseError;
using spectrace::SparseMatrix;

namespace {

SparseMatrix parse(const std::string& text) {
    std::istringstream in(text);
    return spectrace::read_matrix_market(in);
}

}  // namespace

TEST_CASE("symmetric storage expands to full structure") {
    const auto m = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 3.0\n");
    CHECK(m.symmetric());
    CHECK(m.nnz() == 2);
    const auto dense = m.to_dense();
    CHECK(dense == std::vector<double>{0.0, 3.0, 3.0, 0.0});
}

TEST_CASE("pattern entries become 1.0") {
    const auto m = parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n");
    CHECK(m.to_dense() == std::vector<double>{1.0});
}

TEST_CASE("duplicate entries are summed") {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.5\n1 1 2.5\n2 1 -1.0\n");
    CHECK(m.nnz() == 2);
    CHECK(m.to_dense() == std::vector<double>{4.0, 0.0, -1.0, 0.0});
}

TEST_CASE("comments and blank lines are skipped") {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real general\n% a comment\n\n2 2 1\n% another\n2 2 7.0\n");
    CHECK(m.to_dense() == std::vector<double>{0.0, 0.0, 0.0, 7.0});
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
                    ParseError);
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"), ParseError);
    CHECK_THROWS_AS(parse("not a header\n"), ParseError);

    try {
        parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
        FAIL("expected out-of-bounds error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    // Truncated file: fewer entries than declared.
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"),
                    ParseError);
    // Non-numeric value.
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 abc\n"),
                    ParseError);
    // Symmetric storage with an upper-triangle entry.
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 3.0\n"),
                    ParseError);
}

TEST_CASE("round-trip through the writer preserves the dense expansion") {
    // Random sparse 10x10 with ~30% fill.
    std::vector<spectrace::Triplet> entries;
    for (spectrace::Index i = 0; i < 10; ++i) {
        for (spectrace::Index j = 0; j < 10; ++j) {
            const double u = test_support::uniform(42, static_cast<std::uint64_t>(i * 10 + j));
            if (u < 0.3) entries.push_back({i, j, 2.0 * u - 0.3});
        }
    }
    const auto original = SparseMatrix::from_triplets(10, 10, entries, false);

    std::ostringstream out;
    spectrace::write_matrix_market(out, original);
    const auto reparsed = parse(out.str());
    CHECK(reparsed.to_dense() == original.to_dense());

    // Same check through symmetric storage.
    const auto sym = test_support::sparse_from_dense(
        test_support::random_symmetric(8, 7, 2.0), true);
    std::ostringstream sym_out;
    spectrace::write_matrix_market(sym_out, sym);
    const auto sym_reparsed = parse(sym_out.str());
    CHECK(sym_reparsed.symmetric());
    CHECK(sym_reparsed.to_dense() == sym.to_dense());
}

TEST_CASE("matvec and transpose matvec match the dense expansion") {
    const Eigen::MatrixXd dense = test_support::random_symmetric(20, 3, 1.5);
    const auto sparse = test_support::sparse_from_dense(dense, true);

    Eigen::VectorXd x(20);
    for (int i = 0; i < 20; ++i) x(i) = test_support::uniform(5, static_cast<std::uint64_t>(i));

    std::vector<double> y(20);
    sparse.multiply(std::span<const double>(x.data(), 20), y);
    const Eigen::VectorXd expected = dense * x;
    for (int i = 0; i < 20; ++i) {
        CHECK(y[static_cast<std::size_t>(i)] == doctest::Approx(expected(i)).epsilon(1e-12));
    }

    std::vector<double> yt(20);
    sparse.multiply_transpose(std::span<const double>(x.data(), 20), yt);
    for (int i = 0; i < 20; ++i) {
        CHECK(yt[static_cast<std::size_t>(i)] == doctest::Approx(expected(i)).epsilon(1e-12));
    }
}

TEST_CASE("norms and symmetry checks") {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real general\n2 3 3\n1 1 1.0\n1 3 -4.0\n2 2 2.0\n");
    CHECK(m.norm_inf() == 5.0);
    CHECK(m.norm_one() == 4.0);
    CHECK_FALSE(m.is_symmetric());

    const auto sym = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n2 1 2.0\n");
    CHECK(sym.is_symmetric());
}

TEST_CASE("from_triplets validates inputs") {
    using spectrace::Triplet;
    CHECK_THROWS_AS(SparseMatrix::from_triplets(0, 2, {}, false), spectrace::DomainError);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {Triplet{2, 0, 1.0}}, false),
                    spectrace::DomainError);
    // Symmetric flag on a nonsymmetric matrix is rejected.
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {Triplet{0, 1, 1.0}}, true),
                    spectrace::DomainError);
}
