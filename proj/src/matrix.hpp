#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppcalc {

using Int = boost::multiprecision::cpp_int;

// Single error type for the whole library; `code` maps onto the C API status
// values and the CLI exit codes.
struct Error : std::runtime_error {
    enum class Code { parse, dimension, domain, budget, io, argument };
    Code code;
    Error(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] inline void fail(Error::Code c, const std::string& msg) { throw Error(c, msg); }

// Floor division/remainder (cpp_int's operator/ truncates toward zero).
Int floor_div(const Int& a, const Int& b);
Int floor_mod(const Int& a, const Int& b);

// Dense row-major matrix over Z. Rows are the working unit throughout:
// module elements are coordinate rows, relation sets are row spans.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Int> a;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {
        if (r < 0 || c < 0) fail(Error::Code::dimension, "negative matrix dimension");
    }
    IntMatrix(int r, int c, std::vector<Int> data) : rows(r), cols(c), a(std::move(data)) {
        if (a.size() != static_cast<size_t>(r) * c) fail(Error::Code::dimension, "matrix data size mismatch");
    }

    static IntMatrix identity(int n);

    Int& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    std::vector<Int> row(int i) const;
    void set_row(int i, const std::vector<Int>& v);
    void swap_rows(int i, int j);
    void negate_row(int i);
    // row i -= q * row j
    void submul_row(int i, int j, const Int& q);

    IntMatrix transposed() const;
    bool is_zero() const;
    bool operator==(const IntMatrix&) const = default;
};

IntMatrix mul(const IntMatrix& a, const IntMatrix& b);
IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
IntMatrix hstack(const IntMatrix& a, const IntMatrix& b);
std::vector<Int> mul_row(const std::vector<Int>& v, const IntMatrix& m);

// Hermite normal form (row style): u * m = h with u unimodular, h in row
// echelon form, pivots positive, entries above each pivot reduced into
// [0, pivot). h keeps the full row count (zero rows trail).
struct HnfResult {
    IntMatrix h;
    IntMatrix u;
    int rank = 0;
};
HnfResult hermite_normal_form(const IntMatrix& m);

// Smith normal form: u * m * v = d with u, v unimodular, d diagonal,
// nonnegative, and d[i] | d[i+1].
struct SnfResult {
    IntMatrix u;
    IntMatrix d;
    IntMatrix v;
    std::vector<Int> diagonal() const;
};
SnfResult smith_normal_form(const IntMatrix& m);

// Subgroup of Z^ambient given by the row span of `basis` (kept in HNF with
// zero rows stripped, so structural equality is lattice equality).
struct Lattice {
    int ambient = 0;
    IntMatrix basis;  // rank x ambient, HNF

    static Lattice from_rows(const IntMatrix& rows);
    static Lattice zero(int ambient) { return from_rows(IntMatrix(0, ambient)); }
    static Lattice full(int ambient) { return from_rows(IntMatrix::identity(ambient)); }

    int rank() const { return basis.rows; }
    bool contains(const std::vector<Int>& v) const;
    // canonical coset representative of v modulo this lattice
    std::vector<Int> reduce(std::vector<Int> v) const;
    bool operator==(const Lattice&) const = default;
};

// contains: every row of y lies in x.  equals: identical canonical bases.
bool lattice_contains(const Lattice& x, const Lattice& y);
Lattice lattice_sum(const Lattice& x, const Lattice& y);
Lattice lattice_intersection(const Lattice& x, const Lattice& y);

// Basis (as Lattice) of { x : x * m = 0 } resp. { x : m * x^T = 0 }.
Lattice left_kernel(const IntMatrix& m);
Lattice right_kernel(const IntMatrix& m);

// Exact inverse of a matrix with determinant +-1 (errors otherwise).
IntMatrix unimodular_inverse(const IntMatrix& m);

// Solve a * x = b for an integer column vector x; `particular` is the
// canonical representative modulo `kernel` (= right kernel of a), so the
// result is deterministic.
struct LinearSolution {
    std::vector<Int> particular;
    Lattice kernel;
};
std::optional<LinearSolution> solve_linear(const IntMatrix& a, const std::vector<Int>& b);

// Row-style convenience: least solution x with x * m = b, if any.
std::optional<std::vector<Int>> solve_row(const IntMatrix& m, const std::vector<Int>& b);

}  // namespace ppcalc
