#include "matrix.hpp"

namespace ppcalc {

Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

Int floor_mod(const Int& a, const Int& b) { return a - floor_div(a, b) * b; }

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

std::vector<Int> IntMatrix::row(int i) const {
    return std::vector<Int>(a.begin() + static_cast<size_t>(i) * cols,
                            a.begin() + static_cast<size_t>(i + 1) * cols);
}

void IntMatrix::set_row(int i, const std::vector<Int>& v) {
    if (static_cast<int>(v.size()) != cols) fail(Error::Code::dimension, "set_row size mismatch");
    std::copy(v.begin(), v.end(), a.begin() + static_cast<size_t>(i) * cols);
}

void IntMatrix::swap_rows(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols; ++c) std::swap(at(i, c), at(j, c));
}

void IntMatrix::negate_row(int i) {
    for (int c = 0; c < cols; ++c) at(i, c) = -at(i, c);
}

void IntMatrix::submul_row(int i, int j, const Int& q) {
    if (q == 0) return;
    for (int c = 0; c < cols; ++c) at(i, c) -= q * at(j, c);
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
    return t;
}

bool IntMatrix::is_zero() const {
    for (const Int& x : a)
        if (x != 0) return false;
    return true;
}

IntMatrix mul(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols != b.rows) fail(Error::Code::dimension, "matrix product shape mismatch");
    IntMatrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const Int& x = a.at(i, k);
            if (x == 0) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += x * b.at(k, j);
        }
    return out;
}

IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols != b.cols) fail(Error::Code::dimension, "vstack width mismatch");
    IntMatrix out(a.rows + b.rows, a.cols);
    std::copy(a.a.begin(), a.a.end(), out.a.begin());
    std::copy(b.a.begin(), b.a.end(), out.a.begin() + a.a.size());
    return out;
}

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows != b.rows) fail(Error::Code::dimension, "hstack height mismatch");
    IntMatrix out(a.rows, a.cols + b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) out.at(i, j) = a.at(i, j);
        for (int j = 0; j < b.cols; ++j) out.at(i, a.cols + j) = b.at(i, j);
    }
    return out;
}

std::vector<Int> mul_row(const std::vector<Int>& v, const IntMatrix& m) {
    if (static_cast<int>(v.size()) != m.rows) fail(Error::Code::dimension, "row-vector product shape mismatch");
    std::vector<Int> out(m.cols);
    for (int i = 0; i < m.rows; ++i) {
        if (v[i] == 0) continue;
        for (int j = 0; j < m.cols; ++j) out[j] += v[i] * m.at(i, j);
    }
    return out;
}

namespace {
// Quotient minimizing |a - q*b|: with floor division the remainder shares
// the sign of b, so the balanced quotient is floor or floor+1.
Int round_div(const Int& a, const Int& b) {
    Int q = floor_div(a, b);
    Int r = a - q * b;
    if (2 * abs(r) > abs(b)) ++q;
    return q;
}
}  // namespace

HnfResult hermite_normal_form(const IntMatrix& m) {
    HnfResult r{m, IntMatrix::identity(m.rows), 0};
    IntMatrix& h = r.h;
    IntMatrix& u = r.u;
    int pr = 0;
    for (int pc = 0; pc < m.cols && pr < m.rows; ++pc) {
        // gcd out the column below pr. Always pivot on the smallest nonzero
        // entry and clear with balanced quotients: remainders at most half
        // the pivot, so quotients stay small and the untouched columns do
        // not blow up (the naive first-nonzero/floor variant shows
        // exponential entry growth already around 30 x 30).
        while (true) {
            int piv = -1;
            for (int i = pr; i < m.rows; ++i) {
                if (h.at(i, pc) == 0) continue;
                if (piv < 0 || abs(h.at(i, pc)) < abs(h.at(piv, pc))) piv = i;
            }
            if (piv < 0) break;
            h.swap_rows(pr, piv);
            u.swap_rows(pr, piv);
            bool clean = true;
            for (int i = pr + 1; i < m.rows; ++i) {
                if (h.at(i, pc) == 0) continue;
                Int q = round_div(h.at(i, pc), h.at(pr, pc));
                h.submul_row(i, pr, q);
                u.submul_row(i, pr, q);
                if (h.at(i, pc) != 0) clean = false;
            }
            if (clean) break;
        }
        if (h.at(pr, pc) == 0) continue;  // column has no pivot; next column
        if (h.at(pr, pc) < 0) {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        for (int i = 0; i < pr; ++i) {
            Int q = floor_div(h.at(i, pc), h.at(pr, pc));
            h.submul_row(i, pr, q);
            u.submul_row(i, pr, q);
        }
        ++pr;
    }
    r.rank = pr;
    return r;
}

std::vector<Int> SnfResult::diagonal() const {
    std::vector<Int> out;
    for (int i = 0; i < d.rows && i < d.cols; ++i) out.push_back(d.at(i, i));
    return out;
}

SnfResult smith_normal_form(const IntMatrix& m) {
    SnfResult r{IntMatrix::identity(m.rows), m, IntMatrix::identity(m.cols)};
    IntMatrix& d = r.d;
    IntMatrix& u = r.u;
    IntMatrix& v = r.v;
    auto col_submul = [&](int j, int j2, const Int& q) {  // col j -= q * col j2
        if (q == 0) return;
        for (int i = 0; i < d.rows; ++i) d.at(i, j) -= q * d.at(i, j2);
        for (int i = 0; i < v.rows; ++i) v.at(i, j) -= q * v.at(i, j2);
    };
    auto col_swap = [&](int j, int j2) {
        if (j == j2) return;
        for (int i = 0; i < d.rows; ++i) std::swap(d.at(i, j), d.at(i, j2));
        for (int i = 0; i < v.rows; ++i) std::swap(v.at(i, j), v.at(i, j2));
    };
    int t = 0;
    while (t < d.rows && t < d.cols) {
        int pi = -1, pj = -1;
        for (int i = t; i < d.rows && pi < 0; ++i)
            for (int j = t; j < d.cols; ++j)
                if (d.at(i, j) != 0) { pi = i; pj = j; break; }
        if (pi < 0) break;
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        col_swap(t, pj);
        // Reduce the other rows/columns modulo the pivot; a nonzero remainder
        // is swapped into the pivot slot and strictly shrinks |d(t,t)|, so the
        // loop terminates.
        for (;;) {
            bool swapped = false;
            for (int i = t + 1; i < d.rows; ++i) {
                if (d.at(i, t) == 0) continue;
                Int q = floor_div(d.at(i, t), d.at(t, t));
                d.submul_row(i, t, q);
                u.submul_row(i, t, q);
                if (d.at(i, t) != 0) {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    swapped = true;
                }
            }
            if (swapped) continue;
            for (int j = t + 1; j < d.cols; ++j) {
                if (d.at(t, j) == 0) continue;
                Int q = floor_div(d.at(t, j), d.at(t, t));
                col_submul(j, t, q);
                if (d.at(t, j) != 0) {
                    col_swap(t, j);  // dirties column t below; redo the row pass
                    swapped = true;
                }
            }
            if (swapped) continue;
            // both clear: enforce divisibility of the remaining block
            int bad = -1;
            for (int i = t + 1; i < d.rows && bad < 0; ++i)
                for (int j = t + 1; j < d.cols; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) { bad = i; break; }
            if (bad < 0) break;
            d.submul_row(t, bad, Int(-1));  // row t += row bad, then re-reduce
            u.submul_row(t, bad, Int(-1));
        }
        if (d.at(t, t) < 0) {
            d.negate_row(t);
            u.negate_row(t);
        }
        ++t;
    }
    return r;
}

Lattice Lattice::from_rows(const IntMatrix& rows) {
    HnfResult h = hermite_normal_form(rows);
    Lattice l;
    l.ambient = rows.cols;
    l.basis = IntMatrix(h.rank, rows.cols);
    for (int i = 0; i < h.rank; ++i) l.basis.set_row(i, h.h.row(i));
    return l;
}

bool Lattice::contains(const std::vector<Int>& v) const {
    if (static_cast<int>(v.size()) != ambient) fail(Error::Code::dimension, "membership vector size mismatch");
    std::vector<Int> w = reduce(v);
    for (const Int& x : w)
        if (x != 0) return false;
    return true;
}

std::vector<Int> Lattice::reduce(std::vector<Int> v) const {
    if (static_cast<int>(v.size()) != ambient) fail(Error::Code::dimension, "reduce vector size mismatch");
    for (int i = 0; i < basis.rows; ++i) {
        int p = -1;
        for (int j = 0; j < ambient; ++j)
            if (basis.at(i, j) != 0) { p = j; break; }
        Int q = floor_div(v[p], basis.at(i, p));
        if (q != 0)
            for (int j = 0; j < ambient; ++j) v[j] -= q * basis.at(i, j);
    }
    return v;
}

bool lattice_contains(const Lattice& x, const Lattice& y) {
    if (x.ambient != y.ambient) fail(Error::Code::dimension, "lattice ambient mismatch");
    for (int i = 0; i < y.basis.rows; ++i)
        if (!x.contains(y.basis.row(i))) return false;
    return true;
}

Lattice lattice_sum(const Lattice& x, const Lattice& y) {
    if (x.ambient != y.ambient) fail(Error::Code::dimension, "lattice ambient mismatch");
    return Lattice::from_rows(vstack(x.basis, y.basis));
}

Lattice lattice_intersection(const Lattice& x, const Lattice& y) {
    if (x.ambient != y.ambient) fail(Error::Code::dimension, "lattice ambient mismatch");
    // rows (a | b) of the left kernel of [X over Y] give a*X = -b*Y; the
    // intersection is spanned by the a*X parts.
    IntMatrix stacked = vstack(x.basis, y.basis);
    Lattice ker = left_kernel(stacked);
    IntMatrix gens(ker.basis.rows, x.ambient);
    for (int i = 0; i < ker.basis.rows; ++i) {
        std::vector<Int> comb(x.ambient);
        for (int r = 0; r < x.basis.rows; ++r)
            for (int c = 0; c < x.ambient; ++c) comb[c] += ker.basis.at(i, r) * x.basis.at(r, c);
        gens.set_row(i, comb);
    }
    return Lattice::from_rows(gens);
}

Lattice left_kernel(const IntMatrix& m) {
    HnfResult h = hermite_normal_form(m);
    IntMatrix rows(m.rows - h.rank, m.rows);
    for (int i = h.rank; i < m.rows; ++i) rows.set_row(i - h.rank, h.u.row(i));
    Lattice l = Lattice::from_rows(rows);
    return l;
}

Lattice right_kernel(const IntMatrix& m) { return left_kernel(m.transposed()); }

IntMatrix unimodular_inverse(const IntMatrix& m) {
    if (m.rows != m.cols) fail(Error::Code::domain, "unimodular_inverse: matrix not square");
    HnfResult h = hermite_normal_form(m);
    if (!(h.h == IntMatrix::identity(m.rows)))
        fail(Error::Code::domain, "unimodular_inverse: matrix is not unimodular");
    return h.u;
}

std::optional<LinearSolution> solve_linear(const IntMatrix& a, const std::vector<Int>& b) {
    if (static_cast<int>(b.size()) != a.rows) fail(Error::Code::dimension, "solve_linear rhs size mismatch");
    SnfResult s = smith_normal_form(a);
    // a x = b  <=>  d (v^-1 x) = u b; solve for y = v^-1 x, then x = v y.
    std::vector<Int> c = mul(s.u, IntMatrix{a.rows, 1, b}).a;
    std::vector<Int> y(a.cols);
    int t = std::min(a.rows, a.cols);
    for (int i = 0; i < t; ++i) {
        const Int& di = s.d.at(i, i);
        if (di == 0) {
            if (c[i] != 0) return std::nullopt;
        } else {
            if (c[i] % di != 0) return std::nullopt;
            y[i] = c[i] / di;
        }
    }
    for (int i = t; i < a.rows; ++i)
        if (c[i] != 0) return std::nullopt;
    std::vector<Int> x = mul(s.v, IntMatrix{a.cols, 1, y}).a;
    LinearSolution sol;
    sol.kernel = right_kernel(a);
    sol.particular = sol.kernel.reduce(x);
    return sol;
}

std::optional<std::vector<Int>> solve_row(const IntMatrix& m, const std::vector<Int>& b) {
    auto sol = solve_linear(m.transposed(), b);
    if (!sol) return std::nullopt;
    return sol->particular;
}

}  // namespace ppcalc
