#include "formula.hpp"

namespace ppcalc {

PpFormula::PpFormula(int n_, int m_, IntMatrix A_, IntMatrix B_) : n(n_), m(m_) {
    if (n < 0 || m < 0) fail(Error::Code::dimension, "negative arity");
    if (A_.rows != B_.rows) fail(Error::Code::dimension, "A and B must have equal row counts");
    if (A_.cols != n || B_.cols != m) fail(Error::Code::dimension, "formula matrix width mismatch");
    A = IntMatrix(0, n);
    B = IntMatrix(0, m);
    for (int r = 0; r < A_.rows; ++r) {
        Int lead = 0;
        for (int j = 0; j < n && lead == 0; ++j) lead = A_.at(r, j);
        for (int j = 0; j < m && lead == 0; ++j) lead = B_.at(r, j);
        if (lead == 0) continue;  // trivial equation
        std::vector<Int> ra = A_.row(r), rb = B_.row(r);
        if (lead < 0) {
            for (Int& x : ra) x = -x;
            for (Int& x : rb) x = -x;
        }
        A = vstack(A, IntMatrix(1, n, ra));
        B = vstack(B, IntMatrix(1, m, rb));
    }
}

PpFormula top_formula(int n) { return PpFormula(n, 0, IntMatrix(0, n), IntMatrix(0, 0)); }

PpFormula bottom_formula(int n) {
    return PpFormula(n, 0, IntMatrix::identity(n), IntMatrix(n, 0));
}

PpFormula qf_from_lattice(const Lattice& l) {
    return PpFormula(l.ambient, 0, l.basis, IntMatrix(l.basis.rows, 0));
}

PpFormula meet(const PpFormula& f, const PpFormula& g) {
    if (f.n != g.n) fail(Error::Code::dimension, "meet needs equal free arity");
    IntMatrix A = vstack(f.A, g.A);
    IntMatrix B(f.equations() + g.equations(), f.m + g.m);
    for (int r = 0; r < f.equations(); ++r)
        for (int j = 0; j < f.m; ++j) B.at(r, j) = f.B.at(r, j);
    for (int r = 0; r < g.equations(); ++r)
        for (int j = 0; j < g.m; ++j) B.at(f.equations() + r, f.m + j) = g.B.at(r, j);
    return PpFormula(f.n, f.m + g.m, A, B);
}

PpFormula join(const PpFormula& f, const PpFormula& g) {
    if (f.n != g.n) fail(Error::Code::dimension, "join needs equal free arity");
    int n = f.n;
    // witnesses: x' (n), x'' (n), then the bound variables of f and of g;
    // equations: x = x' + x'', A_f x' = B_f y_f, A_g x'' = B_g y_g.
    int mm = 2 * n + f.m + g.m;
    int e = n + f.equations() + g.equations();
    IntMatrix A(e, n), B(e, mm);
    for (int i = 0; i < n; ++i) {
        A.at(i, i) = 1;
        B.at(i, i) = 1;
        B.at(i, n + i) = 1;
    }
    for (int r = 0; r < f.equations(); ++r) {
        for (int j = 0; j < n; ++j) B.at(n + r, j) = -f.A.at(r, j);
        for (int j = 0; j < f.m; ++j) B.at(n + r, 2 * n + j) = f.B.at(r, j);
    }
    for (int r = 0; r < g.equations(); ++r) {
        for (int j = 0; j < n; ++j) B.at(n + f.equations() + r, n + j) = -g.A.at(r, j);
        for (int j = 0; j < g.m; ++j) B.at(n + f.equations() + r, 2 * n + f.m + j) = g.B.at(r, j);
    }
    return PpFormula(n, mm, A, B);
}

PpFormula dualize(const PpFormula& f) {
    int e = f.equations();
    IntMatrix A(f.n + f.m, f.n), B(f.n + f.m, e);
    for (int i = 0; i < f.n; ++i) A.at(i, i) = 1;
    for (int i = 0; i < f.n; ++i)
        for (int r = 0; r < e; ++r) B.at(i, r) = f.A.at(r, i);
    for (int j = 0; j < f.m; ++j)
        for (int r = 0; r < e; ++r) B.at(f.n + j, r) = f.B.at(r, j);
    return PpFormula(f.n, e, A, B);
}

PpFormula substitute(const PpFormula& f, const IntMatrix& c) {
    if (c.cols != f.n) fail(Error::Code::dimension, "substitution matrix needs f.n columns");
    int p = c.rows;
    int e = p + f.equations();
    IntMatrix A(e, p), B(e, f.n + f.m);
    for (int i = 0; i < p; ++i) {
        A.at(i, i) = 1;
        for (int j = 0; j < f.n; ++j) B.at(i, j) = c.at(i, j);
    }
    for (int r = 0; r < f.equations(); ++r) {
        for (int j = 0; j < f.n; ++j) B.at(p + r, j) = -f.A.at(r, j);
        for (int j = 0; j < f.m; ++j) B.at(p + r, f.n + j) = f.B.at(r, j);
    }
    return PpFormula(p, f.n + f.m, A, B);
}

PpFormula exists_project(const PpFormula& f, int keep) {
    if (keep < 0 || keep > f.n) fail(Error::Code::dimension, "projection arity out of range");
    int drop = f.n - keep;
    IntMatrix A(f.equations(), keep), B(f.equations(), drop + f.m);
    for (int r = 0; r < f.equations(); ++r) {
        for (int j = 0; j < keep; ++j) A.at(r, j) = f.A.at(r, j);
        for (int j = 0; j < drop; ++j) B.at(r, j) = -f.A.at(r, keep + j);
        for (int j = 0; j < f.m; ++j) B.at(r, drop + j) = f.B.at(r, j);
    }
    return PpFormula(keep, drop + f.m, A, B);
}

PpFormula pad_free(const PpFormula& f, int new_n) {
    if (new_n < f.n) fail(Error::Code::dimension, "pad_free cannot shrink arity");
    IntMatrix A(f.equations(), new_n);
    for (int r = 0; r < f.equations(); ++r)
        for (int j = 0; j < f.n; ++j) A.at(r, j) = f.A.at(r, j);
    return PpFormula(new_n, f.m, A, f.B);
}

bool PpSubgroup::contains_tuple(const IntMatrix& tuple) const {
    if (tuple.rows != arity || tuple.cols != module.gens)
        fail(Error::Code::dimension, "tuple shape does not match subgroup");
    return lattice.contains(tuple.a);
}

PpSubgroup evaluate(const PpFormula& f, const FpModule& M) {
    int k = M.gens, n = f.n, m = f.m, e = f.equations(), r = M.rel.basis.rows;
    // Exact system over Z in unknowns (X: n*k, Y: m*k, L: e*r):
    //   per equation, per generator coordinate:
    //   sum_t A[eq][t] X[t][c] - sum_s B[eq][s] Y[s][c] - sum_l L[eq][l] Rel[l][c] = 0.
    // Solutions projected to X form the subgroup's lattice.
    int unknowns = n * k + m * k + e * r;
    IntMatrix sys(unknowns, e * k);  // transposed: one column per constraint
    for (int eq = 0; eq < e; ++eq)
        for (int c = 0; c < k; ++c) {
            int col = eq * k + c;
            for (int t = 0; t < n; ++t) sys.at(t * k + c, col) = f.A.at(eq, t);
            for (int s = 0; s < m; ++s) sys.at(n * k + s * k + c, col) = -f.B.at(eq, s);
            for (int l = 0; l < r; ++l) sys.at(n * k + m * k + eq * r + l, col) = -M.rel.basis.at(l, c);
        }
    PpSubgroup out;
    out.arity = n;
    out.module = M;
    IntMatrix gens(0, n * k);
    if (e == 0) {
        gens = IntMatrix::identity(n * k);
    } else {
        Lattice ker = left_kernel(sys);
        IntMatrix proj(ker.basis.rows, n * k);
        for (int i = 0; i < ker.basis.rows; ++i)
            for (int j = 0; j < n * k; ++j) proj.at(i, j) = ker.basis.at(i, j);
        gens = proj;
    }
    // the subgroup is a union of cosets of the relation lattice in each slot
    for (int t = 0; t < n; ++t)
        for (int l = 0; l < r; ++l) {
            IntMatrix row(1, n * k);
            for (int c = 0; c < k; ++c) row.at(0, t * k + c) = M.rel.basis.at(l, c);
            gens = vstack(gens, row);
        }
    out.lattice = Lattice::from_rows(gens);
    return out;
}

FreeRealization free_realization(const PpFormula& f) {
    IntMatrix rel(f.equations(), f.n + f.m);
    for (int r = 0; r < f.equations(); ++r) {
        for (int j = 0; j < f.n; ++j) rel.at(r, j) = f.A.at(r, j);
        for (int j = 0; j < f.m; ++j) rel.at(r, f.n + j) = -f.B.at(r, j);
    }
    FreeRealization fr;
    fr.module = present_module(f.n + f.m, rel);
    IntMatrix basis = IntMatrix::identity(f.n + f.m);
    fr.tuple = IntMatrix(f.n, f.n + f.m);
    fr.witness = IntMatrix(f.m, f.n + f.m);
    for (int i = 0; i < f.n; ++i) fr.tuple.set_row(i, fr.module.reduce(basis.row(i)));
    for (int i = 0; i < f.m; ++i) fr.witness.set_row(i, fr.module.reduce(basis.row(f.n + i)));
    return fr;
}

PpFormula pp_type_generator(const FpModule& m, const IntMatrix& tuple) {
    if (tuple.cols != m.gens) fail(Error::Code::dimension, "tuple rows must live in the module");
    int n = tuple.rows, k = m.gens, r = m.rel.basis.rows;
    IntMatrix A(n + r, n), B(n + r, k);
    for (int i = 0; i < n; ++i) {
        A.at(i, i) = 1;
        for (int j = 0; j < k; ++j) B.at(i, j) = tuple.at(i, j);
    }
    for (int l = 0; l < r; ++l)
        for (int j = 0; j < k; ++j) B.at(n + l, j) = m.rel.basis.at(l, j);
    return PpFormula(n, k, A, B);
}

PpFormula qf_annihilator_formula(const FpModule& m, const IntMatrix& tuple) {
    return qf_from_lattice(annihilator_lattice(m, tuple));
}

std::optional<IntMatrix> formula_witness(const PpFormula& f, const FpModule& M,
                                         const IntMatrix& tuple) {
    if (tuple.rows != f.n || tuple.cols != M.gens)
        fail(Error::Code::dimension, "witness tuple has the wrong shape");
    int k = M.gens, m = f.m, e = f.equations(), r = M.rel.basis.rows;
    // Unknowns (Y: m*k, L: e*r), one equation per (eq, coordinate):
    //   sum_s B[eq][s] Y[s][c] + sum_l L[eq][l] Rel[l][c] = (A tuple)[eq][c].
    IntMatrix sys(e * k, m * k + e * r);
    std::vector<Int> rhs(e * k);
    for (int eq = 0; eq < e; ++eq)
        for (int c = 0; c < k; ++c) {
            int row = eq * k + c;
            for (int s = 0; s < m; ++s) sys.at(row, s * k + c) = f.B.at(eq, s);
            for (int l = 0; l < r; ++l) sys.at(row, m * k + eq * r + l) = M.rel.basis.at(l, c);
            Int v = 0;
            for (int t = 0; t < f.n; ++t) v += f.A.at(eq, t) * tuple.at(t, c);
            rhs[row] = v;
        }
    auto sol = solve_linear(sys, rhs);
    if (!sol) return std::nullopt;
    IntMatrix w(m, k);
    for (int s = 0; s < m; ++s)
        for (int c = 0; c < k; ++c) w.at(s, c) = sol->particular[s * k + c];
    return w;
}

FpHom realization_hom(const PpFormula& f, const FpModule& M, const IntMatrix& tuple) {
    auto w = formula_witness(f, M, tuple);
    if (!w) fail(Error::Code::domain, "tuple does not satisfy the formula in the module");
    return check_hom(free_realization(f).module, M, vstack(tuple, *w));
}

}  // namespace ppcalc
