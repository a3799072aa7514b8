#include "fpmodule.hpp"

#include <algorithm>

namespace ppcalc {

namespace {

// { c : c * m  in  target } as a lattice over the row index space of m.
Lattice lattice_preimage(const IntMatrix& m, const Lattice& target) {
    if (m.cols != target.ambient) fail(Error::Code::dimension, "preimage ambient mismatch");
    IntMatrix stacked = vstack(m, target.basis);
    Lattice ker = left_kernel(stacked);
    IntMatrix proj(ker.basis.rows, m.rows);
    for (int i = 0; i < ker.basis.rows; ++i)
        for (int j = 0; j < m.rows; ++j) proj.at(i, j) = ker.basis.at(i, j);
    return Lattice::from_rows(proj);
}

}  // namespace

FpModule present_module(int gens, const IntMatrix& relations) {
    if (relations.cols != gens)
        fail(Error::Code::dimension, "relation rows must have one entry per generator");
    return FpModule{gens, Lattice::from_rows(relations)};
}

std::vector<Int> invariant_factors(const FpModule& m) {
    SnfResult s = smith_normal_form(m.rel.basis);
    std::vector<Int> out;
    for (const Int& d : s.diagonal())
        if (d > 1) out.push_back(d);
    int free_rank = m.gens - m.rel.rank();
    for (int i = 0; i < free_rank; ++i) out.push_back(0);
    return out;
}

bool is_torsion(const FpModule& m) { return m.rel.rank() == m.gens; }

Int torsion_exponent(const FpModule& m) {
    Int e = 1;
    for (const Int& d : invariant_factors(m))
        if (d > e) e = d;
    return e;
}

Int element_order(const FpModule& m, const std::vector<Int>& v) {
    IntMatrix one_row(1, m.gens, std::vector<Int>(v));
    Lattice ann = annihilator_lattice(m, one_row);
    if (ann.rank() == 0) return 0;
    return ann.basis.at(0, 0);
}

bool is_finite(const FpModule& m) { return is_torsion(m); }

Int element_count(const FpModule& m) {
    if (!is_finite(m)) fail(Error::Code::domain, "module is infinite");
    Int n = 1;
    for (const Int& d : smith_normal_form(m.rel.basis).diagonal()) n *= d;
    return n;
}

std::vector<std::vector<Int>> enumerate_elements(const FpModule& m) {
    Int count = element_count(m);
    if (count > 100000) fail(Error::Code::budget, "module too large to enumerate");
    // In SNF coordinates w = z * v the relation lattice is diagonal, so the
    // residue tuples enumerate the module once; map back via v^-1.
    SnfResult s = smith_normal_form(m.rel.basis);
    IntMatrix vinv = unimodular_inverse(s.v);
    std::vector<Int> diag = s.diagonal();
    std::vector<std::vector<Int>> out;
    std::vector<Int> w(m.gens, Int(0));
    for (;;) {
        out.push_back(m.reduce(mul_row(w, vinv)));
        int i = 0;
        while (i < m.gens) {
            ++w[i];
            if (w[i] < diag[i]) break;
            w[i] = 0;
            ++i;
        }
        if (i == m.gens) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Int> FpHom::apply(const std::vector<Int>& v) const {
    return target.reduce(mul_row(v, matrix));
}

IntMatrix FpHom::apply_rows(const IntMatrix& rows) const {
    IntMatrix out(rows.rows, target.gens);
    for (int i = 0; i < rows.rows; ++i) out.set_row(i, apply(rows.row(i)));
    return out;
}

FpHom check_hom(const FpModule& source, const FpModule& target, const IntMatrix& matrix) {
    if (matrix.rows != source.gens || matrix.cols != target.gens)
        fail(Error::Code::dimension, "hom matrix must be source.gens x target.gens");
    for (int i = 0; i < source.rel.basis.rows; ++i) {
        if (!target.rel.contains(mul_row(source.rel.basis.row(i), matrix)))
            fail(Error::Code::domain,
                 "matrix does not preserve relations (relator " + std::to_string(i) + ")");
    }
    return FpHom{source, target, matrix};
}

FpHom identity_hom(const FpModule& m) { return FpHom{m, m, IntMatrix::identity(m.gens)}; }

FpHom compose(const FpHom& first, const FpHom& then) {
    if (!(first.target == then.source)) fail(Error::Code::domain, "compose: middle modules differ");
    return FpHom{first.source, then.target, mul(first.matrix, then.matrix)};
}

bool is_surjective(const FpHom& h) {
    Lattice image = lattice_sum(Lattice::from_rows(h.matrix), h.target.rel);
    return image == Lattice::full(h.target.gens);
}

bool is_injective(const FpHom& h) {
    Lattice kernel = lattice_preimage(h.matrix, h.target.rel);
    return lattice_contains(h.source.rel, kernel);
}

DirectSum direct_sum(const FpModule& a, const FpModule& b) {
    int ka = a.gens, kb = b.gens;
    IntMatrix rel(a.rel.basis.rows + b.rel.basis.rows, ka + kb);
    for (int i = 0; i < a.rel.basis.rows; ++i)
        for (int j = 0; j < ka; ++j) rel.at(i, j) = a.rel.basis.at(i, j);
    for (int i = 0; i < b.rel.basis.rows; ++i)
        for (int j = 0; j < kb; ++j) rel.at(a.rel.basis.rows + i, ka + j) = b.rel.basis.at(i, j);
    FpModule sum = present_module(ka + kb, rel);
    IntMatrix inl(ka, ka + kb), inr(kb, ka + kb), prl(ka + kb, ka), prr(ka + kb, kb);
    for (int i = 0; i < ka; ++i) inl.at(i, i) = 1;
    for (int i = 0; i < kb; ++i) inr.at(i, ka + i) = 1;
    for (int i = 0; i < ka; ++i) prl.at(i, i) = 1;
    for (int i = 0; i < kb; ++i) prr.at(ka + i, i) = 1;
    return DirectSum{sum, check_hom(a, sum, inl), check_hom(b, sum, inr),
                     check_hom(sum, a, prl), check_hom(sum, b, prr)};
}

Quotient quotient_by(const FpModule& m, const IntMatrix& extra_relators) {
    if (extra_relators.cols != m.gens)
        fail(Error::Code::dimension, "extra relators must have one entry per generator");
    FpModule q = present_module(m.gens, vstack(m.rel.basis, extra_relators));
    return Quotient{q, check_hom(m, q, IntMatrix::identity(m.gens))};
}

Lattice annihilator_lattice(const FpModule& m, const IntMatrix& tuple) {
    if (tuple.cols != m.gens) fail(Error::Code::dimension, "tuple rows must live in the module");
    return lattice_preimage(tuple, m.rel);
}

SubmodulePresentation submodule_presentation(const FpModule& m, const IntMatrix& tuple) {
    Lattice ann = annihilator_lattice(m, tuple);
    FpModule sub{tuple.rows, ann};
    return SubmodulePresentation{sub, check_hom(sub, m, tuple)};
}

std::vector<Int> TensorProduct::pure_tensor(const std::vector<Int>& v,
                                            const std::vector<Int>& w) const {
    if (static_cast<int>(v.size()) != left_gens || static_cast<int>(w.size()) != right_gens)
        fail(Error::Code::dimension, "pure tensor operand size mismatch");
    std::vector<Int> out(static_cast<size_t>(left_gens) * right_gens);
    for (int i = 0; i < left_gens; ++i)
        for (int j = 0; j < right_gens; ++j) out[static_cast<size_t>(i) * right_gens + j] = v[i] * w[j];
    return module.reduce(out);
}

std::vector<Int> TensorProduct::pair_tuples(const IntMatrix& vs, const IntMatrix& ws) const {
    if (vs.rows != ws.rows) fail(Error::Code::dimension, "paired tuples must have equal arity");
    std::vector<Int> acc(static_cast<size_t>(left_gens) * right_gens);
    for (int t = 0; t < vs.rows; ++t) {
        std::vector<Int> term = pure_tensor(vs.row(t), ws.row(t));
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
    }
    return module.reduce(acc);
}

TensorProduct tensor_product(const FpModule& a, const FpModule& b) {
    int ka = a.gens, kb = b.gens;
    int ra = a.rel.basis.rows, rb = b.rel.basis.rows;
    IntMatrix rel(ra * kb + ka * rb, ka * kb);
    int row = 0;
    for (int r = 0; r < ra; ++r)
        for (int j = 0; j < kb; ++j, ++row)
            for (int i = 0; i < ka; ++i) rel.at(row, i * kb + j) = a.rel.basis.at(r, i);
    for (int r = 0; r < rb; ++r)
        for (int i = 0; i < ka; ++i, ++row)
            for (int j = 0; j < kb; ++j) rel.at(row, i * kb + j) = b.rel.basis.at(r, j);
    TensorProduct t;
    t.module = present_module(ka * kb, rel);
    t.left_gens = ka;
    t.right_gens = kb;
    return t;
}

IntMatrix reduce_tuple(const FpModule& m, IntMatrix tuple) {
    if (tuple.cols != m.gens) fail(Error::Code::dimension, "tuple rows must live in the module");
    for (int i = 0; i < tuple.rows; ++i) tuple.set_row(i, m.reduce(tuple.row(i)));
    return tuple;
}

}  // namespace ppcalc
