#pragma once

#include "fpmodule.hpp"

namespace ppcalc {

// Positive primitive formula  E y1..ym . A*x = B*y  over the integers, with
// n free variables, m bound variables and one equation per matrix row.
// Construction normalizes: all-zero equation rows are dropped and each row is
// sign-flipped so its first nonzero entry (scanning A then B) is positive.
// Two formulas built from row-equivalent data therefore compare equal iff
// their equation systems are literally identical; semantic comparison is
// implies/equivalent in the implication engine.
struct PpFormula {
    int n = 0;
    int m = 0;
    IntMatrix A;  // e x n
    IntMatrix B;  // e x m

    PpFormula() = default;
    PpFormula(int n_, int m_, IntMatrix A_, IntMatrix B_);

    int equations() const { return A.rows; }
    bool quantifier_free() const { return m == 0; }
    bool operator==(const PpFormula&) const = default;
};

// x1 = x1 (no constraints) and x = 0, the lattice's top and bottom.
PpFormula top_formula(int n);
PpFormula bottom_formula(int n);
// one equation per basis row c: sum_i c_i x_i = 0
PpFormula qf_from_lattice(const Lattice& l);

PpFormula meet(const PpFormula& f, const PpFormula& g);
PpFormula join(const PpFormula& f, const PpFormula& g);

// Elementary dual: for phi = E y (A x = B y),
//   D phi (x) = E z ( x = A^T z  &  B^T z = 0 )   with one z per equation.
PpFormula dualize(const PpFormula& f);

// Image under an integer linear map: for c with p rows and f.n columns,
//   (substitute(f, c))(w) = E x y ( w = c x  &  A x = B y ).
PpFormula substitute(const PpFormula& f, const IntMatrix& c);

// Quantify away the free variables after the first `keep`.
PpFormula exists_project(const PpFormula& f, int keep);
// Reinterpret in a larger free context (new trailing variables unused).
PpFormula pad_free(const PpFormula& f, int new_n);

// phi(M^n): a subgroup of M^n, stored as the lattice of flattened coordinate
// rows (tuple row t occupies entries [t*gens, (t+1)*gens)). Always contains
// the per-coordinate relation rows, so membership is representative-free.
struct PpSubgroup {
    int arity = 0;
    FpModule module;
    Lattice lattice;

    bool contains_tuple(const IntMatrix& tuple) const;
};
PpSubgroup evaluate(const PpFormula& f, const FpModule& M);

// Z^{n+m} modulo the rows of [A | -B]; the images of the first n basis
// vectors freely realize the formula, the remaining m are the witnesses.
struct FreeRealization {
    FpModule module;
    IntMatrix tuple;    // n x (n+m)
    IntMatrix witness;  // m x (n+m)
};
FreeRealization free_realization(const PpFormula& f);

// Canonical generator of the pp type of the tuple in m:
//   phi(x) = E y1..yk ( x_i = tuple_i . y  &  Rel . y = 0 ).
PpFormula pp_type_generator(const FpModule& m, const IntMatrix& tuple);
// Quantifier-free part of the type: the annihilator-lattice equations.
PpFormula qf_annihilator_formula(const FpModule& m, const IntMatrix& tuple);

// Canonical bound-variable witness for tuple in f(M): the lexicographically
// least (HNF-reduced) y with A.tuple = B.y modulo the relations, as m rows.
// Empty optional iff the tuple is not in the subgroup.
std::optional<IntMatrix> formula_witness(const PpFormula& f, const FpModule& M,
                                         const IntMatrix& tuple);

// The map free_realization(f).module -> M sending the canonical tuple to
// `tuple` and the canonical witnesses to the computed witness. Throws a
// domain error if the tuple does not satisfy f in M.
FpHom realization_hom(const PpFormula& f, const FpModule& M, const IntMatrix& tuple);

// Formula DSL: [E y1 .. ym .] eq & eq & ...; an equation is lin = lin with
// integer coefficients, or the sugar  r|xi  for "r divides xi".
PpFormula parse_formula(const std::string& text);
std::string format_formula(const PpFormula& f);

}  // namespace ppcalc
