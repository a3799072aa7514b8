#pragma once

#include "matrix.hpp"

namespace ppcalc {

// Finitely presented abelian group: Z^gens modulo the row span of the
// relation matrix. Elements are coordinate rows; the stored relation lattice
// is canonical (HNF), so equal presentations compare equal structurally.
struct FpModule {
    int gens = 0;
    Lattice rel;  // ambient == gens

    bool operator==(const FpModule&) const = default;

    std::vector<Int> reduce(std::vector<Int> v) const { return rel.reduce(std::move(v)); }
    bool is_zero_element(const std::vector<Int>& v) const { return rel.contains(v); }
};

FpModule present_module(int gens, const IntMatrix& relations);

// Torsion invariant factors (each > 1, ascending divisibility) followed by
// one 0 per free rank; [] is the zero module, [0] is Z.
std::vector<Int> invariant_factors(const FpModule& m);
bool is_torsion(const FpModule& m);
// exponent of the torsion part (largest invariant factor; 1 for free/zero)
Int torsion_exponent(const FpModule& m);
// least n > 0 with n*v = 0, or 0 if v has infinite order
Int element_order(const FpModule& m, const std::vector<Int>& v);
bool is_finite(const FpModule& m);
// number of elements of a finite module
Int element_count(const FpModule& m);
// all elements of a finite module as canonical rows, lexicographically sorted
std::vector<std::vector<Int>> enumerate_elements(const FpModule& m);

// Homomorphism determined by images of the source generators: element row v
// maps to v * matrix (a row over the target's generators).
struct FpHom {
    FpModule source;
    FpModule target;
    IntMatrix matrix;  // source.gens x target.gens

    std::vector<Int> apply(const std::vector<Int>& v) const;
    IntMatrix apply_rows(const IntMatrix& rows) const;
    bool operator==(const FpHom&) const = default;
};

// Validates that the matrix sends every source relator into the target's
// relation lattice; reports the first offending relator index otherwise.
FpHom check_hom(const FpModule& source, const FpModule& target, const IntMatrix& matrix);
FpHom identity_hom(const FpModule& m);
FpHom compose(const FpHom& first, const FpHom& then);
bool is_surjective(const FpHom& h);
bool is_injective(const FpHom& h);

struct DirectSum {
    FpModule module;
    FpHom into_left, into_right;   // injections
    FpHom onto_left, onto_right;   // projections
};
DirectSum direct_sum(const FpModule& a, const FpModule& b);

// Quotient by extra relator rows, with the canonical projection.
struct Quotient {
    FpModule module;
    FpHom projection;
};
Quotient quotient_by(const FpModule& m, const IntMatrix& extra_relators);

// { c in Z^n : sum_i c_i * tuple_i = 0 in m } for a tuple given as n rows.
Lattice annihilator_lattice(const FpModule& m, const IntMatrix& tuple);

// Presentation of the submodule generated by the tuple rows: one generator
// per row, relations = annihilator lattice, inclusion = the rows themselves.
struct SubmodulePresentation {
    FpModule module;
    FpHom inclusion;
};
SubmodulePresentation submodule_presentation(const FpModule& m, const IntMatrix& tuple);

// a (x) b with generators e_{ij} flattened as i * b.gens + j.
struct TensorProduct {
    FpModule module;
    int left_gens = 0, right_gens = 0;

    // (sum_i v_i e_i) (x) (sum_j w_j f_j)
    std::vector<Int> pure_tensor(const std::vector<Int>& v, const std::vector<Int>& w) const;
    // sum_t v_t (x) w_t over paired tuple rows
    std::vector<Int> pair_tuples(const IntMatrix& vs, const IntMatrix& ws) const;
};
TensorProduct tensor_product(const FpModule& a, const FpModule& b);

// Canonicalize tuple rows (reduce each modulo the relation lattice).
IntMatrix reduce_tuple(const FpModule& m, IntMatrix tuple);

}  // namespace ppcalc
