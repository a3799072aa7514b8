#include "implication.hpp"

namespace ppcalc {

namespace {

FpModule regular_module() { return present_module(1, IntMatrix(0, 1)); }

// First basis row of the premise subgroup missing from the conclusion
// subgroup, reshaped to a reduced tuple. Both lattices contain the
// per-coordinate relation rows, so reducing keeps the row a counterexample.
IntMatrix offending_tuple(const PpSubgroup& premise, const PpSubgroup& conclusion, bool& found) {
    found = false;
    int k = premise.module.gens;
    for (int r = 0; r < premise.lattice.basis.rows; ++r) {
        std::vector<Int> row = premise.lattice.basis.row(r);
        if (conclusion.lattice.contains(row)) continue;
        IntMatrix tuple(premise.arity, k);
        for (int t = 0; t < premise.arity; ++t) {
            std::vector<Int> coords(row.begin() + t * k, row.begin() + (t + 1) * k);
            tuple.set_row(t, premise.module.reduce(coords));
        }
        found = true;
        return tuple;
    }
    return IntMatrix(premise.arity, k);
}

ImplicationResult implies_absolute(const PpFormula& premise, const PpFormula& conclusion) {
    ImplicationResult res;
    FreeRealization fr = free_realization(premise);
    PpSubgroup target = evaluate(conclusion, fr.module);
    if (target.contains_tuple(fr.tuple)) {
        res.holds = true;
        return res;
    }
    res.witness = ImplicationResult::Witness::free_realization_counterexample;
    res.module = fr.module;
    res.tuple = fr.tuple;
    return res;
}

ImplicationResult implies_flat(const PpFormula& premise, const PpFormula& conclusion) {
    ImplicationResult res;
    FpModule z = regular_module();
    PpSubgroup sp = evaluate(premise, z);
    PpSubgroup sq = evaluate(conclusion, z);
    bool found = false;
    IntMatrix bad = offending_tuple(sp, sq, found);
    if (!found) {
        res.holds = true;
        return res;
    }
    res.witness = ImplicationResult::Witness::regular_module_counterexample;
    res.module = z;
    res.tuple = bad;
    return res;
}

}  // namespace

ImplicationResult implies(const PpFormula& premise, const PpFormula& conclusion,
                          const TestClass& cls) {
    if (premise.n != conclusion.n)
        fail(Error::Code::dimension, "implication needs equal free arity");
    switch (cls.kind) {
        case TestClass::Kind::absolute:
            return implies_absolute(premise, conclusion);
        case TestClass::Kind::flat:
            return implies_flat(premise, conclusion);
        case TestClass::Kind::abs_pure: {
            // over divisible modules the question dualizes to a reversed
            // implication over torsion-free ones
            ImplicationResult inner = implies_flat(dualize(conclusion), dualize(premise));
            if (inner.holds) return inner;
            ImplicationResult res;
            res.witness = ImplicationResult::Witness::dual_delegate;
            res.module = inner.module;
            res.tuple = inner.tuple;
            return res;
        }
        case TestClass::Kind::explicit_list: {
            ImplicationResult res;
            for (size_t i = 0; i < cls.members.size(); ++i) {
                PpSubgroup sp = evaluate(premise, cls.members[i]);
                PpSubgroup sq = evaluate(conclusion, cls.members[i]);
                bool found = false;
                IntMatrix bad = offending_tuple(sp, sq, found);
                if (!found) continue;
                res.witness = ImplicationResult::Witness::member_counterexample;
                res.module = cls.members[i];
                res.tuple = bad;
                res.member_index = static_cast<int>(i);
                return res;
            }
            res.holds = true;
            return res;
        }
    }
    fail(Error::Code::argument, "unknown test class");
}

bool equivalent(const PpFormula& f, const PpFormula& g, const TestClass& cls) {
    return implies(f, g, cls).holds && implies(g, f, cls).holds;
}

bool is_pure(const FpModule& m, const IntMatrix& gens, const TestClass& cls) {
    SubmodulePresentation sp = submodule_presentation(m, gens);
    PpFormula inside = qf_from_lattice(sp.module.rel);
    PpFormula outside = pp_type_generator(m, gens);
    return implies(inside, outside, cls).holds;
}

}  // namespace ppcalc
