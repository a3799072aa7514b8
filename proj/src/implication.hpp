#pragma once

#include "formula.hpp"

namespace ppcalc {

// The class of modules an implication is tested against.
//   absolute:  all modules; decided on the free realization of the premise.
//   flat:      torsion-free modules; decided by evaluation over the integers.
//   abs_pure:  divisible (absolutely pure) modules; decided by duality, as the
//              flat implication between the duals in reverse order.
//   explicit_list: a finite list of modules, checked by direct evaluation.
struct TestClass {
    enum class Kind { absolute, flat, abs_pure, explicit_list } kind = Kind::absolute;
    std::vector<FpModule> members;  // explicit_list only

    static TestClass absolute() { return {Kind::absolute, {}}; }
    static TestClass flat() { return {Kind::flat, {}}; }
    static TestClass abs_pure() { return {Kind::abs_pure, {}}; }
    static TestClass explicit_list(std::vector<FpModule> mods) {
        return {Kind::explicit_list, std::move(mods)};
    }
};

// Verdict plus a machine-checkable reason. For a failed implication the
// witness pins down a module and a tuple satisfying the premise but not the
// conclusion; for duals the delegate records the reversed flat question.
struct ImplicationResult {
    bool holds = false;
    enum class Witness {
        none,                          // holds
        free_realization_counterexample,
        regular_module_counterexample,  // the integers as a module over themselves
        dual_delegate,                  // see delegate_premise/delegate_conclusion
        member_counterexample,
    } witness = Witness::none;
    FpModule module;       // counterexample module, when applicable
    IntMatrix tuple;       // tuple satisfying premise, not conclusion
    int member_index = -1; // position in the explicit list
};

ImplicationResult implies(const PpFormula& premise, const PpFormula& conclusion,
                          const TestClass& cls);
bool equivalent(const PpFormula& f, const PpFormula& g, const TestClass& cls);

// Whether the inclusion of the submodule generated by the rows of `gens` is
// pure relative to the class: every pp formula with parameters in the
// submodule solvable in the big module must already be solvable inside.
// Decided as one implication between the submodule's and the ambient
// module's type generators of the generating tuple.
bool is_pure(const FpModule& m, const IntMatrix& gens, const TestClass& cls);

}  // namespace ppcalc
