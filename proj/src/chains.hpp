#pragma once

#include "implication.hpp"

#include <deque>
#include <memory>
#include <mutex>

namespace ppcalc {

// A descending chain of quantifier-free formulas over growing variable
// prefixes. blocks[0..N] are the block sizes; S(i) = blocks[0]+...+blocks[i];
// alphas[i] is quantifier-free with arity S(i+1) (so alphas.size() == N) and
// phi(i) = exists_project(alphas[i], S(i)) is the induced formula on the
// first i+1 blocks.
struct LChain {
    std::vector<int> blocks;
    std::vector<PpFormula> alphas;
    // class tags ("absolute", "flat", "abspure") this chain has been verified
    // for; informational, callers may always re-run verify_l_chain.
    std::vector<std::string> verified_for;

    int prefix_arity(int i) const;  // S(i)
    PpFormula phi(int i) const;
    bool operator==(const LChain&) const = default;
};

// "" for explicit lists (those are not stampable on a chain).
std::string class_tag(const TestClass& cls);

struct ChainVerifyReport {
    bool ok = false;
    // descending[i-1]: alphas[i] absolutely implies alphas[i-1] padded to
    // arity S(i+1), for i = 1..N-1.
    std::vector<bool> descending;
    // linked[i]: exists_project(alphas[i+1], S(i)) is cls-equivalent to
    // phi(i), for i = 0..N-2.
    std::vector<bool> linked;
    int first_failure = -1;          // chain index of the first failed check
    std::string failure_kind;        // "descending" or "linked"
};
ChainVerifyReport verify_l_chain(const LChain& chain, const TestClass& cls);

// blocks [1, 0, 1, ..., 1]; alphas[i] over i+1 variables:
//   p*x1 = 0  &  x1 = p*x2  &  ...  &  x_i = p*x_{i+1},
// so free_realization(alphas[i]).module is cyclic of order p^{i+1}.
LChain prufer_chain(const Int& p, int budget);

// blocks [1, 0, 1, ..., 1]; alphas[i] over i+1 variables:
//   orders[0]*x1 = 0  &  ...  &  orders[i]*x_{i+1} = 0,
// so free_realization(alphas[i]).module is the direct sum of the cyclic
// modules of the first i+1 orders.
LChain cyclic_sum_chain(const std::vector<Int>& orders);

// A directed system of modules stage(0) -> stage(1) -> ... -> stage(budget)
// with verified connecting maps. Stages are computed on demand; the cache is
// shared across copies and guarded, so concurrent readers see a consistent
// prefix.
struct OmegaLimit {
    enum class Family { explicit_stages, prufer, cyclic_sum, from_chain };
    Family family = Family::explicit_stages;
    Int p;
    std::vector<Int> orders;
    LChain chain;
    int budget = 0;

    const FpModule& stage(int i) const;
    const FpHom& connecting(int i) const;  // stage(i) -> stage(i+1)
    int cached_stages() const;             // stages computed so far
    // image of a tuple of stage `from` rows under the composite map into
    // stage `to`
    IntMatrix push_tuple(int from, int to, IntMatrix rows) const;

  private:
    // deques: growth must not invalidate references handed to callers
    struct Cache {
        std::mutex mu;
        std::deque<FpModule> stages;
        std::deque<FpHom> maps;
    };
    std::shared_ptr<Cache> cache = std::make_shared<Cache>();
    void fill_to(int i) const;
    FpModule make_stage(int i) const;
    IntMatrix make_map(int i) const;

    friend OmegaLimit prufer_limit(const Int& p, int budget);
    friend OmegaLimit cyclic_sum_limit(const std::vector<Int>& orders);
    friend OmegaLimit explicit_limit(std::vector<FpModule> stages,
                                     std::vector<IntMatrix> maps);
    friend OmegaLimit build_m_phi(const LChain& chain, const TestClass& cls, int budget);
};

OmegaLimit prufer_limit(const Int& p, int budget);       // stage(k) = Z/p^k, maps *p
OmegaLimit cyclic_sum_limit(const std::vector<Int>& orders);  // stage(k) = sum of first k+1
OmegaLimit explicit_limit(std::vector<FpModule> stages, std::vector<IntMatrix> maps);

// Stages free_realization(alphas[i]).module with coordinate-inclusion maps;
// requires the chain to verify for cls (descending makes the inclusions
// homomorphisms). budget < 0 means all of the chain; otherwise it must not
// exceed alphas.size() - 1.
OmegaLimit build_m_phi(const LChain& chain, const TestClass& cls, int budget = -1);

// Trace the pp type of a tuple along the system: phi_j = the type generator
// of the tuple's image at stage j, for j in [start, budget]. Since each phi_j
// absolutely implies its predecessor, consecutive cls-equivalences decide
// stabilization.
struct StabilizationVerdict {
    bool stabilized = false;
    int stage = -1;                       // first stage of the stable tail
    int tail_start = 0;                   // = start argument
    std::vector<PpFormula> formulas;      // phi_j for j in [start, budget]
    // the strictly descending subchain: one entry per distinct type
    std::vector<int> distinct_stages;
    std::vector<PpFormula> distinct_formulas;
};
StabilizationVerdict tail_stabilization(const OmegaLimit& lim, int start,
                                        const IntMatrix& tuple, const TestClass& cls,
                                        int budget);

// For a from_chain system: the type generator of the first S(i) canonical
// generators of stage j (i <= j). Checks that it is absolutely equivalent to
// exists_project(alphas[j], S(i)) and, for every class the chain is stamped
// verified for, cls-equivalent to phi(i).
struct ChainStageType {
    PpFormula type;
    bool projection_match = false;                // the absolute check
    std::vector<std::string> matched_classes;     // stamped classes that agree
};
ChainStageType chain_stage_types(const OmegaLimit& lim, int j, int i);

// Arrange the generators of m (in the given processing order, a permutation
// of 0..gens-1) into a chain: grow the prefix by the smallest block whose
// annihilator formula projects, relative to cls, into the type generator of
// the previous prefix. For cls = flat on a torsion module the annihilator
// formula is the diagonal one built from element orders. The result verifies
// for cls and is stamped.
LChain arrange_l_chain(const FpModule& m, const std::vector<int>& order,
                       const TestClass& cls);

// Close c under canonical type-generator witnesses until the generated
// submodule stabilizes; the stable span is cls-pure in m. For cls = flat on
// a torsion module, <c> itself is already pure and returned directly.
struct SeparationResult {
    IntMatrix gens;              // rows generating the pure submodule
    bool budget_exhausted = false;  // stopped before stabilizing; gens partial
    bool pure_certified = false;    // is_pure(m, gens, cls)
    bool shortcut = false;          // flat/torsion direct path taken
    int rounds = 0;
};
SeparationResult separate_pure(const FpModule& m, const IntMatrix& c,
                               const TestClass& cls, int budget);

// Extend c to a generating tuple (by adjoining the module generators when
// needed) and return its annihilator formula, which absolutely generates the
// extended tuple's pp type.
struct QfExtension {
    IntMatrix extended;
    PpFormula qf;
    bool certified = false;  // implies(qf, pp_type_generator(m, extended), absolute)
};
QfExtension qf_generated_extension(const FpModule& m, const IntMatrix& c);

// The pp type of a tuple in a finitely presented module is generated by a
// single formula; cls only labels the request.
PpFormula atomicity_certificate(const FpModule& m, const IntMatrix& tuple,
                                const TestClass& cls);

// Every finitely presented module is Mittag-Leffler; over a torsion module
// the single formula s*x = 0 (s the torsion exponent) flat-generates every
// tuple's type.
struct TorsionMlResult {
    bool ml = true;
    bool torsion_shortcut = false;
    Int exponent;            // s, when the shortcut applies
    PpFormula generator;     // certificate for the generator tuple
};
TorsionMlResult torsion_sharp_ml(const FpModule& m);

// Zero test for sum_i ntuple_i (x) mtuple_i in N (x) M, with a formula
// witness on the zero side: the type generator phi of mtuple in M satisfies
// ntuple in (D phi)(N) exactly when the pairing vanishes.
struct HerzogResult {
    bool zero = false;
    PpFormula witness;             // phi, when zero
    bool membership_checked = false;  // ntuple in (D phi)(N) re-verified
    std::vector<Int> tensor_coords;   // reduced pairing, when nonzero
};
HerzogResult herzog_check(const FpModule& N, const IntMatrix& ntuple,
                          const FpModule& M, const IntMatrix& mtuple);

// Check that h is surjective and that the target generator tuple (plus any
// extra tuples) lift to preimages with cls-equivalent type generators. The
// preimage search enumerates kernel-coset representatives with coefficients
// bounded by `bound` (0 picks the largest invariant factor of the source,
// or 4 for a torsion-free source). Verdicts are for the checked set only.
struct EpiTupleReport {
    IntMatrix target_tuple;
    bool found = false;
    bool search_truncated = false;  // enumeration cap hit before success
    IntMatrix preimage;             // when found
};
struct EpiCheckResult {
    bool surjective = false;
    bool ok = false;  // surjective and every checked tuple lifted
    Int bound;
    std::vector<EpiTupleReport> tuples;
};
EpiCheckResult uniform_pure_epi_check(const FpHom& h, const TestClass& cls,
                                      const std::vector<IntMatrix>& extra_tuples = {},
                                      const Int& bound = 0);

// Arrange the target into a chain, build its limit system, and certify the
// stage maps onto the target: surjectivity, injectivity and cls-purity on
// the generator tuples. For an OmegaLimit target the stages map onto the
// matching stages of the target's own chain; injectivity is required only
// for cls = absolute / abspure, where stage maps are embeddings.
struct RealizeStage {
    FpModule source;
    FpModule target;
    FpHom map;
    bool surjective = false;
    bool injective = false;
    bool pure_on_generators = false;
};
struct RealizeResult {
    LChain chain;
    OmegaLimit system;
    std::vector<RealizeStage> stages;
    bool injectivity_required = false;
    bool ok = false;
};
RealizeResult realize_as_pure_image(const FpModule& n, const TestClass& cls, int budget);
RealizeResult realize_as_pure_image(const OmegaLimit& n, const TestClass& cls, int budget);

}  // namespace ppcalc
