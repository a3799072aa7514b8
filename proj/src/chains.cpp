#include "chains.hpp"

#include <algorithm>

namespace ppcalc {

namespace {

IntMatrix rows_matrix(const std::vector<std::vector<Int>>& rows, int cols) {
    IntMatrix out(static_cast<int>(rows.size()), cols);
    for (int i = 0; i < out.rows; ++i) out.set_row(i, rows[static_cast<size_t>(i)]);
    return out;
}

Int int_pow(const Int& base, int exp) {
    Int out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

TestClass tag_to_class(const std::string& tag) {
    if (tag == "absolute") return TestClass::absolute();
    if (tag == "flat") return TestClass::flat();
    if (tag == "abspure") return TestClass::abs_pure();
    fail(Error::Code::argument, "unknown class tag: " + tag);
}

void validate_chain(const LChain& c) {
    if (c.blocks.empty()) fail(Error::Code::domain, "chain has no blocks");
    for (int b : c.blocks)
        if (b < 0) fail(Error::Code::domain, "chain block sizes must be nonnegative");
    if (c.blocks.size() != c.alphas.size() + 1)
        fail(Error::Code::domain, "chain must have one more block than formulas");
    for (size_t i = 0; i < c.alphas.size(); ++i) {
        if (!c.alphas[i].quantifier_free())
            fail(Error::Code::domain, "chain formulas must be quantifier-free");
        if (c.alphas[i].n != c.prefix_arity(static_cast<int>(i) + 1))
            fail(Error::Code::domain, "chain formula arity does not match its prefix");
    }
}

}  // namespace

int LChain::prefix_arity(int i) const {
    if (i < 0 || i >= static_cast<int>(blocks.size()))
        fail(Error::Code::argument, "chain prefix index out of range");
    int s = 0;
    for (int j = 0; j <= i; ++j) s += blocks[static_cast<size_t>(j)];
    return s;
}

PpFormula LChain::phi(int i) const {
    if (i < 0 || i >= static_cast<int>(alphas.size()))
        fail(Error::Code::argument, "chain formula index out of range");
    return exists_project(alphas[static_cast<size_t>(i)], prefix_arity(i));
}

std::string class_tag(const TestClass& cls) {
    switch (cls.kind) {
        case TestClass::Kind::absolute: return "absolute";
        case TestClass::Kind::flat: return "flat";
        case TestClass::Kind::abs_pure: return "abspure";
        case TestClass::Kind::explicit_list: return "";
    }
    return "";
}

ChainVerifyReport verify_l_chain(const LChain& chain, const TestClass& cls) {
    validate_chain(chain);
    int N = static_cast<int>(chain.alphas.size());
    ChainVerifyReport rep;
    rep.ok = true;
    for (int i = 1; i < N; ++i) {
        const PpFormula& cur = chain.alphas[static_cast<size_t>(i)];
        PpFormula prev = pad_free(chain.alphas[static_cast<size_t>(i - 1)], cur.n);
        rep.descending.push_back(implies(cur, prev, TestClass::absolute()).holds);
    }
    for (int i = 0; i + 1 < N; ++i) {
        PpFormula proj = exists_project(chain.alphas[static_cast<size_t>(i + 1)],
                                        chain.prefix_arity(i));
        rep.linked.push_back(equivalent(proj, chain.phi(i), cls));
    }
    for (int i = 1; i < N; ++i)
        if (!rep.descending[static_cast<size_t>(i - 1)]) {
            rep.ok = false;
            if (rep.first_failure < 0) { rep.first_failure = i; rep.failure_kind = "descending"; }
        }
    for (int i = 0; i + 1 < N; ++i)
        if (!rep.linked[static_cast<size_t>(i)]) {
            rep.ok = false;
            if (rep.first_failure < 0) { rep.first_failure = i; rep.failure_kind = "linked"; }
        }
    return rep;
}

LChain prufer_chain(const Int& p, int budget) {
    if (p < 2) fail(Error::Code::argument, "prufer parameter must be at least 2");
    if (budget < 1) fail(Error::Code::argument, "prufer budget must be positive");
    LChain c;
    c.blocks = {1, 0};
    for (int i = 1; i < budget; ++i) c.blocks.push_back(1);
    for (int i = 0; i < budget; ++i) {
        int nn = i + 1;
        IntMatrix A(nn, nn);
        A.at(0, 0) = p;
        for (int j = 1; j <= i; ++j) {
            A.at(j, j - 1) = 1;
            A.at(j, j) = -p;
        }
        c.alphas.push_back(PpFormula(nn, 0, A, IntMatrix(nn, 0)));
    }
    return c;
}

LChain cyclic_sum_chain(const std::vector<Int>& orders) {
    if (orders.empty()) fail(Error::Code::argument, "cyclic sum needs at least one order");
    for (const Int& r : orders)
        if (r < 0) fail(Error::Code::argument, "cyclic orders must be nonnegative");
    int B = static_cast<int>(orders.size()) - 1;
    LChain c;
    c.blocks = {1, 0};
    for (int i = 0; i < B; ++i) c.blocks.push_back(1);
    for (int k = 0; k <= B; ++k) {
        int nn = k + 1;
        IntMatrix A(nn, nn);
        for (int j = 0; j <= k; ++j) A.at(j, j) = orders[static_cast<size_t>(j)];
        c.alphas.push_back(PpFormula(nn, 0, A, IntMatrix(nn, 0)));
    }
    return c;
}

FpModule OmegaLimit::make_stage(int i) const {
    switch (family) {
        case Family::prufer:
            return present_module(1, IntMatrix(1, 1, {int_pow(p, i)}));
        case Family::cyclic_sum: {
            IntMatrix rel(i + 1, i + 1);
            for (int j = 0; j <= i; ++j) rel.at(j, j) = orders[static_cast<size_t>(j)];
            return present_module(i + 1, rel);
        }
        case Family::from_chain:
            return free_realization(chain.alphas[static_cast<size_t>(i)]).module;
        case Family::explicit_stages:
            break;
    }
    fail(Error::Code::domain, "explicit stages are fixed at construction");
}

IntMatrix OmegaLimit::make_map(int i) const {
    if (family == Family::prufer) return IntMatrix(1, 1, {p});
    // coordinate inclusion for cyclic_sum and from_chain
    const FpModule& a = cache->stages[static_cast<size_t>(i)];
    const FpModule& b = cache->stages[static_cast<size_t>(i + 1)];
    IntMatrix m(a.gens, b.gens);
    for (int t = 0; t < a.gens; ++t) m.at(t, t) = 1;
    return m;
}

void OmegaLimit::fill_to(int i) const {
    std::lock_guard<std::mutex> lock(cache->mu);
    while (static_cast<int>(cache->stages.size()) <= i)
        cache->stages.push_back(make_stage(static_cast<int>(cache->stages.size())));
    while (static_cast<int>(cache->maps.size()) < i) {
        int j = static_cast<int>(cache->maps.size());
        cache->maps.push_back(check_hom(cache->stages[static_cast<size_t>(j)],
                                        cache->stages[static_cast<size_t>(j + 1)],
                                        make_map(j)));
    }
}

const FpModule& OmegaLimit::stage(int i) const {
    if (i < 0 || i > budget) fail(Error::Code::argument, "stage index out of range");
    fill_to(i);
    std::lock_guard<std::mutex> lock(cache->mu);
    return cache->stages[static_cast<size_t>(i)];
}

const FpHom& OmegaLimit::connecting(int i) const {
    if (i < 0 || i + 1 > budget) fail(Error::Code::argument, "connecting map index out of range");
    fill_to(i + 1);
    std::lock_guard<std::mutex> lock(cache->mu);
    return cache->maps[static_cast<size_t>(i)];
}

int OmegaLimit::cached_stages() const {
    std::lock_guard<std::mutex> lock(cache->mu);
    return static_cast<int>(cache->stages.size());
}

IntMatrix OmegaLimit::push_tuple(int from, int to, IntMatrix rows) const {
    if (from < 0 || to < from || to > budget)
        fail(Error::Code::argument, "stage range out of order");
    for (int j = from; j < to; ++j) rows = connecting(j).apply_rows(rows);
    return rows;
}

OmegaLimit prufer_limit(const Int& p, int budget) {
    if (p < 2) fail(Error::Code::argument, "prufer parameter must be at least 2");
    if (budget < 0) fail(Error::Code::argument, "budget must be nonnegative");
    OmegaLimit lim;
    lim.family = OmegaLimit::Family::prufer;
    lim.p = p;
    lim.budget = budget;
    return lim;
}

OmegaLimit cyclic_sum_limit(const std::vector<Int>& orders) {
    if (orders.empty()) fail(Error::Code::argument, "cyclic sum needs at least one order");
    for (const Int& r : orders)
        if (r < 0) fail(Error::Code::argument, "cyclic orders must be nonnegative");
    OmegaLimit lim;
    lim.family = OmegaLimit::Family::cyclic_sum;
    lim.orders = orders;
    lim.budget = static_cast<int>(orders.size()) - 1;
    return lim;
}

OmegaLimit explicit_limit(std::vector<FpModule> stages, std::vector<IntMatrix> maps) {
    if (stages.empty()) fail(Error::Code::argument, "a system needs at least one stage");
    if (maps.size() + 1 != stages.size())
        fail(Error::Code::argument, "a system needs one map per consecutive stage pair");
    OmegaLimit lim;
    lim.family = OmegaLimit::Family::explicit_stages;
    lim.budget = static_cast<int>(stages.size()) - 1;
    for (size_t j = 0; j < maps.size(); ++j)
        lim.cache->maps.push_back(check_hom(stages[j], stages[j + 1], maps[j]));
    for (FpModule& m : stages) lim.cache->stages.push_back(std::move(m));
    return lim;
}

OmegaLimit build_m_phi(const LChain& chain, const TestClass& cls, int budget) {
    validate_chain(chain);
    if (chain.alphas.empty()) fail(Error::Code::domain, "chain has no formulas to realize");
    int maxb = static_cast<int>(chain.alphas.size()) - 1;
    if (budget < 0) budget = maxb;
    if (budget > maxb) fail(Error::Code::budget, "chain too short for the requested budget");
    std::string tag = class_tag(cls);
    bool stamped = !tag.empty() &&
                   std::find(chain.verified_for.begin(), chain.verified_for.end(), tag) !=
                       chain.verified_for.end();
    if (!stamped && !verify_l_chain(chain, cls).ok)
        fail(Error::Code::domain, "chain does not verify for the requested class");
    OmegaLimit lim;
    lim.family = OmegaLimit::Family::from_chain;
    lim.chain = chain;
    if (!stamped && !tag.empty()) lim.chain.verified_for.push_back(tag);
    lim.budget = budget;
    return lim;
}

StabilizationVerdict tail_stabilization(const OmegaLimit& lim, int start,
                                        const IntMatrix& tuple, const TestClass& cls,
                                        int budget) {
    if (start < 0 || budget < start || budget > lim.budget)
        fail(Error::Code::argument, "tail range out of order");
    if (tuple.cols != lim.stage(start).gens)
        fail(Error::Code::dimension, "tuple does not live in the start stage");
    StabilizationVerdict v;
    v.tail_start = start;
    IntMatrix cur = reduce_tuple(lim.stage(start), tuple);
    v.formulas.push_back(pp_type_generator(lim.stage(start), cur));
    for (int j = start; j < budget; ++j) {
        cur = lim.connecting(j).apply_rows(cur);
        v.formulas.push_back(pp_type_generator(lim.stage(j + 1), cur));
    }
    // each step only grows the type, so the tail descends and consecutive
    // equivalences decide stabilization
    std::vector<bool> eq;
    for (size_t j = 0; j + 1 < v.formulas.size(); ++j) {
        if (!implies(v.formulas[j + 1], v.formulas[j], TestClass::absolute()).holds)
            fail(Error::Code::domain, "tail types failed to descend");
        eq.push_back(equivalent(v.formulas[j], v.formulas[j + 1], cls));
    }
    v.stage = start;
    for (size_t j = 0; j < eq.size(); ++j)
        if (!eq[j]) v.stage = start + static_cast<int>(j) + 1;
    v.stabilized = v.stage < budget || start == budget;
    v.distinct_stages.push_back(start);
    v.distinct_formulas.push_back(v.formulas.front());
    for (size_t j = 0; j < eq.size(); ++j)
        if (!eq[j]) {
            v.distinct_stages.push_back(start + static_cast<int>(j) + 1);
            v.distinct_formulas.push_back(v.formulas[j + 1]);
        }
    return v;
}

ChainStageType chain_stage_types(const OmegaLimit& lim, int j, int i) {
    if (lim.family != OmegaLimit::Family::from_chain)
        fail(Error::Code::domain, "stage types need a chain-built system");
    if (i < 0 || j < i || j > lim.budget)
        fail(Error::Code::argument, "stage type indices out of order");
    const FpModule& st = lim.stage(j);
    int keep = lim.chain.prefix_arity(i);
    IntMatrix prefix(keep, st.gens);
    for (int t = 0; t < keep; ++t) {
        std::vector<Int> row(static_cast<size_t>(st.gens));
        row[static_cast<size_t>(t)] = 1;
        prefix.set_row(t, st.reduce(row));
    }
    ChainStageType out;
    out.type = pp_type_generator(st, prefix);
    PpFormula proj = exists_project(lim.chain.alphas[static_cast<size_t>(j)], keep);
    out.projection_match = equivalent(out.type, proj, TestClass::absolute());
    for (const std::string& tag : lim.chain.verified_for)
        if (equivalent(out.type, lim.chain.phi(i), tag_to_class(tag)))
            out.matched_classes.push_back(tag);
    return out;
}

LChain arrange_l_chain(const FpModule& m, const std::vector<int>& order,
                       const TestClass& cls) {
    int k = m.gens;
    if (static_cast<int>(order.size()) != k)
        fail(Error::Code::argument, "generator order must list every generator once");
    std::vector<bool> seen(static_cast<size_t>(k), false);
    for (int g : order) {
        if (g < 0 || g >= k || seen[static_cast<size_t>(g)])
            fail(Error::Code::argument, "generator order must be a permutation");
        seen[static_cast<size_t>(g)] = true;
    }
    std::string tag = class_tag(cls);
    LChain c;
    if (k == 0) {
        c.blocks = {0};
        if (!tag.empty()) c.verified_for.push_back(tag);
        return c;
    }
    std::vector<std::vector<Int>> gens;
    for (int i = 0; i < k; ++i) {
        std::vector<Int> row(static_cast<size_t>(k));
        row[static_cast<size_t>(order[static_cast<size_t>(i)])] = 1;
        gens.push_back(row);
    }
    bool diagonal = cls.kind == TestClass::Kind::flat && is_torsion(m);
    std::vector<std::vector<Int>> prefix = {gens[0]};
    c.blocks = {1};
    int idx = 1;
    while (idx < k || c.alphas.empty()) {
        int rem = k - idx;
        bool found = false;
        int take = 0;
        PpFormula alpha;
        for (take = (rem > 0 ? 1 : 0); take <= rem; ++take) {
            std::vector<std::vector<Int>> cand = prefix;
            for (int j = 0; j < take; ++j) cand.push_back(gens[static_cast<size_t>(idx + j)]);
            IntMatrix cand_rows = rows_matrix(cand, k);
            if (diagonal) {
                int nn = cand_rows.rows;
                IntMatrix A(nn, nn);
                for (int t = 0; t < nn; ++t) A.at(t, t) = element_order(m, cand_rows.row(t));
                alpha = PpFormula(nn, 0, A, IntMatrix(nn, 0));
            } else {
                alpha = qf_annihilator_formula(m, cand_rows);
            }
            PpFormula cand_phi = exists_project(alpha, static_cast<int>(prefix.size()));
            PpFormula target = pp_type_generator(m, rows_matrix(prefix, k));
            if (implies(cand_phi, target, cls).holds) { found = true; break; }
        }
        if (!found) fail(Error::Code::domain, "no admissible block extends the chain");
        c.blocks.push_back(take);
        c.alphas.push_back(alpha);
        for (int j = 0; j < take; ++j) prefix.push_back(gens[static_cast<size_t>(idx + j)]);
        idx += take;
        if (idx >= k) break;
    }
    if (!verify_l_chain(c, cls).ok)
        fail(Error::Code::domain, "arranged chain failed verification");
    if (!tag.empty()) c.verified_for.push_back(tag);
    return c;
}

SeparationResult separate_pure(const FpModule& m, const IntMatrix& c,
                               const TestClass& cls, int budget) {
    if (c.cols != m.gens) fail(Error::Code::dimension, "tuple rows must live in the module");
    if (budget < 1) fail(Error::Code::argument, "budget must be positive");
    SeparationResult out;
    if (cls.kind == TestClass::Kind::flat && is_torsion(m)) {
        // every submodule of a torsion module is flat-pure: quantifier-free
        // formulas evaluate to zero over the integers
        out.gens = reduce_tuple(m, c);
        out.shortcut = true;
        out.pure_certified = is_pure(m, out.gens, cls);
        return out;
    }
    IntMatrix cur = reduce_tuple(m, c);
    for (int round = 1; round <= budget; ++round) {
        out.rounds = round;
        PpFormula type = pp_type_generator(m, cur);
        auto w = formula_witness(type, m, cur);
        if (!w) fail(Error::Code::domain, "tuple lost its own type witness");
        Lattice span = Lattice::from_rows(vstack(cur, m.rel.basis));
        IntMatrix fresh(0, m.gens);
        for (int i = 0; i < w->rows; ++i)
            if (!span.contains(w->row(i))) {
                IntMatrix one(1, m.gens);
                one.set_row(0, w->row(i));
                fresh = vstack(fresh, one);
                span = lattice_sum(span, Lattice::from_rows(one));
            }
        if (fresh.rows == 0) {
            out.gens = cur;
            out.pure_certified = is_pure(m, cur, cls);
            return out;
        }
        cur = reduce_tuple(m, vstack(cur, fresh));
    }
    out.gens = cur;
    out.budget_exhausted = true;
    out.pure_certified = is_pure(m, cur, cls);
    return out;
}

QfExtension qf_generated_extension(const FpModule& m, const IntMatrix& c) {
    if (c.cols != m.gens) fail(Error::Code::dimension, "tuple rows must live in the module");
    Lattice span = Lattice::from_rows(vstack(c, m.rel.basis));
    bool spans = lattice_contains(span, Lattice::full(m.gens));
    QfExtension out;
    out.extended = spans ? c : vstack(c, IntMatrix::identity(m.gens));
    out.qf = qf_annihilator_formula(m, out.extended);
    out.certified =
        implies(out.qf, pp_type_generator(m, out.extended), TestClass::absolute()).holds;
    return out;
}

PpFormula atomicity_certificate(const FpModule& m, const IntMatrix& tuple,
                                const TestClass&) {
    return pp_type_generator(m, tuple);
}

TorsionMlResult torsion_sharp_ml(const FpModule& m) {
    TorsionMlResult out;
    IntMatrix id = IntMatrix::identity(m.gens);
    if (is_torsion(m)) {
        out.torsion_shortcut = true;
        out.exponent = torsion_exponent(m);
        IntMatrix A(m.gens, m.gens);
        for (int i = 0; i < m.gens; ++i) A.at(i, i) = out.exponent;
        out.generator = PpFormula(m.gens, 0, A, IntMatrix(m.gens, 0));
        if (!implies(out.generator, pp_type_generator(m, id), TestClass::flat()).holds ||
            !implies(out.generator, qf_annihilator_formula(m, id), TestClass::flat()).holds)
            fail(Error::Code::domain, "torsion exponent formula failed to generate");
    } else {
        out.generator = pp_type_generator(m, id);
    }
    return out;
}

HerzogResult herzog_check(const FpModule& N, const IntMatrix& ntuple,
                          const FpModule& M, const IntMatrix& mtuple) {
    if (ntuple.cols != N.gens || mtuple.cols != M.gens)
        fail(Error::Code::dimension, "tuple rows must live in their modules");
    if (ntuple.rows != mtuple.rows)
        fail(Error::Code::dimension, "pairing needs tuples of equal length");
    TensorProduct t = tensor_product(N, M);
    std::vector<Int> pair = t.pair_tuples(ntuple, mtuple);
    HerzogResult out;
    out.zero = t.module.is_zero_element(pair);
    if (out.zero) {
        out.witness = pp_type_generator(M, mtuple);
        if (!evaluate(dualize(out.witness), N).contains_tuple(ntuple))
            fail(Error::Code::domain, "dual membership failed for a vanishing pairing");
        out.membership_checked = true;
    } else {
        out.tensor_coords = t.module.reduce(pair);
    }
    return out;
}

namespace {

// preimage solutions for one target row: canonical x with x * H = row modulo
// the target relations, plus the lattice of x-shifts preserving the image
struct RowLift {
    std::vector<Int> base;
    Lattice shifts;
};

std::optional<RowLift> lift_row(const FpHom& h, const std::vector<Int>& row) {
    int ks = h.source.gens, kt = h.target.gens, rt = h.target.rel.basis.rows;
    IntMatrix sys(kt, ks + rt);
    for (int c = 0; c < kt; ++c) {
        for (int j = 0; j < ks; ++j) sys.at(c, j) = h.matrix.at(j, c);
        for (int l = 0; l < rt; ++l) sys.at(c, ks + l) = h.target.rel.basis.at(l, c);
    }
    auto sol = solve_linear(sys, row);
    if (!sol) return std::nullopt;
    RowLift out;
    out.base.assign(sol->particular.begin(), sol->particular.begin() + ks);
    IntMatrix proj(sol->kernel.basis.rows, ks);
    for (int i = 0; i < proj.rows; ++i)
        for (int j = 0; j < ks; ++j) proj.at(i, j) = sol->kernel.basis.at(i, j);
    out.shifts = Lattice::from_rows(proj);
    return out;
}

}  // namespace

EpiCheckResult uniform_pure_epi_check(const FpHom& h, const TestClass& cls,
                                      const std::vector<IntMatrix>& extra_tuples,
                                      const Int& bound) {
    EpiCheckResult out;
    out.bound = bound;
    if (out.bound <= 0) {
        out.bound = 0;
        for (const Int& f : invariant_factors(h.source)) out.bound = std::max(out.bound, f);
        if (out.bound == 0) out.bound = 4;  // torsion-free source
    }
    out.surjective = is_surjective(h);
    std::vector<IntMatrix> tuples = {reduce_tuple(h.target, IntMatrix::identity(h.target.gens))};
    for (const IntMatrix& t : extra_tuples) {
        if (t.cols != h.target.gens)
            fail(Error::Code::dimension, "tuple rows must live in the target");
        tuples.push_back(reduce_tuple(h.target, t));
    }
    const long cap = 20000;
    bool all_found = true;
    for (const IntMatrix& t : tuples) {
        EpiTupleReport rep;
        rep.target_tuple = t;
        std::vector<RowLift> lifts;
        bool liftable = true;
        for (int r = 0; r < t.rows; ++r) {
            auto lift = lift_row(h, t.row(r));
            if (!lift) { liftable = false; break; }
            lifts.push_back(std::move(*lift));
        }
        if (liftable) {
            PpFormula want = pp_type_generator(h.target, t);
            std::vector<int> dims;
            for (const RowLift& l : lifts) dims.push_back(l.shifts.basis.rows);
            int total_dims = 0;
            for (int d : dims) total_dims += d;
            std::vector<Int> coeff(static_cast<size_t>(total_dims));
            long tried = 0;
            bool first = true;
            for (;;) {
                if (tried++ >= cap) { rep.search_truncated = true; break; }
                IntMatrix cand(t.rows, h.source.gens);
                int off = 0;
                for (int r = 0; r < t.rows; ++r) {
                    std::vector<Int> x = lifts[static_cast<size_t>(r)].base;
                    for (int d = 0; d < dims[static_cast<size_t>(r)]; ++d) {
                        const Int& cf = coeff[static_cast<size_t>(off + d)];
                        if (cf != 0)
                            for (int j = 0; j < h.source.gens; ++j)
                                x[static_cast<size_t>(j)] +=
                                    cf * lifts[static_cast<size_t>(r)].shifts.basis.at(d, j);
                    }
                    cand.set_row(r, h.source.reduce(x));
                    off += dims[static_cast<size_t>(r)];
                }
                if (equivalent(pp_type_generator(h.source, cand), want, cls)) {
                    rep.found = true;
                    rep.preimage = cand;
                    break;
                }
                // odometer over [-bound, bound]^dims, all-zero vector first
                if (total_dims == 0) break;
                bool advanced = false;
                for (int d = 0; d < total_dims && !advanced; ++d) {
                    if (first && d == 0) {
                        for (int e = 0; e < total_dims; ++e)
                            coeff[static_cast<size_t>(e)] = -out.bound;
                        first = false;
                        advanced = true;
                        break;
                    }
                    if (coeff[static_cast<size_t>(d)] < out.bound) {
                        ++coeff[static_cast<size_t>(d)];
                        for (int e = 0; e < d; ++e) coeff[static_cast<size_t>(e)] = -out.bound;
                        advanced = true;
                    }
                }
                if (!advanced) break;
                bool all_zero = true;
                for (const Int& cf : coeff)
                    if (cf != 0) { all_zero = false; break; }
                if (all_zero) continue;  // already tried first
            }
        }
        all_found = all_found && rep.found;
        out.tuples.push_back(std::move(rep));
    }
    out.ok = out.surjective && all_found;
    return out;
}

namespace {

RealizeResult realize_stages(const LChain& schain, const TestClass& cls,
                             const std::vector<FpModule>& targets,
                             const std::vector<IntMatrix>& maps) {
    RealizeResult out;
    out.chain = schain;
    out.system = build_m_phi(schain, cls);
    out.injectivity_required = cls.kind == TestClass::Kind::absolute ||
                               cls.kind == TestClass::Kind::abs_pure;
    bool all_pure = true, all_inj = true;
    for (size_t i = 0; i < targets.size(); ++i) {
        RealizeStage st;
        st.source = out.system.stage(static_cast<int>(i));
        st.target = targets[i];
        st.map = check_hom(st.source, st.target, maps[i]);
        st.surjective = is_surjective(st.map);
        st.injective = is_injective(st.map);
        IntMatrix canonical = reduce_tuple(st.source, IntMatrix::identity(st.source.gens));
        IntMatrix image = st.map.apply_rows(canonical);
        st.pure_on_generators = equivalent(pp_type_generator(st.source, canonical),
                                           pp_type_generator(st.target, image), cls);
        all_pure = all_pure && st.pure_on_generators;
        all_inj = all_inj && st.injective;
        out.stages.push_back(std::move(st));
    }
    out.ok = !out.stages.empty() && out.stages.back().surjective && all_pure &&
             (!out.injectivity_required || all_inj);
    return out;
}

}  // namespace

RealizeResult realize_as_pure_image(const FpModule& n, const TestClass& cls, int budget) {
    if (budget < 1) fail(Error::Code::argument, "budget must be positive");
    std::vector<int> order(static_cast<size_t>(n.gens));
    for (int i = 0; i < n.gens; ++i) order[static_cast<size_t>(i)] = i;
    LChain schain = arrange_l_chain(n, order, cls);
    if (static_cast<int>(schain.alphas.size()) > budget)
        fail(Error::Code::budget, "budget exhausted before all generators were consumed");
    std::vector<FpModule> targets;
    std::vector<IntMatrix> maps;
    for (size_t i = 0; i < schain.alphas.size(); ++i) {
        int g = schain.prefix_arity(static_cast<int>(i) + 1);
        IntMatrix map(g, n.gens);
        for (int t = 0; t < g; ++t) map.at(t, order[static_cast<size_t>(t)]) = 1;
        targets.push_back(n);
        maps.push_back(map);
    }
    return realize_stages(schain, cls, targets, maps);
}

RealizeResult realize_as_pure_image(const OmegaLimit& n, const TestClass& cls, int budget) {
    if (budget < 1) fail(Error::Code::argument, "budget must be positive");
    LChain tchain;
    switch (n.family) {
        case OmegaLimit::Family::prufer:
            tchain = prufer_chain(n.p, budget);
            break;
        case OmegaLimit::Family::cyclic_sum:
            tchain = cyclic_sum_chain(n.orders);
            break;
        case OmegaLimit::Family::from_chain:
            tchain = n.chain;
            break;
        case OmegaLimit::Family::explicit_stages:
            return realize_as_pure_image(n.stage(n.budget), cls, budget);
    }
    int keep = std::min(budget, static_cast<int>(tchain.alphas.size()));
    tchain.alphas.resize(static_cast<size_t>(keep));
    tchain.blocks.resize(static_cast<size_t>(keep) + 1);
    FpModule target = free_realization(tchain.alphas.back()).module;
    std::vector<int> order(static_cast<size_t>(target.gens));
    for (int i = 0; i < target.gens; ++i) order[static_cast<size_t>(i)] = i;
    LChain schain = arrange_l_chain(target, order, cls);
    if (static_cast<int>(schain.alphas.size()) > budget)
        fail(Error::Code::budget, "budget exhausted before all generators were consumed");
    std::vector<FpModule> targets;
    std::vector<IntMatrix> maps;
    for (size_t i = 0; i < schain.alphas.size(); ++i) {
        int g = schain.prefix_arity(static_cast<int>(i) + 1);
        int match = -1;
        for (size_t j = 0; j < tchain.alphas.size(); ++j)
            if (tchain.prefix_arity(static_cast<int>(j) + 1) == g) { match = static_cast<int>(j); break; }
        if (match >= 0) {
            targets.push_back(free_realization(tchain.alphas[static_cast<size_t>(match)]).module);
            maps.push_back(IntMatrix::identity(g));
        } else {
            IntMatrix map(g, target.gens);
            for (int t = 0; t < g; ++t) map.at(t, t) = 1;
            targets.push_back(target);
            maps.push_back(map);
        }
    }
    return realize_stages(schain, cls, targets, maps);
}

}  // namespace ppcalc
