#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chains.hpp"
#include "test_util.hpp"

using namespace ppcalc;
using testutil::cyclic;
using testutil::diag_module;
using testutil::rows_of;

namespace {

std::vector<Int> factors(const FpModule& m) { return invariant_factors(m); }

std::vector<int> identity_order(int k) {
    std::vector<int> out(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<size_t>(i)] = i;
    return out;
}

}  // namespace

TEST_CASE("prufer chain shape") {
    LChain c = prufer_chain(2, 4);
    CHECK(c.blocks == std::vector<int>{1, 0, 1, 1, 1});
    REQUIRE(c.alphas.size() == 4);
    CHECK(c.alphas[0] == parse_formula("2*x1 = 0"));
    CHECK(c.alphas[1] == parse_formula("2*x1 = 0 & x1 = 2*x2"));
    for (int i = 0; i < 4; ++i) {
        CHECK(c.alphas[static_cast<size_t>(i)].n == i + 1);
        CHECK(c.alphas[static_cast<size_t>(i)].quantifier_free());
        // stage i realizes the cyclic module of order 2^{i+1}
        std::vector<Int> want = {Int(1) << (i + 1)};
        CHECK(factors(free_realization(c.alphas[static_cast<size_t>(i)]).module) == want);
    }
    CHECK(c.prefix_arity(0) == 1);
    CHECK(c.prefix_arity(1) == 1);
    CHECK(c.prefix_arity(4) == 4);
    CHECK_THROWS_AS(c.prefix_arity(5), Error);
    CHECK_THROWS_AS(c.phi(4), Error);
    CHECK(c.phi(0) == c.alphas[0]);
    CHECK_THROWS_AS(prufer_chain(1, 4), Error);
    CHECK_THROWS_AS(prufer_chain(2, 0), Error);
}

TEST_CASE("prufer chain verifies flat but not absolute") {
    LChain c = prufer_chain(2, 5);
    ChainVerifyReport flat = verify_l_chain(c, TestClass::flat());
    CHECK(flat.ok);
    for (bool b : flat.descending) CHECK(b);
    for (bool b : flat.linked) CHECK(b);

    ChainVerifyReport abs = verify_l_chain(c, TestClass::absolute());
    CHECK_FALSE(abs.ok);
    for (bool b : abs.descending) CHECK(b);  // descending is class-free
    for (bool b : abs.linked) CHECK_FALSE(b);  // new divisibility at every step
    CHECK(abs.first_failure == 0);
    CHECK(abs.failure_kind == "linked");
}

TEST_CASE("verify rejects malformed chains") {
    LChain c;
    CHECK_THROWS_AS(verify_l_chain(c, TestClass::flat()), Error);  // no blocks
    c.blocks = {1, -1};
    CHECK_THROWS_AS(verify_l_chain(c, TestClass::flat()), Error);
    c.blocks = {1, 1};
    CHECK_THROWS_AS(verify_l_chain(c, TestClass::flat()), Error);  // missing alpha
    c.alphas = {top_formula(1)};
    CHECK_THROWS_AS(verify_l_chain(c, TestClass::flat()), Error);  // arity != S(1)
    c.alphas = {PpFormula(2, 1, IntMatrix(1, 2), rows_of({{2}}, 1))};
    CHECK_THROWS_AS(verify_l_chain(c, TestClass::flat()), Error);  // not quantifier-free
    c.alphas = {top_formula(2)};
    CHECK(verify_l_chain(c, TestClass::flat()).ok);  // single formula: nothing to compare
}

TEST_CASE("verify detects a broken descending step") {
    LChain c;
    c.blocks = {1, 1, 0};
    c.alphas = {bottom_formula(2), top_formula(2)};  // top does not imply bottom
    ChainVerifyReport r = verify_l_chain(c, TestClass::absolute());
    CHECK_FALSE(r.ok);
    REQUIRE(r.descending.size() == 1);
    CHECK_FALSE(r.descending[0]);
    CHECK(r.first_failure == 1);
    CHECK(r.failure_kind == "descending");
}

TEST_CASE("cyclic sum chain realizes partial sums") {
    LChain c = cyclic_sum_chain({2, 4, 8});
    CHECK(c.blocks == std::vector<int>{1, 0, 1, 1});
    REQUIRE(c.alphas.size() == 3);
    CHECK(factors(free_realization(c.alphas[0]).module) == std::vector<Int>{2});
    CHECK(factors(free_realization(c.alphas[1]).module) == std::vector<Int>{2, 4});
    CHECK(factors(free_realization(c.alphas[2]).module) == std::vector<Int>{2, 4, 8});
    CHECK(verify_l_chain(c, TestClass::flat()).ok);
    CHECK(verify_l_chain(c, TestClass::absolute()).ok);  // separated variables
    CHECK_THROWS_AS(cyclic_sum_chain({}), Error);
}

TEST_CASE("prufer limit stages and connecting maps") {
    OmegaLimit lim = prufer_limit(2, 8);
    CHECK(factors(lim.stage(0)).empty());  // zero module
    CHECK(factors(lim.stage(1)) == std::vector<Int>{2});
    CHECK(factors(lim.stage(8)) == std::vector<Int>{256});
    CHECK(lim.connecting(3).matrix == rows_of({{2}}, 1));
    CHECK(lim.push_tuple(1, 3, rows_of({{1}}, 1)) == rows_of({{4}}, 1));
    CHECK_THROWS_AS(lim.stage(9), Error);
    CHECK_THROWS_AS(lim.connecting(8), Error);
    CHECK_THROWS_AS(lim.push_tuple(3, 1, rows_of({{1}}, 1)), Error);
    CHECK_THROWS_AS(prufer_limit(2, -1), Error);
}

TEST_CASE("cyclic sum limit includes summands stepwise") {
    OmegaLimit lim = cyclic_sum_limit({2, 4, 8});
    CHECK(lim.budget == 2);
    CHECK(factors(lim.stage(0)) == std::vector<Int>{2});
    CHECK(factors(lim.stage(2)) == std::vector<Int>{2, 4, 8});
    CHECK(lim.connecting(0).matrix == rows_of({{1, 0}}, 2));
    // the image of the first summand's generator stays the first coordinate
    CHECK(lim.push_tuple(0, 2, rows_of({{1}}, 1)) == rows_of({{1, 0, 0}}, 3));
}

TEST_CASE("explicit limit validates its maps") {
    std::vector<FpModule> stages = {cyclic(2), cyclic(4)};
    // 1 -> 2 inside Z/4 is a homomorphism of Z/2 -> Z/4
    OmegaLimit lim = explicit_limit(stages, {rows_of({{2}}, 1)});
    CHECK(lim.budget == 1);
    CHECK(factors(lim.stage(1)) == std::vector<Int>{4});
    // 1 -> 1 is not: 2*1 != 0 in Z/4
    CHECK_THROWS_AS(explicit_limit(stages, {rows_of({{1}}, 1)}), Error);
    CHECK_THROWS_AS(explicit_limit({}, {}), Error);
    CHECK_THROWS_AS(explicit_limit(stages, {}), Error);
}

TEST_CASE("build_m_phi stages are the free realizations") {
    LChain c = prufer_chain(2, 8);
    OmegaLimit lim = build_m_phi(c, TestClass::flat());
    CHECK(lim.budget == 7);
    for (int k = 0; k <= 7; ++k) {
        std::vector<Int> want = {Int(1) << (k + 1)};
        CHECK(factors(lim.stage(k)) == want);
    }
    // the inclusion acts as multiplication by 2 on the cyclic generator:
    // e_{k+1} = 2 e_{k+2} holds in stage k+1
    for (int k = 0; k < 7; ++k) {
        const FpModule& next = lim.stage(k + 1);
        std::vector<Int> gen(static_cast<size_t>(lim.stage(k).gens));
        gen.back() = 1;
        std::vector<Int> img = lim.connecting(k).apply(gen);
        std::vector<Int> twice(static_cast<size_t>(next.gens));
        twice[static_cast<size_t>(next.gens - 1)] = 2;
        for (size_t i = 0; i < img.size(); ++i) img[i] -= twice[i];
        CHECK(next.is_zero_element(img));
    }
    CHECK_THROWS_AS(build_m_phi(c, TestClass::flat(), 8), Error);    // budget too deep
    CHECK_THROWS_AS(build_m_phi(c, TestClass::absolute()), Error);   // chain not absolute
    LChain empty;
    empty.blocks = {0};
    CHECK_THROWS_AS(build_m_phi(empty, TestClass::flat()), Error);   // nothing to realize
}

TEST_CASE("tails along the prufer family") {
    OmegaLimit lim = prufer_limit(2, 8);
    IntMatrix t = rows_of({{1}}, 1);

    StabilizationVerdict flat = tail_stabilization(lim, 1, t, TestClass::flat(), 8);
    CHECK(flat.stabilized);
    CHECK(flat.stage == 1);
    CHECK(flat.distinct_stages == std::vector<int>{1});
    CHECK(flat.formulas.size() == 8);

    StabilizationVerdict abs = tail_stabilization(lim, 1, t, TestClass::absolute(), 8);
    CHECK_FALSE(abs.stabilized);
    CHECK(abs.stage == 8);
    REQUIRE(abs.distinct_stages.size() == 8);  // strictly new type at every stage
    for (size_t i = 0; i + 1 < abs.distinct_formulas.size(); ++i) {
        CHECK(implies(abs.distinct_formulas[i + 1], abs.distinct_formulas[i],
                      TestClass::absolute())
                  .holds);
        CHECK_FALSE(implies(abs.distinct_formulas[i], abs.distinct_formulas[i + 1],
                            TestClass::absolute())
                        .holds);
    }

    // a single examined stage is trivially stable
    StabilizationVerdict one = tail_stabilization(lim, 3, t, TestClass::absolute(), 3);
    CHECK(one.stabilized);
    CHECK(one.stage == 3);

    CHECK_THROWS_AS(tail_stabilization(lim, 3, t, TestClass::flat(), 2), Error);
    CHECK_THROWS_AS(tail_stabilization(lim, 0, rows_of({{1, 0}}, 2), TestClass::flat(), 4),
                    Error);
}

TEST_CASE("tails along the chain system") {
    OmegaLimit lim = build_m_phi(prufer_chain(2, 8), TestClass::flat());
    IntMatrix q0 = rows_of({{1}}, 1);  // canonical block-0 tuple at stage 0

    StabilizationVerdict flat = tail_stabilization(lim, 0, q0, TestClass::flat(), 7);
    CHECK(flat.stabilized);
    CHECK(flat.stage == 0);

    StabilizationVerdict abs = tail_stabilization(lim, 0, q0, TestClass::absolute(), 7);
    CHECK_FALSE(abs.stabilized);
    CHECK(abs.distinct_stages.size() == 8);
}

TEST_CASE("stage types against the chain formulas") {
    LChain c = prufer_chain(2, 4);
    REQUIRE(verify_l_chain(c, TestClass::flat()).ok);
    c.verified_for.push_back("flat");
    OmegaLimit lim = build_m_phi(c, TestClass::flat());
    for (int j = 0; j <= lim.budget; ++j)
        for (int i = 0; i <= j; ++i) {
            ChainStageType st = chain_stage_types(lim, j, i);
            CHECK(st.projection_match);
            CHECK(st.matched_classes == std::vector<std::string>{"flat"});
        }
    CHECK_THROWS_AS(chain_stage_types(lim, 1, 2), Error);
    CHECK_THROWS_AS(chain_stage_types(prufer_limit(2, 4), 1, 1), Error);
}

TEST_CASE("arrange splits a two-generator sum") {
    FpModule m = diag_module({2, 4});
    LChain c = arrange_l_chain(m, identity_order(2), TestClass::absolute());
    CHECK(c.blocks == std::vector<int>{1, 1});
    REQUIRE(c.alphas.size() == 1);
    CHECK(factors(free_realization(c.alphas[0]).module) == std::vector<Int>{2, 4});
    CHECK(c.verified_for == std::vector<std::string>{"absolute"});

    // processing the order-4 generator first still rebuilds the module
    LChain swapped = arrange_l_chain(m, {1, 0}, TestClass::absolute());
    CHECK(swapped.blocks == std::vector<int>{1, 1});
    CHECK(factors(free_realization(swapped.alphas[0]).module) == std::vector<Int>{2, 4});
}

TEST_CASE("arrange keeps a cyclic module in one block") {
    LChain c = arrange_l_chain(cyclic(8), identity_order(1), TestClass::absolute());
    CHECK(c.blocks == std::vector<int>{1, 0});
    REQUIRE(c.alphas.size() == 1);
    CHECK(c.alphas[0] == parse_formula("8*x1 = 0"));
}

TEST_CASE("arrange handles free rank and torsion together") {
    FpModule m = present_module(3, rows_of({{0, 0, 3}}, 3));  // Z^2 + Z/3
    LChain c = arrange_l_chain(m, identity_order(3), TestClass::absolute());
    CHECK(c.blocks == std::vector<int>{1, 1, 1});
    REQUIRE(c.alphas.size() == 2);
    CHECK(c.alphas[0] == top_formula(2));
    CHECK(c.alphas[1] == parse_formula("3*x3 = 0"));
    CHECK(factors(free_realization(c.alphas[1]).module) == factors(m));
}

TEST_CASE("flat arrangement of a prufer stage is the diagonal tower") {
    FpModule m3 = free_realization(prufer_chain(2, 4).alphas[3]).module;  // Z/16 on 4 gens
    LChain c = arrange_l_chain(m3, identity_order(4), TestClass::flat());
    CHECK(c.blocks == std::vector<int>{1, 1, 1, 1});
    REQUIRE(c.alphas.size() == 3);
    std::vector<std::vector<Int>> want = {{2, 4}, {2, 4, 8}, {2, 4, 8, 16}};
    for (size_t i = 0; i < c.alphas.size(); ++i)
        CHECK(factors(free_realization(c.alphas[i]).module) == want[i]);
    CHECK(c.verified_for == std::vector<std::string>{"flat"});
    // separated variables make the tower absolutely descending and linked too
    CHECK(verify_l_chain(c, TestClass::absolute()).ok);
}

TEST_CASE("arrange edge cases") {
    FpModule zero = present_module(0, IntMatrix(0, 0));
    LChain c = arrange_l_chain(zero, {}, TestClass::flat());
    CHECK(c.blocks == std::vector<int>{0});
    CHECK(c.alphas.empty());

    LChain z = arrange_l_chain(present_module(1, IntMatrix(0, 1)), identity_order(1),
                               TestClass::flat());
    CHECK(z.blocks == std::vector<int>{1, 0});
    CHECK(z.alphas[0] == top_formula(1));

    CHECK_THROWS_AS(arrange_l_chain(cyclic(4), {0, 1}, TestClass::flat()), Error);
    CHECK_THROWS_AS(arrange_l_chain(cyclic(4), {1}, TestClass::flat()), Error);
}
